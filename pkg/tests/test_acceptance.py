"""Acceptance gate: every criterion runs at its stated tolerance and prints
one pass/fail line.  `relaysec selftest` executes the same checks."""

import pytest

from relaysec import acceptance


@pytest.mark.parametrize(
    "criterion",
    acceptance.ALL_CRITERIA,
    ids=[f"C{i + 1}" for i in range(len(acceptance.ALL_CRITERIA))],
)
def test_criterion(criterion):
    result = criterion()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.cid} ({result.seconds:.2f}s): {result.description} -- {result.detail}")
    assert result.passed, f"{result.cid}: {result.detail}"


def test_selftest_command_aggregates(tmp_path, capsys):
    from relaysec.cli import main

    out = str(tmp_path / "selftest.csv")
    assert main(["selftest", "--out", out]) == 0
    text = open(out).read()
    assert text.count("pass") == len(acceptance.ALL_CRITERIA)
    assert "FAIL" not in text
