"""Command-line surface.

Subcommands:
  curve       Best confidential rate R1 vs alpha per strategy (CSV columns
              alpha,<strategy>_r1,...).
  region      Pareto staircases of (R0, R1) corners per strategy.
  gaussian    Single-point strategy evaluation from explicit parameters.
  dmc-eval    Membership of a rate point in one bound, with per-inequality
              slacks and branch conditions.
  dmc-search  Brute-force grid search over a bound's admissible couplings.
  selftest    Run the acceptance criteria and report a pass/fail table.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 infeasible
configuration, 4 self-test failure.  All numeric output is CSV with a header
row, numbers at 9 significant digits, byte-stable for a fixed scenario.
`RBC_THREADS` optionally caps the brute-force worker count.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import acceptance
from .bounds import evaluate_membership
from .dmc import RateTuple
from .errors import InfeasibleError, UsageError, ValidationError
from .gaussian import GaussianNetwork, StrategyParams
from .regionsearch import brute_force_best
from .scenario import Scenario, load_scenario
from .sweep import (
    convex_hull_filter,
    evaluate_strategy,
    max_r1_vs_alpha,
    region_boundary,
    resolve_strategy,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_SELFTEST = 4


def fmt(value) -> str:
    """CSV number format: 9 significant digits, locale-independent."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{float(value):.9g}"


def _write_csv(path: str | None, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_frontier_csv(path: str) -> list[dict[str, str]]:
    """Bundled reader for the CSV emitted here (round-trip checks, plotting)."""
    import csv as _csv

    with open(path, "r", encoding="utf-8", newline="") as fh:
        return [dict(row) for row in _csv.DictReader(fh)]


def _require_gaussian(scenario: Scenario, command: str, model: str | None = None) -> None:
    if scenario.model == "DMC":
        raise UsageError(f"{command} needs a Gaussian scenario (model B or C)")
    if model is not None and scenario.model != model:
        raise UsageError(f"{command} needs a model {model} scenario, got {scenario.model}")


def _cmd_curve(args) -> int:
    scenario = load_scenario(args.scenario)
    _require_gaussian(scenario, "curve")
    grid = scenario.grid
    q = grid.q_values[0] if grid.q_values else None
    header = ["alpha"]
    curves = []
    for label in scenario.strategies:
        strategy = resolve_strategy(label, scenario.model)
        curves.append(
            max_r1_vs_alpha(
                strategy.strategy_id,
                scenario.net,
                grid.alpha_steps,
                grid.beta_steps,
                q=q if strategy.uses_q else None,
                rstar_policy=grid.rstar_policy,
                rstar_steps=grid.rstar_steps,
            )
        )
        header.append(f"{strategy.label}_r1")
    rows = []
    for i, sample in enumerate(curves[0].samples):
        rows.append([sample.alpha] + [c.samples[i].value for c in curves])
    _write_csv(args.out or scenario.output, header, rows)
    return EXIT_OK


def _cmd_region(args) -> int:
    scenario = load_scenario(args.scenario)
    _require_gaussian(scenario, "region", model="C")
    header = ["strategy", "r0", "r1", "alpha", "q", "rstar", "branch"]
    rows = []
    for label in scenario.strategies:
        strategy = resolve_strategy(label, "C")
        frontier = region_boundary(strategy.strategy_id, scenario.net, scenario.grid)
        points = frontier.points
        if args.convex_hull:
            hull = convex_hull_filter([p.rates for p in points])
            kept = {(r.first, r.second) for r in hull}
            points = tuple(p for p in points if (p.rates.first, p.rates.second) in kept)
        for p in points:
            rows.append(
                [
                    strategy.label,
                    p.rates.first,
                    p.rates.second,
                    p.params.alpha,
                    p.params.q,
                    p.params.rstar,
                    ";".join(p.rates.active),
                ]
            )
    _write_csv(args.out or scenario.output, header, rows)
    return EXIT_OK


def _cmd_gaussian(args) -> int:
    net = GaussianNetwork(p1=args.p1, p2=args.p2, n1=args.n1, n2=args.n2, nr=args.nr)
    strategy = resolve_strategy(args.strategy, args.model)
    rstar = args.rstar
    if strategy.uses_q and args.q is not None and rstar is None:
        from .gaussian import cf_rstar_max

        rstar = max(0.0, cf_rstar_max(net, args.q))
    sp = StrategyParams(alpha=args.alpha, beta=args.beta, q=args.q, rstar=rstar)
    pair = evaluate_strategy(strategy.strategy_id, net, sp)
    first_name, second_name = ("r1", "r2") if strategy.config == "B" else ("r0", "r1")
    _write_csv(
        args.out,
        ["model", "strategy", "alpha", "beta", "q", "rstar", first_name, second_name, "branch"],
        [
            [
                strategy.config,
                strategy.label,
                sp.alpha,
                sp.beta,
                sp.q,
                sp.rstar,
                pair.first,
                pair.second,
                ";".join(pair.active),
            ]
        ],
    )
    return EXIT_OK


def _parse_rates_flag(text: str) -> RateTuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise UsageError("--rates expects r0,r1,r2,re1,re2")
    return RateTuple(*(float(p) for p in parts))


def _cmd_dmc_eval(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.model != "DMC":
        raise UsageError("dmc-eval needs a DMC scenario")
    if scenario.coupling is None:
        raise UsageError("dmc-eval: the scenario does not reference a coupling")
    rates = _parse_rates_flag(args.rates) if args.rates else scenario.rates
    evaluation = evaluate_membership(
        scenario.theorem,
        scenario.dmc_model,
        scenario.coupling,
        rates,
        tol=args.tol if args.tol is not None else scenario.tol,
        rstar=args.rstar,
        clamp_equivocation=args.clamp_equivocation,
    )
    header = ["kind", "branch", "name", "value", "bound", "slack", "satisfied"]
    rows = []
    for branch in evaluation.branches:
        for cond in branch.state.conditions:
            rows.append(
                [
                    "condition",
                    branch.state.branch_id,
                    cond.name,
                    cond.lhs,
                    cond.rhs,
                    cond.lhs - cond.rhs,
                    str(cond.satisfied).lower(),
                ]
            )
        for rec in branch.inequalities:
            rows.append(
                [
                    "inequality",
                    branch.state.branch_id,
                    rec.name,
                    rec.expression,
                    rec.bound,
                    rec.slack,
                    str(rec.satisfied).lower(),
                ]
            )
    rows.append(
        [
            "summary",
            evaluation.branch_taken,
            "member",
            1.0 if evaluation.member else 0.0,
            "",
            "",
            str(evaluation.member).lower(),
        ]
    )
    _write_csv(args.out or scenario.output, header, rows)
    return EXIT_OK


def _parse_aux_sizes(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        name, _, size = piece.partition("=")
        if not size:
            raise UsageError("--aux-sizes expects NAME=SIZE pairs, e.g. U=1,V1=2,V2=1")
        out[name.strip()] = int(size)
    return out


def _cmd_dmc_search(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.model != "DMC":
        raise UsageError("dmc-search needs a DMC scenario")
    objective = tuple(float(p) for p in args.objective.split(","))
    if len(objective) != 3:
        raise UsageError("--objective expects three comma-separated weights over R0,R1,R2")
    result = brute_force_best(
        scenario.dmc_model,
        _parse_aux_sizes(args.aux_sizes),
        args.grid_steps,
        scenario.theorem,
        objective,
        budget=args.budget,
        clamp_equivocation=args.clamp_equivocation,
    )
    best = result.best
    _write_csv(
        args.out or scenario.output,
        [
            "theorem",
            "branch",
            "objective_value",
            "r0",
            "r1",
            "r2",
            "couplings_scanned",
        ],
        [
            [
                scenario.theorem,
                best.branch_id,
                best.objective_value,
                best.rates.r0,
                best.rates.r1,
                best.rates.r2,
                float(result.couplings_scanned),
            ]
        ],
    )
    if args.best_coupling_out:
        with open(args.best_coupling_out, "w", encoding="utf-8") as fh:
            fh.write(result.coupling.to_json())
    return EXIT_OK


def _cmd_selftest(args) -> int:
    results = acceptance.run_all()
    header = ["criterion", "description", "status", "seconds", "detail"]
    rows = [
        [r.cid, r.description, "pass" if r.passed else "FAIL", r.seconds, r.detail]
        for r in results
    ]
    _write_csv(args.out, header, rows)
    failed = [r for r in results if not r.passed]
    if failed:
        sys.stderr.write(f"{len(failed)} acceptance criterion(s) failed\n")
        return EXIT_SELFTEST
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="relaysec",
        description="Secrecy rate regions for relay broadcast channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="R1-vs-alpha curves per strategy (CSV)")
    p.add_argument("--scenario", required=True, help="Gaussian scenario JSON")
    p.add_argument("--out", help="output CSV path (default: scenario output or stdout)")
    p.set_defaults(fn=_cmd_curve)

    p = sub.add_parser("region", help="Pareto staircase frontiers per strategy (CSV)")
    p.add_argument("--scenario", required=True, help="model-C scenario JSON")
    p.add_argument("--out", help="output CSV path")
    p.add_argument(
        "--convex-hull",
        action="store_true",
        help="post-process frontiers with the upper concave envelope (time sharing)",
    )
    p.set_defaults(fn=_cmd_region)

    p = sub.add_parser("gaussian", help="single-point Gaussian strategy evaluation")
    p.add_argument("--model", required=True, choices=("B", "C"))
    p.add_argument("--strategy", required=True, help="df | nf | cf | baseline")
    for flag in ("p1", "p2", "n1", "n2", "nr"):
        p.add_argument(f"--{flag}", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--q", type=float, help="compression noise variance (cf only)")
    p.add_argument("--rstar", type=float, help="pure-noise rate (cf only; default: max)")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(fn=_cmd_gaussian)

    p = sub.add_parser("dmc-eval", help="membership of a rate point in one bound")
    p.add_argument("--scenario", required=True, help="DMC scenario JSON")
    p.add_argument("--rates", help="override: r0,r1,r2,re1,re2")
    p.add_argument("--rstar", type=float, help="pure-noise rate for compress-forward bounds")
    p.add_argument("--tol", type=float, help="membership slack tolerance (bits)")
    p.add_argument(
        "--clamp-equivocation",
        action="store_true",
        help="floor each equivocation cap at 0 (zero equivocation is always achievable)",
    )
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(fn=_cmd_dmc_eval)

    p = sub.add_parser("dmc-search", help="brute-force search over admissible couplings")
    p.add_argument("--scenario", required=True, help="DMC scenario JSON (model + theorem)")
    p.add_argument("--aux-sizes", required=True, help="e.g. U=1,V1=2,V2=1 (and Yh=2 for CF)")
    p.add_argument("--grid-steps", type=int, required=True, help="simplex grid resolution")
    p.add_argument("--objective", default="0,1,0", help="weights over R0,R1,R2")
    p.add_argument("--budget", type=int, default=10_000_000, help="max couplings to evaluate")
    p.add_argument("--clamp-equivocation", action="store_true")
    p.add_argument("--best-coupling-out", help="write the winning coupling JSON here")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(fn=_cmd_dmc_search)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(fn=_cmd_selftest)

    return parser


def run_command(argv: Sequence[str] | None = None) -> int:
    """Dispatch argv and map errors onto the documented exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible configuration: {exc}\n")
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID


def main(argv: Sequence[str] | None = None) -> int:
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
