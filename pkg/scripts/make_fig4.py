#!/usr/bin/env python3
"""Reproduce the worked R1-vs-alpha experiment as CSV plot data.

Sweeps the decode-forward, noise-forward, and compress-forward strategies for
the two-confidential-message Gaussian network (P1, P2, N1, N2, Nr) =
(5, 3, 2, 8, 2) with compression variance q = 300, maximizing R1 over the
common-layer power split per alpha.  Columns: alpha, df_r1, nf_r1, cf_r1.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from relaysec.cli import main as cli_main

SCENARIO = os.path.join(os.path.dirname(__file__), os.pardir, "scenarios", "paper_fig4.json")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fig4.csv", help="output CSV path")
    parser.add_argument("--scenario", default=SCENARIO, help="scenario JSON to run")
    args = parser.parse_args()
    return cli_main(["curve", "--scenario", args.scenario, "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
