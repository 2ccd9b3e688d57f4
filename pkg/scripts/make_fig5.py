#!/usr/bin/env python3
"""Reproduce the worked (R0, R1) region boundaries as CSV plot data.

Sweeps the no-relay baseline and the decode-forward, noise-forward, and
compress-forward strategies for the common + confidential message Gaussian
network (P1, P2, N1, N2, Nr) = (5, 3, 2, 8, 2) with q = 300, emitting each
strategy's Pareto staircase with full parameter provenance.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from relaysec.cli import main as cli_main

SCENARIO = os.path.join(os.path.dirname(__file__), os.pardir, "scenarios", "paper_fig5.json")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fig5.csv", help="output CSV path")
    parser.add_argument("--scenario", default=SCENARIO, help="scenario JSON to run")
    parser.add_argument(
        "--convex-hull",
        action="store_true",
        help="apply the time-sharing (upper concave envelope) closure",
    )
    args = parser.parse_args()
    argv = ["region", "--scenario", args.scenario, "--out", args.out]
    if args.convex_hull:
        argv.append("--convex-hull")
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
