#!/usr/bin/env python3
"""Covering cost of k collinear faces: exact values and the 2k+2 law."""

import argparse
from pathlib import Path

from perivar.experiments import run_capacity_scaling


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results/capacity-scaling"))
    parser.add_argument("--k-max", type=int, default=12)
    args = parser.parse_args()

    report = run_capacity_scaling(list(range(1, args.k_max + 1)), outdir=args.out)
    print("k  capacity  ratio to 2k")
    for row in report.row_dicts():
        print(f"{row['k']:>2}  {str(row['capacity']):>8}  {row['ratio']}")
    for key, verdict in sorted(report.verdicts.items()):
        print(f"{key}: {verdict}")


if __name__ == "__main__":
    main()
