#!/usr/bin/env python3
"""Threshold phenomena: obstacle problems, pseudoconvex boxes, 1D clusters."""

import argparse
from fractions import Fraction
from pathlib import Path

from perivar.experiments import (
    run_convex_threshold,
    run_interval_clusters,
    run_pseudoconvex,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results/thresholds"))
    args = parser.parse_args()

    thetas = [Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2)]
    report = run_convex_threshold(thetas, outdir=args.out / "convex-threshold")
    print("obstacle against theta * (boundary measure of the 2x2 box):")
    for theta in thetas:
        print(f"  theta={theta}: {report.verdicts[str(theta)]}")

    report = run_pseudoconvex([(2, 2), (3, 2), (4, 4)], outdir=args.out / "pseudoconvex")
    for key, verdict in sorted(report.verdicts.items()):
        print(f"pseudoconvex boxes — {key}: {verdict}")

    report = run_interval_clusters([1, 2, 3, 4], outdir=args.out / "interval-clusters")
    for key, verdict in sorted(report.verdicts.items()):
        print(f"1d clusters — {key}: {verdict}")
    print(f"artifacts under {args.out}")


if __name__ == "__main__":
    main()
