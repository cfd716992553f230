#!/usr/bin/env python3
"""Lower-semicontinuity stress tests: tentacle arms and the runaway slab.

Writes report.json, series.csv and per-frame SVGs for each run under the
output directory (one subdirectory per scenario/parameter choice).
"""

import argparse
from fractions import Fraction
from pathlib import Path

from perivar.experiments import run_runaway_slab, run_tentacle


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results/mass-at-infinity"))
    parser.add_argument(
        "--weights", nargs="+", default=["3/2", "2", "9/4", "5/2"],
        help="line weights for the tentacle runs",
    )
    parser.add_argument("--lengths", nargs="+", type=int, default=[1, 2, 4, 8, 16])
    parser.add_argument("--slab-width", type=int, default=3)
    args = parser.parse_args()

    for raw in args.weights:
        w = Fraction(raw)
        outdir = args.out / f"tentacle-w-{w.numerator}-{w.denominator}"
        report = run_tentacle(w, args.lengths, outdir=outdir)
        print(f"tentacle w={raw}:")
        for key, verdict in sorted(report.verdicts.items()):
            print(f"  {key}: {verdict}")

    outdir = args.out / f"runaway-slab-L{args.slab_width}"
    report = run_runaway_slab(args.slab_width, shifts=list(range(6)), outdir=outdir)
    print(f"runaway slab L={args.slab_width}:")
    for key, verdict in sorted(report.verdicts.items()):
        print(f"  {key}: {verdict}")
    print(f"artifacts under {args.out}")


if __name__ == "__main__":
    main()
