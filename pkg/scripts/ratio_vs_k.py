"""Normalization ratio against Schmidt number for geometric spectra.

Writes a CSV with the exact ratio, the large-K prediction and their gap for
a log-spaced K grid; plot ratio vs K to see both statistics converge to 1.

    python scripts/ratio_vs_k.py --n 1 2 5 10 -o ratio_vs_k.csv
"""

import argparse
import sys

import numpy as np

from cobosons.cli import SweepConfig, format_sweep, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 5, 10])
    ap.add_argument("--k-min", type=float, default=1.5)
    ap.add_argument("--k-max", type=float, default=1e4)
    ap.add_argument("--points", type=int, default=60)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    ks = [float(k) for k in np.geomspace(args.k_min, args.k_max, args.points)]
    rows = run_sweep(SweepConfig(N_values=args.n, K_values=ks))
    text = format_sweep(rows, "csv")
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
