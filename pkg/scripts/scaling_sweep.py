"""Wall-clock sweep of the FFT path against the dense references, written as CSV."""

import argparse
import sys

from circulant_attention.bench import IMPLS, wallclock_sweep, write_csv
from circulant_attention.spectral import GridShape


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", default="8x8,16x16,32x32,64x64")
    ap.add_argument("--impls", default=",".join(IMPLS))
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    grids = [GridShape.parse(g) for g in args.grids.split(",")]
    rows = []
    for impl in args.impls.split(","):
        rows += wallclock_sweep(impl, grids, args.dim, 1, args.reps, args.seed)
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)

    # growth of mean time per 4x increase in N, per impl
    for impl in dict.fromkeys(r[0] for r in rows):
        times = [r[7] for r in rows if r[0] == impl]
        growth = " ".join(f"{b / a:.2f}" for a, b in zip(times, times[1:]))
        print(f"# {impl}: growth per step {growth}", file=sys.stderr)


if __name__ == "__main__":
    main()
