"""Sweep the window exponent r and report where short windows stop changing sign."""

import argparse

import numpy as np

from lsign import gl2, oscillate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=10**5)
    ap.add_argument("--r", type=float, nargs="+", default=[0.2, 0.3, 0.4, 0.5, 0.61, 0.7, 0.8])
    ap.add_argument("--ratio", type=float, default=1.05)
    args = ap.parse_args()

    f = gl2.delta_q_expansion(args.N)
    seq = f.series()
    base = oscillate.gl2_selfdual()
    print(f"{'r':>5} {'valid':>6} {'windows':>8} {'with change':>12} {'x0':>8} {'cumulative exp':>15}")
    for r in args.r:
        prof = base.with_r(r)
        x_max = args.N - int(np.ceil(args.N**r)) - 1
        rep = oscillate.scan_windows(seq, prof, 1, x_max, args.ratio, require_valid=False)
        print(f"{r:>5.2f} {str(prof.valid):>6} {len(rep.windows):>8} {rep.fraction_with_change:>12.3f} "
              f"{str(rep.x0):>8} {rep.cumulative_exponent:>15.4f}")


if __name__ == "__main__":
    main()
