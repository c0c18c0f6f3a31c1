"""Largest |a_F(n)|/d_4(n) and |lambda(n)|/d_5(n) over seeded synthetic spinor data."""

import argparse

import numpy as np

from lsign import arith, oscillate, siegel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=10**5)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--symplectic", action="store_true")
    args = ap.parse_args()

    d4 = arith.divisor_function(4, args.N).to_float()
    d5 = arith.divisor_function(5, args.N).to_float()
    prof = oscillate.siegel_spinor()
    x_max = args.N - int(np.ceil(args.N**prof.r)) - 1
    print(f"{'seed':>4} {'max aF/d4':>10} {'max lam/d5':>11} {'windows hit':>12} {'x0':>7}")
    for seed in range(args.seeds):
        aF = siegel.spinor_series(siegel.synth_triples(args.N, seed, args.symplectic), args.N)
        lam = siegel.normalized_eigenvalues(aF)
        rep = oscillate.scan_windows(lam, prof, 1, x_max)
        print(f"{seed:>4} {np.max(np.abs(aF.values) / d4):>10.4f} {np.max(np.abs(lam.values) / d5):>11.4f} "
              f"{rep.fraction_with_change:>12.3f} {str(rep.x0):>7}")


if __name__ == "__main__":
    main()
