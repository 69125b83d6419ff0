"""T_AKR(eps)/T_AKR(0) for a synthetic spectrum with Lambda_2 = ln N, at eps = c ln N / sqrt N.

The ratio is set mainly by c and creeps up only slowly with N.
"""
import argparse
import math

from rqss.gqsa import GqsaSpectrum, sensitivity_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, nargs="+", default=[1, 5, 10, 20, 40])
    ap.add_argument("--N", type=float, nargs="+", default=[1e4, 9**5, 1e6, 1e8, 1e12])
    args = ap.parse_args()

    print("N".rjust(10) + "".join(f"c={c:g}".rjust(10) for c in args.c))
    for N in args.N:
        sp = GqsaSpectrum.synthetic(N, math.log(N))
        grid = [0.0] + [c * math.log(N) / math.sqrt(N) for c in args.c]
        rows = sensitivity_sweep(sp, grid, N)
        base = rows[0]["T_AKR"]
        print(f"{N:10.3g}" + "".join(f"{r['T_AKR'] / base:10.3f}" for r in rows[1:]))


if __name__ == "__main__":
    main()
