"""Exact step counts of the recursive search next to sqrt(N) ln N and sqrt(N) ln^3 N."""
import argparse

from rqss.analytic import cost_formula, total_complexity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=12)
    args = ap.parse_args()
    print(f"{'n':>3} {'T[U_n-1]':>12} {'j':>4} {'total':>14} {'/sqrtN lnN':>11} {'/sqrtN ln3N':>12}")
    for n in range(1, args.max_n + 1):
        c = total_complexity(n)
        print(f"{n:>3} {cost_formula(n - 1):>12} {c.iterations:>4} {c.total:>14} "
              f"{c.total / c.sqrtN_lnN:11.4f} {c.total / c.sqrtN_ln3N:12.6f}")


if __name__ == "__main__":
    main()
