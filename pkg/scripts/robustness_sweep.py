"""Success probability and omega_n of the recursive search against Delta = |eps| = |delta|.

Writes a results CSV plus an SVG with one curve per n, and prints the
distance of each point above the analytic lower bound.
"""
import argparse
import math

import numpy as np

from rqss.analytic import omega_lower_bound
from rqss.experiment import ExperimentConfig, SweepAxis, run_experiment
from rqss.report import render_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--scale", type=float, default=3.0, help="Delta range as a multiple of 0.1/sqrt(n_max)")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("-o", "--output", default="robustness.csv")
    ap.add_argument("--svg", default="robustness.svg")
    args = ap.parse_args()

    top = args.scale * 0.1 / math.sqrt(max(args.n))
    deltas = [float(v) for v in np.linspace(0, top, args.points)]
    cfg = ExperimentConfig("recursive", sweep=[SweepAxis("n", args.n), SweepAxis("Delta", deltas)],
                           workers=args.workers)
    recs = run_experiment(cfg, args.output)
    with open(args.svg, "w") as fh:
        fh.write(render_svg(recs, "epsilon"))
    print(f"{'n':>2} {'Delta':>8} {'omega_n':>9} {'bound':>9} {'success':>8} {'j':>3}")
    for r in recs:
        print(f"{r['n']:>2} {r['epsilon']:8.4f} {r['omega_n_sim']:9.5f} "
              f"{omega_lower_bound(r['n'], r['epsilon']):9.5f} {r['success_prob']:8.5f} {r['amp_iters']:>3}")


if __name__ == "__main__":
    main()
