"""Command-line entry point: simulate, sweep, gqsa, verify, plot."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiment import ConfigError, load_config, run_experiment, run_gqsa, GQSA_COLUMNS
from .gqsa import GqsaSpectrum
from .lattice import GuardError
from .report import CsvAppender, EmptyReportError, read_csv, render_svg
from .verify import verify

log = logging.getLogger("rqss")


def _simulate(args) -> int:
    cfg = load_config(args.config)
    if cfg.mode != "recursive":
        raise ConfigError(f"$.mode: simulate expects 'recursive', got {cfg.mode!r}")
    if cfg.sweep:
        raise ConfigError("$.sweep: simulate runs a single point; use 'sweep' for sweep axes")
    rec = run_experiment(cfg, args.output or cfg.output)[0]
    json.dump(rec, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _sweep(args) -> int:
    cfg = load_config(args.config)
    out = args.output or cfg.output or "results.csv"
    if cfg.mode == "verify":
        raise ConfigError("$.mode: use the 'verify' subcommand")
    recs = run_experiment(cfg, out)
    log.info("wrote %d rows to %s", len(recs), out)
    if args.svg and cfg.mode == "recursive":
        with open(args.svg, "w") as fh:
            fh.write(render_svg(recs, cfg.sweep[0].name if cfg.sweep else None))
    return 0


def _gqsa(args) -> int:
    cfg = load_config(args.config)
    if cfg.mode != "gqsa":
        raise ConfigError(f"$.mode: gqsa expects 'gqsa', got {cfg.mode!r}")
    spectrum = GqsaSpectrum.from_csv(args.spectrum) if args.spectrum else None
    rows = run_gqsa(cfg, spectrum, args.N)
    with CsvAppender(args.output or cfg.output or sys.stdout, GQSA_COLUMNS) as app:
        for r in rows:
            app.append(r)
    return 0


def _verify(args) -> int:
    results = verify("full" if args.full else "quick")
    failed = [r for r in results if not r.ok]
    if failed:
        print(f"FAILED: {failed[0].name}", file=sys.stderr)
        return 1
    print(f"all {len(results)} checks passed")
    return 0


def _plot(args) -> int:
    recs = read_csv(args.results)
    if not recs:
        raise EmptyReportError(f"{args.results}: no rows")
    with open(args.output, "w") as fh:
        fh.write(render_svg(recs, args.x, args.y))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rqss", description="Recursive quantum spatial search simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one search from a config")
    s.add_argument("config")
    s.add_argument("-o", "--output")
    s.set_defaults(func=_simulate)

    s = sub.add_parser("sweep", help="run the Cartesian product of sweep axes")
    s.add_argument("config")
    s.add_argument("-o", "--output")
    s.add_argument("--svg", help="also write a success_prob chart")
    s.set_defaults(func=_sweep)

    s = sub.add_parser("gqsa", help="general quantum search sensitivity table")
    s.add_argument("config")
    s.add_argument("--spectrum", help="CSV with header theta,weight")
    s.add_argument("--N", type=float, help="database size (default 1/|<s|t>|^2)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=_gqsa)

    s = sub.add_parser("verify", help="run the invariant suite")
    s.add_argument("--full", action="store_true")
    s.set_defaults(func=_verify)

    s = sub.add_parser("plot", help="SVG chart from a results CSV")
    s.add_argument("results")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("-x", help="x column (default: first varying sweep column)")
    s.add_argument("-y", default="success_prob")
    s.set_defaults(func=_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, GuardError, EmptyReportError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
