"""Command-line interface: ``bhrvt [global options] <command> [command options]``.

Commands write CSV to ``--out`` (standard output by default), except
``validate`` which prints a pass/fail report and exits 1 if any check fails.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import csvio, rvt, stats
from .dist import PRESETS, from_config, load_config, preset
from .mc import DEFAULT_SEED, McConfig, empirical_pdf, simulate_paths, steady_samples
from .quad import ConvergenceError, QuadratureConfig
from .validate import format_report, run_validation

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bhrvt",
        description="Densities and moments of the Beverton-Holt model with random inputs.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS),
                     help="built-in input distribution (default example1)")
    src.add_argument("--config", type=Path, help="JSON file describing the input distribution")
    p.add_argument("--out", type=Path, help="output CSV path (default: standard output)")
    p.add_argument("--rel-tol", type=float, default=QuadratureConfig.rel_tol)
    p.add_argument("--abs-tol", type=float, default=QuadratureConfig.abs_tol)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=McConfig.n_samples,
                   help="Monte Carlo sample size (mc, validate, automatic grids)")
    sub = p.add_subparsers(dest="command", required=True)

    def grid_args(sp):
        sp.add_argument("--x-min", type=float)
        sp.add_argument("--x-max", type=float)
        sp.add_argument("--points", type=int, default=rvt.AUTO_GRID_POINTS)

    sp = sub.add_parser("pdf1", help="1-PDF of X_n on a grid")
    sp.add_argument("--n", type=int, required=True)
    grid_args(sp)
    sp = sub.add_parser("pdf2", help="2-PDF of (X_n1, X_n2) on a grid")
    sp.add_argument("--n1", type=int, required=True)
    sp.add_argument("--n2", type=int, required=True)
    grid_args(sp)
    sp = sub.add_parser("steady", help="density of the steady state on a grid")
    grid_args(sp)
    sp = sub.add_parser("moments", help="mean and standard deviation for n = 0..n-max")
    sp.add_argument("--n-max", type=int, required=True)
    sp = sub.add_parser("cov", help="correlation and covariance over [0, n-max]^2")
    sp.add_argument("--n-max", type=int, required=True)
    sp = sub.add_parser("mc", help="Monte Carlo histograms for n = 0..n-max and the steady state")
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--bins", type=int, default=McConfig.n_bins)
    sub.add_parser("validate", help="Monte Carlo cross-check report")
    return p


def _distribution(args):
    if args.config is not None:
        return from_config(load_config(args.config))
    return preset(args.preset or "example1")


def _grid(args, d, n, mc):
    if args.x_min is None and args.x_max is None:
        return rvt.auto_grid(d, n, args.points, mc)
    auto = (None, None)
    if args.x_min is None or args.x_max is None:
        auto = rvt.auto_grid(d, n, 2, mc)
    lo = args.x_min if args.x_min is not None else auto[0]
    hi = args.x_max if args.x_max is not None else auto[1]
    if not hi > lo:
        raise ValueError("--x-max must exceed --x-min")
    return np.linspace(lo, hi, args.points)


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _meta(args, d, cfg, **extra):
    return {"preset": getattr(d, "name", d.kind), **extra,
            "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol}


def _run(args) -> int:
    d = _distribution(args)
    cfg = QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    grid_mc = McConfig(n_samples=min(args.samples, rvt.AUTO_GRID_SAMPLES), seed=args.seed)
    mc = McConfig(n_samples=args.samples, seed=args.seed, n_bins=getattr(args, "bins", 100))
    cmd = args.command

    if cmd == "validate":
        checks = run_validation(d, cfg, mc)
        print(format_report(checks, f"validation of {getattr(d, 'name', d.kind)} "
                                    f"({mc.n_samples} samples, seed {mc.seed})"))
        return 0 if all(c.passed for c in checks) else 1

    if cmd == "pdf1":
        curve = rvt.pdf1_curve(args.n, d, _grid(args, d, args.n, grid_mc), cfg)
        cols, rows = csvio.curve_rows(curve)
        meta = _meta(args, d, cfg, command="pdf1", n=args.n, mass=curve.mass)
    elif cmd == "steady":
        curve = rvt.pdf_steady_curve(d, _grid(args, d, rvt.STEADY, grid_mc), cfg)
        cols, rows = csvio.curve_rows(curve)
        meta = _meta(args, d, cfg, command="steady", n=rvt.STEADY, mass=curve.mass)
    elif cmd == "pdf2":
        if args.n1 == args.n2:
            print(f"error: pdf2 needs n1 != n2 (got {args.n1} twice); the joint density of a "
                  f"single period is degenerate, use 'pdf1 --n {args.n1}' instead",
                  file=sys.stderr)
            return 2
        x1 = _grid(args, d, args.n1, grid_mc)
        x2 = _grid(args, d, args.n2, grid_mc)
        surf = rvt.pdf2_surface(args.n1, args.n2, d, x1, x2, cfg)
        cols, rows = csvio.surface_rows(surf)
        meta = _meta(args, d, cfg, command="pdf2", n1=args.n1, n2=args.n2, mass=surf.mass)
    elif cmd == "moments":
        series = stats.moment_series(args.n_max, d, cfg)
        cols, rows = csvio.moment_rows(series)
        meta = _meta(args, d, cfg, command="moments", n_max=args.n_max)
    elif cmd == "cov":
        surf = stats.covariance_surface(range(args.n_max + 1), d, cfg)
        cols, rows = csvio.covariance_rows(surf)
        meta = _meta(args, d, cfg, command="cov", n_max=args.n_max)
    elif cmd == "mc":
        ens = simulate_paths(d, args.n_max, mc)
        hists = {int(n): empirical_pdf(ens.at(n), mc.n_bins) for n in ens.periods}
        hists[rvt.STEADY] = empirical_pdf(steady_samples(d, mc), mc.n_bins)
        cols, rows = csvio.histogram_rows(hists)
        meta = {"preset": getattr(d, "name", d.kind), "command": "mc", "n_max": args.n_max,
                "samples": mc.n_samples, "seed": mc.seed, "bins": mc.n_bins}
    else:  # pragma: no cover - argparse rejects unknown commands
        raise AssertionError(cmd)

    with _output(args.out) as fh:
        csvio.write_table(fh, cols, rows, meta)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (ValueError, KeyError, OSError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
