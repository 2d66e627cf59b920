"""Cross-checks of the transformed densities and moments against Monte Carlo.

A density passes when the analytic mean density over each histogram bin lies
within ``4 * max(se_mc, se_model)`` of the histogram height in at least 99%
of the bins.  ``se_model`` is the binomial standard error implied by the
analytic bin probability, which keeps nearly empty bins from being judged on
a zero empirical error.  Moments pass when the analytic value lies within 4
Monte Carlo standard errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import JointDensity
from .mc import McConfig, empirical_pdf, mc_moments, simulate_paths, steady_samples
from .quad import QuadratureConfig
from .rvt import STEADY, bin_averages
from .stats import mean_var_at, steady_moments

__all__ = ["Check", "compare_density", "compare_moments", "run_validation", "format_report"]

N_SIGMA = 4.0
MIN_BIN_FRACTION = 0.99
DEFAULT_PERIODS = (1, 5, 20)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def compare_density(values, n, d: JointDensity, n_bins: int = 100,
                    cfg: QuadratureConfig | None = None):
    """Histogram of ``values`` against the analytic density of ``X_n``.

    Returns ``(fraction_of_bins_within_tolerance, worst_z, histogram)``.
    """
    h = empirical_pdf(values, n_bins)
    model, conv = bin_averages(h.bin_edges, n, d, cfg)
    if not np.all(conv):
        raise RuntimeError(f"bin averages did not converge for n={n}")
    p = np.clip(model * h.widths, 0.0, 1.0)
    se_model = np.sqrt(p * (1 - p) / h.n_samples) / h.widths
    se = np.maximum(h.standard_errors, se_model)
    diff = np.abs(h.heights - model)
    within = diff <= N_SIGMA * se
    z = np.where(se > 0, diff / np.where(se > 0, se, 1.0), np.where(diff > 0, np.inf, 0.0))
    return float(within.mean()), float(z.max()), h


def compare_moments(values, mean, var):
    """z-scores of the analytic mean and standard deviation against the sample."""
    m = mc_moments(values)
    z_mean = abs(mean - float(m.mean)) / float(m.se_mean)
    z_std = abs(np.sqrt(var) - float(m.std)) / float(m.se_std)
    return z_mean, z_std, m


def run_validation(d: JointDensity, cfg: QuadratureConfig | None = None,
                   mc: McConfig | None = None, periods=DEFAULT_PERIODS) -> list[Check]:
    """Every density and moment check for ``periods`` and the steady state."""
    cfg = cfg or QuadratureConfig()
    mc = mc or McConfig()
    ens = simulate_paths(d, max(periods), mc, periods=periods)
    samples = {n: ens.at(n) for n in periods}
    samples[STEADY] = steady_samples(d, mc)
    checks = []
    for n, values in samples.items():
        frac, zmax, _ = compare_density(values, n, d, mc.n_bins, cfg)
        checks.append(Check(f"density n={n}", frac >= MIN_BIN_FRACTION,
                            f"{100 * frac:.1f}% of bins within {N_SIGMA:g} se (max z {zmax:.2f})"))
        mean, var = steady_moments(d, cfg) if n == STEADY else mean_var_at(n, d, cfg)
        zm, zs, _ = compare_moments(values, mean, var)
        checks.append(Check(f"moments n={n}", zm <= N_SIGMA and zs <= N_SIGMA,
                            f"z(mean)={zm:.2f} z(std)={zs:.2f}"))
    return checks


def format_report(checks: list[Check], title: str = "") -> str:
    lines = [title] if title else []
    for c in checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<18} {c.detail}")
    n_pass = sum(c.passed for c in checks)
    lines.append(f"{n_pass}/{len(checks)} checks passed")
    return "\n".join(lines)
