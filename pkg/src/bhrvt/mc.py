"""Monte Carlo oracle for the randomised Beverton-Holt recurrence.

Inputs are drawn in fixed-size blocks, block ``i`` using the ``i``-th child
of ``SeedSequence(seed)``.  The ensemble therefore depends only on
``(seed, n_samples, block_size)``, never on how many workers drew it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dist import JointDensity
from .model import iterate_map, solution_closed_form, steady_state_value

__all__ = [
    "McConfig",
    "Ensemble",
    "EmpiricalDensity",
    "McMoments",
    "sample_inputs",
    "simulate_paths",
    "closed_form_discrepancy",
    "steady_samples",
    "empirical_pdf",
    "empirical_steady",
    "mc_moments",
    "mc_correlation",
    "quantile_range",
]

DEFAULT_SEED = 20190417


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 10**6
    seed: int = DEFAULT_SEED
    n_bins: int = 100
    block_size: int = 2**16
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1 or self.n_bins < 1 or self.block_size < 1:
            raise ValueError("n_samples, n_bins and block_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def sample_inputs(d: JointDensity, cfg: McConfig = McConfig()) -> np.ndarray:
    """``(n_samples, 3)`` draws of (c, a, b)."""
    sizes = [cfg.block_size] * (cfg.n_samples // cfg.block_size)
    if cfg.n_samples % cfg.block_size:
        sizes.append(cfg.n_samples % cfg.block_size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def block(i):
        return d.sample(sizes[i], np.random.default_rng(seeds[i]))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(block, range(len(sizes))))
    else:
        parts = [block(i) for i in range(len(sizes))]
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class Ensemble:
    """Sampled inputs and the trajectory values at ``periods``."""

    params: np.ndarray
    periods: np.ndarray
    paths: np.ndarray

    def at(self, n: int) -> np.ndarray:
        idx = np.flatnonzero(self.periods == n)
        if idx.size == 0:
            raise KeyError(f"period {n} was not stored")
        return self.paths[:, idx[0]]


def simulate_paths(d: JointDensity, n_max: int, cfg: McConfig = McConfig(),
                   periods=None) -> Ensemble:
    """Iterate the recurrence from sampled inputs up to ``n_max``.

    ``periods`` restricts which columns are kept (all of ``0..n_max`` by
    default); memory is ``n_samples * len(periods)`` floats.
    """
    keep = np.arange(n_max + 1) if periods is None else np.unique(np.asarray(periods, int))
    if keep.size and (keep.min() < 0 or keep.max() > n_max):
        raise ValueError("periods must lie in [0, n_max]")
    params = sample_inputs(d, cfg)
    c, a, b = params.T
    paths = np.empty((params.shape[0], keep.size))
    x = c.copy()
    col = 0
    for n in range(n_max + 1):
        if n > 0:
            x = iterate_map(x, a, b, 1)
        if col < keep.size and keep[col] == n:
            paths[:, col] = x
            col += 1
    return Ensemble(params, keep, paths)


def closed_form_discrepancy(ens: Ensemble) -> float:
    """Largest relative gap between iterated and closed-form trajectories."""
    c, a, b = ens.params.T
    worst = 0.0
    for j, n in enumerate(ens.periods):
        exact = solution_closed_form(c, a, b, int(n))
        worst = max(worst, float(np.max(np.abs(ens.paths[:, j] - exact) / np.abs(exact))))
    return worst


def steady_samples(d: JointDensity, cfg: McConfig = McConfig()) -> np.ndarray:
    _, a, b = sample_inputs(d, cfg).T
    return steady_state_value(a, b)


@dataclass(frozen=True)
class EmpiricalDensity:
    """Normalised histogram; ``heights @ widths == 1``."""

    bin_edges: np.ndarray
    heights: np.ndarray
    standard_errors: np.ndarray
    n_samples: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def probabilities(self) -> np.ndarray:
        return self.heights * self.widths


def empirical_pdf(values, n_bins: int = 100, range=None) -> EmpiricalDensity:
    """Histogram density estimate with per-bin standard errors
    ``sqrt(p (1-p) / N) / width``."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("empty sample")
    counts, edges = np.histogram(values, bins=n_bins, range=range)
    n = values.size
    widths = np.diff(edges)
    p = counts / n
    heights = p / widths
    se = np.sqrt(p * (1.0 - p) / n) / widths
    return EmpiricalDensity(edges, heights, se, n)


def empirical_steady(d: JointDensity, cfg: McConfig = McConfig(), range=None) -> EmpiricalDensity:
    return empirical_pdf(steady_samples(d, cfg), cfg.n_bins, range)


@dataclass(frozen=True)
class McMoments:
    mean: np.ndarray
    std: np.ndarray
    se_mean: np.ndarray
    se_std: np.ndarray


def mc_moments(values) -> McMoments:
    """Sample mean and standard deviation along axis 0, with standard errors.

    The standard error of the standard deviation uses the delta method,
    ``sqrt((m4 - s^4) / N) / (2 s)``.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty sample")
    n = v.shape[0]
    mean = v.mean(axis=0)
    dev = v - mean
    var = np.mean(dev ** 2, axis=0)
    std = np.sqrt(var)
    m4 = np.mean(dev ** 4, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        se_std = np.where(std > 0, np.sqrt(np.maximum(m4 - var ** 2, 0.0) / n) / (2 * std), 0.0)
    return McMoments(mean, std, std / math.sqrt(n), se_std)


def mc_correlation(x1, x2) -> tuple[float, float]:
    """Estimate of ``E[X1 X2]`` and its standard error."""
    prod = np.asarray(x1, float) * np.asarray(x2, float)
    return float(prod.mean()), float(prod.std() / math.sqrt(prod.size))


def quantile_range(values, lo_q: float = 0.0005, hi_q: float = 0.9995,
                   pad: float = 0.1) -> tuple[float, float]:
    """Empirical quantile interval widened by ``pad`` times its length."""
    lo, hi = np.quantile(np.asarray(values, float), [lo_q, hi_q])
    width = hi - lo
    if width <= 0:
        width = max(abs(lo), 1.0) * 1e-3
    return float(lo - pad * width), float(hi + pad * width)
