"""Joint densities of the random inputs (C, A, B).

Two kinds are supported: independent uniforms on a box, and a trivariate
Gaussian truncated to a box.  Every density exposes the same small surface
used by the rest of the package:

``pdf(c, a, b)``
    vectorised density, exactly zero outside the support box;
``support``
    the box outside which the density vanishes;
``integration_box``
    a (possibly smaller) box carrying all but a negligible fraction of the
    mass, used as the domain of every quadrature;
``sample(size, rng)``
    exact draws as an array of shape ``(size, 3)`` in the order (c, a, b).

Objects are immutable after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Union

import numpy as np
from scipy.linalg import solve_triangular

from .quad import ConvergenceError, QuadratureConfig, integrate_3d

__all__ = [
    "ParamPoint",
    "SupportBox",
    "IndependentUniformJoint",
    "TruncatedGaussianJoint",
    "JointDensity",
    "SamplingError",
    "eval_joint",
    "normalization_constant",
    "normalization_constant_mc",
    "sample",
    "from_config",
    "load_config",
    "preset",
    "PRESETS",
]

# Marginal standard deviations kept around the mean when shrinking a
# truncated Gaussian's box for quadrature; mass outside is below 1e-22.
GAUSSIAN_CLIP_SDS = 10.0


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class ParamPoint:
    """One realisation (c, a, b) of the inputs."""

    c: float
    a: float
    b: float

    def __post_init__(self):
        if not (self.c > 0 and self.a > 1 and self.b > 0):
            raise ValueError(f"need c > 0, a > 1, b > 0; got {self}")

    def as_tuple(self):
        return (self.c, self.a, self.b)


def _interval(iv, name):
    lo, hi = (float(v) for v in iv)
    if not lo < hi:
        raise ValueError(f"{name}: need lo < hi, got [{lo}, {hi}]")
    return (lo, hi)


@dataclass(frozen=True)
class SupportBox:
    c_interval: tuple
    a_interval: tuple
    b_interval: tuple

    def __post_init__(self):
        for name in ("c_interval", "a_interval", "b_interval"):
            object.__setattr__(self, name, _interval(getattr(self, name), name))
        if self.a_interval[0] < 1:
            raise ValueError("a_interval must lie in [1, inf)")
        if self.c_interval[0] < 0 or self.b_interval[0] < 0:
            raise ValueError("c_interval and b_interval must lie in [0, inf)")

    @property
    def intervals(self):
        return (self.c_interval, self.a_interval, self.b_interval)

    @property
    def lows(self) -> np.ndarray:
        return np.array([iv[0] for iv in self.intervals])

    @property
    def highs(self) -> np.ndarray:
        return np.array([iv[1] for iv in self.intervals])

    @property
    def volume(self) -> float:
        return float(np.prod(self.highs - self.lows))

    def contains(self, c, a, b):
        (c0, c1), (a0, a1), (b0, b1) = self.intervals
        c, a, b = np.asarray(c), np.asarray(a), np.asarray(b)
        return (c >= c0) & (c <= c1) & (a >= a0) & (a <= a1) & (b >= b0) & (b <= b1)

    def intersect(self, lows, highs) -> "SupportBox":
        lo = np.maximum(self.lows, lows)
        hi = np.minimum(self.highs, highs)
        return SupportBox(*zip(lo.tolist(), hi.tolist()))

    def to_list(self):
        return [list(iv) for iv in self.intervals]


@dataclass(frozen=True)
class IndependentUniformJoint:
    """C, A and B independent and uniform on their intervals."""

    support: SupportBox
    name: str = "independent_uniform"
    kind = "independent_uniform"

    @property
    def integration_box(self) -> SupportBox:
        return self.support

    @property
    def height(self) -> float:
        return 1.0 / self.support.volume

    def pdf(self, c, a, b):
        inside = self.support.contains(c, a, b)
        return np.where(inside, self.height, 0.0)

    def marginal_c(self, x):
        lo, hi = self.support.c_interval
        x = np.asarray(x, dtype=float)
        return np.where((x >= lo) & (x <= hi), 1.0 / (hi - lo), 0.0)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random((size, 3))
        return self.support.lows + u * (self.support.highs - self.support.lows)

    def to_config(self) -> dict:
        return {"kind": self.kind, "name": self.name,
                "c_interval": list(self.support.c_interval),
                "a_interval": list(self.support.a_interval),
                "b_interval": list(self.support.b_interval)}


def _check_covariance(sigma):
    sigma = np.array(sigma, dtype=float)
    if sigma.shape != (3, 3):
        raise ValueError("sigma must be 3x3")
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-15):
        raise ValueError("sigma must be symmetric")
    minors = [np.linalg.det(sigma[:k, :k]) for k in (1, 2, 3)]
    if min(minors) <= 0:
        raise ValueError("sigma must be positive definite")
    return sigma


def _gaussian_unnormalized(mu, chol, c, a, b):
    v = np.stack(np.broadcast_arrays(c, a, b), axis=-1) - mu
    y = solve_triangular(chol, v.reshape(-1, 3).T, lower=True).T.reshape(v.shape)
    q = np.sum(y * y, axis=-1)
    norm = (2.0 * np.pi) ** 1.5 * np.prod(np.diag(chol))
    return np.exp(-0.5 * q) / norm


def _clip_to_window(mu, sigma, box: SupportBox) -> SupportBox:
    """``box`` intersected with ``mu +- GAUSSIAN_CLIP_SDS`` marginal deviations."""
    sd = np.sqrt(np.diag(sigma))
    try:
        return box.intersect(mu - GAUSSIAN_CLIP_SDS * sd, mu + GAUSSIAN_CLIP_SDS * sd)
    except ValueError:
        raise ValueError("the box carries no Gaussian mass within "
                         f"{GAUSSIAN_CLIP_SDS:g} standard deviations of the mean") from None


def normalization_constant(mu, sigma, box: SupportBox,
                           quad: QuadratureConfig | None = None) -> float:
    """Gaussian mass of ``box``, by nested adaptive quadrature.

    The integral runs over the part of ``box`` within ``GAUSSIAN_CLIP_SDS``
    marginal standard deviations of the mean; the mass outside is below 1e-22.

    Raises
    ------
    ConvergenceError
        If the quadrature does not meet the tolerance of ``quad``.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = _check_covariance(sigma)
    chol = np.linalg.cholesky(sigma)
    box = _clip_to_window(mu, sigma, box)
    res = integrate_3d(lambda c, a, b: _gaussian_unnormalized(mu, chol, c, a, b),
                       box.intervals, quad)
    if not res.converged:
        raise ConvergenceError("normalisation constant", res.error_estimate)
    return res.value


def normalization_constant_mc(mu, sigma, box: SupportBox, n_samples: int = 10**6,
                              seed: int = 0) -> tuple[float, float]:
    """Hit-count estimate of the box mass and its standard error.

    Only meant for cross-checking :func:`normalization_constant`.
    """
    rng = np.random.default_rng(seed)
    draws = rng.multivariate_normal(np.asarray(mu, float), np.asarray(sigma, float),
                                    size=n_samples, method="cholesky")
    p = float(np.mean(box.contains(*draws.T)))
    return p, math.sqrt(p * (1 - p) / n_samples)


@dataclass(frozen=True, eq=False)
class TruncatedGaussianJoint:
    """Trivariate Gaussian (order c, a, b) restricted to ``box`` and renormalised.

    ``z`` is the Gaussian mass of the box.  It is computed by quadrature when
    not supplied.
    """

    mu: np.ndarray
    sigma: np.ndarray
    box: SupportBox
    z: float | None = None
    quad: QuadratureConfig = field(default_factory=lambda: QuadratureConfig(rel_tol=1e-10, abs_tol=1e-13))
    max_rejection_rounds: int = 1000
    name: str = "truncated_gaussian"
    kind = "truncated_gaussian"

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.shape != (3,):
            raise ValueError("mu must have three entries")
        sigma = _check_covariance(self.sigma)
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "_chol", np.linalg.cholesky(sigma))
        if self.z is None:
            object.__setattr__(self, "z", normalization_constant(mu, sigma, self.box, self.quad))
        elif not self.z > 0:
            raise ValueError("z must be positive")

    @property
    def support(self) -> SupportBox:
        return self.box

    @property
    def integration_box(self) -> SupportBox:
        return _clip_to_window(self.mu, self.sigma, self.box)

    def pdf(self, c, a, b):
        inside = self.box.contains(c, a, b)
        val = _gaussian_unnormalized(self.mu, self._chol, c, a, b) / self.z
        return np.where(inside, val, 0.0)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty((size, 3))
        filled = 0
        for _ in range(self.max_rejection_rounds):
            need = size - filled
            if need == 0:
                break
            # oversample by the expected rejection rate
            k = int(need / max(self.z, 1e-3) * 1.02) + 16
            draws = self.mu + rng.standard_normal((k, 3)) @ self._chol.T
            draws = draws[self.box.contains(*draws.T)][:need]
            out[filled:filled + len(draws)] = draws
            filled += len(draws)
        if filled < size:
            raise SamplingError(
                f"rejection sampler filled {filled}/{size} draws in "
                f"{self.max_rejection_rounds} rounds")
        return out

    def to_config(self) -> dict:
        return {"kind": self.kind, "name": self.name, "mu": self.mu.tolist(),
                "sigma": self.sigma.tolist(), "box": self.box.to_list()}


JointDensity = Union[IndependentUniformJoint, TruncatedGaussianJoint]


def eval_joint(d: JointDensity, p, allow_outside: bool = True) -> float:
    """Density of ``d`` at the triple ``p = (c, a, b)``.

    With ``allow_outside=False`` a point outside the support raises instead of
    returning 0.
    """
    c, a, b = (p.as_tuple() if isinstance(p, ParamPoint) else p)
    if not allow_outside and not bool(d.support.contains(c, a, b)):
        raise ValueError(f"point {(c, a, b)} lies outside the support")
    return float(d.pdf(c, a, b))


def sample(d: JointDensity, rng: np.random.Generator) -> ParamPoint:
    c, a, b = d.sample(1, rng)[0]
    return ParamPoint(float(c), float(a), float(b))


def from_config(cfg: Mapping) -> JointDensity:
    """Build a density from a mapping (see README for the schema)."""
    kind = cfg.get("kind")
    name = cfg.get("name", kind)
    if kind == "independent_uniform":
        box = SupportBox(cfg["c_interval"], cfg["a_interval"], cfg["b_interval"])
        return IndependentUniformJoint(box, name=name)
    if kind == "truncated_gaussian":
        box = SupportBox(*cfg["box"])
        sigma = np.asarray(cfg["sigma"], dtype=float).reshape(3, 3)
        return TruncatedGaussianJoint(np.asarray(cfg["mu"], float), sigma, box, name=name)
    raise ValueError(f"unknown distribution kind {kind!r}")


def load_config(path) -> dict:
    return json.loads(Path(path).read_text())


PRESETS = {
    "example1": {
        "kind": "independent_uniform",
        "name": "example1",
        "c_interval": [0.0, 1.0],
        "a_interval": [1.1, 2.0],
        "b_interval": [0.1, 1.0],
    },
    "example2": {
        "kind": "truncated_gaussian",
        "name": "example2",
        "mu": [0.5, 1.5, 0.5],
        "sigma": [[1 / 500, 0.1 / 500, 0.2 / 500],
                  [0.1 / 500, 0.9 / 500, 0.3 / 500],
                  [0.2 / 500, 0.3 / 500, 0.8 / 500]],
        "box": [[0.0, 1.0], [1.1, 2.0], [0.0, 1.0]],
    },
}

_preset_cache: dict[str, JointDensity] = {}


def preset(name: str) -> JointDensity:
    """The two named input distributions, built once and cached."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    if name not in _preset_cache:
        _preset_cache[name] = from_config(PRESETS[name])
    return _preset_cache[name]
