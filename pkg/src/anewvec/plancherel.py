"""Spherical Whittaker-Plancherel transform on GL(2), trivial central character.

With mu = (it, -it) and W'_t(y) = D2 K_it(2 pi y), the transform pair is

    coeff(t) = int_0^oo f(y) conj(W'_t(y)) dy/y,
    f(y)     = (1/4) int_0^oo W'_t(y) coeff(t) rho(t) / |c(1, mu)|^2 dt,

where rho(t) = |c(1, mu)/c(0, mu)|^2 = t tanh(pi t)/pi, so the weight
rho/|c(1, mu)|^2 equals t sinh(pi t)/pi. This is the classical
Kontorovich-Lebedev inversion rescaled by D2^2 = 8/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gamma_factors import gamma_R
from .numerics import BumpFunction, _bessel_k_unchecked, composite_gl
from .whittaker import D2

INVERSION_CONSTANT = 0.25
SAMPLE_POINTS = 64


def plancherel_density(t, closed_form: bool = False):
    """|Gamma_R(1 + 2it) / Gamma_R(2it)|^2, or the closed form t tanh(pi t)/pi."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise ValueError("density is defined for t >= 0")
    out = np.zeros(ta.shape)
    pos = ta > 0
    if closed_form:
        out[pos] = ta[pos] * np.tanh(math.pi * ta[pos]) / math.pi
    else:
        tp = ta[pos]
        out[pos] = np.abs(gamma_R(1.0 + 2j * tp) / gamma_R(2j * tp)) ** 2
    return out[()] if out.ndim == 0 else out


def inversion_weight(t):
    """rho(t)/|c(1, mu)|^2 = t sinh(pi t)/pi."""
    t = np.asarray(t, dtype=float)
    return t * np.sinh(math.pi * t) / math.pi


@dataclass(frozen=True)
class SpectralGrid:
    t_values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if t.ndim != 1 or t.shape != w.shape or t.size == 0:
            raise ValueError("t_values and weights must be matching 1-d arrays")
        if not np.all(np.isfinite(t)) or np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ValueError("t_values must be finite, positive and strictly increasing")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "t_values", t)
        object.__setattr__(self, "weights", w)

    @classmethod
    def gauss(cls, t_max: float = 40.0, nodes: int = 400, order: int = 16) -> "SpectralGrid":
        """Composite Gauss-Legendre rule on (0, t_max]."""
        if nodes % order:
            raise ValueError("nodes must be a multiple of the panel order")
        t, w = composite_gl(0.0, t_max, nodes // order, order)
        return cls(t, w)

    def refined(self) -> "SpectralGrid":
        return SpectralGrid.gauss(float(self.t_values[-1] + self.t_values[0]), 2 * self.t_values.size)

    def __len__(self):
        return self.t_values.size


def _design(t_values: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix W'_t(y), rows indexed by t."""
    x = 2.0 * math.pi * np.asarray(y, dtype=float)
    out = np.empty((t_values.size, x.size))
    for i, t in enumerate(t_values):
        out[i] = D2 * np.real(_bessel_k_unchecked(1j * t, x))
    return out


def forward_transform(f: BumpFunction, grid: SpectralGrid, nodes: int = 512) -> np.ndarray:
    """<f, W'_t> for each grid t (real, since K_it(x) is real for real t and x)."""
    y, w = f.quadrature(nodes)
    fy = f(y)
    if not np.any(fy):
        return np.zeros(len(grid), dtype=complex)
    return (_design(grid.t_values, y) @ (w * fy / y)).astype(complex)


def inverse_transform(coefficients, grid: SpectralGrid, y) -> np.ndarray:
    coeff = np.asarray(coefficients, dtype=complex)
    if coeff.shape != grid.t_values.shape:
        raise ValueError("coefficients must live on the same grid")
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ya <= 0):
        raise ValueError("y must be positive")
    wt = INVERSION_CONSTANT * grid.weights * inversion_weight(grid.t_values) * coeff
    out = wt @ _design(grid.t_values, ya)
    return out[0] if np.ndim(y) == 0 else out


def sample_points(f: BumpFunction, count: int = SAMPLE_POINTS) -> np.ndarray:
    """Evenly spaced points slightly wider than the support."""
    lo, hi = f.support
    pad = 0.1 * (hi - lo)
    return np.linspace(lo - pad, hi + pad, count)


@dataclass(frozen=True)
class RoundTrip:
    coefficients: np.ndarray
    sup_error: float
    norm_sq: float
    spectral_norm_sq: float

    @property
    def parseval_rel(self) -> float:
        return abs(self.spectral_norm_sq - self.norm_sq) / self.norm_sq


def roundtrip(f: BumpFunction, grid: SpectralGrid, nodes: int = 512) -> RoundTrip:
    """Forward, inverse and Parseval from one shared Bessel design matrix."""
    y, w = f.quadrature(nodes)
    ys = sample_points(f)
    design = _design(grid.t_values, np.concatenate([y, ys]))
    fy = f(y)
    coeff = design[:, : y.size] @ (w * fy / y)
    wt = INVERSION_CONSTANT * grid.weights * inversion_weight(grid.t_values)
    back = (wt * coeff) @ design[:, y.size:]
    return RoundTrip(
        coefficients=coeff.astype(complex),
        sup_error=float(np.max(np.abs(f(ys) - back))),
        norm_sq=float(np.sum(w * fy ** 2 / y)),
        spectral_norm_sq=float(np.sum(wt * coeff ** 2)),
    )


def roundtrip_error(f: BumpFunction, grid: SpectralGrid, nodes: int = 512) -> float:
    """Sup over 64 sample points of |f - inverse(forward(f))|."""
    if not np.any(f(f.quadrature(nodes)[0])):
        return 0.0
    return roundtrip(f, grid, nodes).sup_error


def parseval(f: BumpFunction, grid: SpectralGrid, nodes: int = 512) -> tuple[float, float]:
    """(int |f|^2 dy/y, spectral side) for the same pairing."""
    r = roundtrip(f, grid, nodes)
    return r.norm_sq, r.spectral_norm_sq


def coefficient_envelope(t) -> np.ndarray:
    """t^(-6) |c(1, (it, -it))|, with |c(1, mu)|^2 = 1/cosh(pi t)."""
    t = np.asarray(t, dtype=float)
    return t ** -6.0 / np.sqrt(np.cosh(math.pi * t))


def truncation_certificate(f: BumpFunction, t_max: float, probe: int = 16) -> float:
    """Size of the inversion integrand just past t_max.

    Uses |W'_t(y)| <= D2 sqrt(2 pi/t) exp(-pi t/2) in the oscillatory range.
    """
    t = np.linspace(t_max, t_max + 10.0, probe)
    grid = SpectralGrid(t, np.ones_like(t))
    coeff = forward_transform(f, grid)
    w_size = D2 * np.sqrt(2.0 * math.pi / t) * np.exp(-0.5 * math.pi * t)
    return float(np.max(INVERSION_CONSTANT * np.abs(coeff) * inversion_weight(t) * w_size))
