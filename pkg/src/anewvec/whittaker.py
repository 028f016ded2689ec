"""Spherical Whittaker functions on GL(2) and GL(3).

W_mu is normalized through the Jacquet integral so that, for imaginary mu,
its Kirillov norm int |W_mu(diag(y,1))|^2 dy/y equals |c(1, mu)|^2.  On
GL(2) this gives

    W_mu(diag(a1, a2)) = D2 (a1/a2)^(1/2) (a1 a2)^((mu1+mu2)/2) K_{(mu1-mu2)/2}(2 pi a1/a2)

with D2 = sqrt(8/pi).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import CalibrationError, ContourTailError, RegimeError
from .gamma_factors import LanglandsParams, c_func, gamma_R, rgamma_R
from .numerics import VerticalContour, bessel_K, contour_integral

# Frozen constants. calibrate_gl2_norm and calibrate_kappa2 reproduce them.
D2 = math.sqrt(8.0 / math.pi)
KAPPA2 = D2 / 4.0  # = 1/sqrt(2 pi)
D2_JACQUET = D2 / 2.0
# GL(3) is left in the unit normalization of its contour formula.
KAPPA3 = 1.0


@dataclass(frozen=True)
class DiagonalPoint:
    """Positive diagonal torus element diag(a_1, ..., a_n)."""

    a: tuple[float, ...]

    def __init__(self, a: Iterable[float] | "DiagonalPoint"):
        if isinstance(a, DiagonalPoint):
            a = a.a
        vals = tuple(float(x) for x in a)
        if not vals or any(not x > 0 for x in vals):
            raise ValueError("torus coordinates must be positive")
        object.__setattr__(self, "a", vals)

    def __len__(self):
        return len(self.a)

    def __getitem__(self, i):
        return self.a[i]

    @property
    def n(self) -> int:
        return len(self.a)

    def scaled(self, z: float) -> "DiagonalPoint":
        return DiagonalPoint(z * x for x in self.a)


@dataclass(frozen=True)
class WhittakerNormalization:
    d2: float
    d3: float
    kappa2: float
    spread: float = 0.0


def _point(a) -> DiagonalPoint:
    return a if isinstance(a, DiagonalPoint) else DiagonalPoint(a)


def _params(mu, n: int) -> LanglandsParams:
    mu = mu if isinstance(mu, LanglandsParams) else LanglandsParams(mu)
    if mu.n != n:
        raise ValueError(f"expected {n} Langlands parameters, got {mu.n}")
    return mu


def delta_half(a) -> float:
    """sqrt of the modular character prod_{j<k} a_j/a_k."""
    a = _point(a)
    log_delta = sum(math.log(a[j]) - math.log(a[k])
                    for j in range(a.n) for k in range(j + 1, a.n))
    return math.exp(0.5 * log_delta)


def whittaker_gl2_y(mu, y):
    """W_mu(diag(y, 1)), vectorized over y > 0."""
    mu = _params(mu, 2)
    y = np.asarray(y, dtype=float)
    nu = 0.5 * (mu[0] - mu[1])
    s = 0.5 * (mu[0] + mu[1])
    out = D2 * np.exp((0.5 + s) * np.log(y)) * bessel_K(nu, 2.0 * math.pi * y)
    return out


def whittaker_gl2(mu, a) -> complex:
    """Spherical GL(2) Whittaker function at diag(a1, a2)."""
    mu = _params(mu, 2)
    a = _point(a)
    if a.n != 2:
        raise ValueError("GL(2) needs a two-entry torus point")
    central = np.exp((mu[0] + mu[1]) * math.log(a[1]))
    return complex(central * whittaker_gl2_y(mu, a[0] / a[1]))


def whittaker_gl2_prime(mu, a) -> complex:
    """W' = delta^(-1/2) W."""
    return whittaker_gl2(mu, a) / delta_half(a)


def _kirillov_norm_sq(t: float, h: float = 0.02, vmin: float = -25.0, vmax: float = 2.5) -> float:
    # int_0^inf |y^(1/2) K_it(2 pi y)|^2 dy/y by the trapezoid in v = log y
    v = np.arange(vmin, vmax + h / 2, h)
    y = np.exp(v)
    k = bessel_K(1j * t, 2.0 * math.pi * y)
    return float(h * np.sum(y * np.abs(k) ** 2))


def calibrate_gl2_norm(t_grid: Sequence[float], rel_spread: float = 1e-5) -> WhittakerNormalization:
    """Fit d2 so that the Kirillov norm of W_(it,-it) is |c(1, mu)|^2 on the grid."""
    t_grid = list(t_grid)
    if not t_grid:
        raise ValueError("calibration grid is empty")
    if any(t <= 0 for t in t_grid):
        raise ValueError("calibration needs t > 0")
    fits = []
    for t in t_grid:
        target = abs(c_func(1.0, (1j * t, -1j * t))) ** 2
        fits.append(math.sqrt(target / _kirillov_norm_sq(t)))
    fits = np.array(fits)
    spread = float((fits.max() - fits.min()) / fits.mean())
    if spread > rel_spread:
        raise CalibrationError(f"d2 varies by {spread:.2e} across the grid")
    return WhittakerNormalization(d2=float(fits.mean()), d3=KAPPA3,
                                  kappa2=float(fits.mean()) / 4.0, spread=spread)


def stade_norm_residual(t: float, d2: float = D2) -> float:
    """Relative gap between int |W|^2 dy/y and |c(1, mu)|^2."""
    target = abs(c_func(1.0, (1j * t, -1j * t))) ** 2
    return abs(d2 ** 2 * _kirillov_norm_sq(t) - target) / target


def jacquet_gl2(mu, a, height: float | None = None) -> complex:
    """W_mu(a) from the Jacquet integral, Re(mu1 - mu2) > 0 only.

    With s = (1 + mu1 - mu2)/2 and y = a1/a2 the integral reduces to
    y^(mu2 + 1/2) int_R (1 + x^2)^(-s) e(-x y) dx; the oscillatory tail
    beyond `height` uses scipy's Fourier-weighted quadrature.
    """
    mu = _params(mu, 2)
    a = _point(a)
    if (mu[0] - mu[1]).real <= 0:
        raise RegimeError("Jacquet integral converges only for Re(mu1 - mu2) > 0")
    y = a[0] / a[1]
    s = 0.5 * (1.0 + mu[0] - mu[1])
    omega = 2.0 * math.pi * y
    T = 20.0 if height is None else float(height)

    def part(fun):
        head, _ = integrate.quad(fun, 0.0, T, weight="cos", wvar=omega, limit=400,
                                 epsabs=1e-13, epsrel=1e-12)
        tail, _ = integrate.quad(fun, T, np.inf, weight="cos", wvar=omega, limlst=200,
                                 epsabs=1e-13)
        return head + tail

    def re(x):
        return (np.exp(-s * np.log1p(x * x))).real

    def im(x):
        return (np.exp(-s * np.log1p(x * x))).imag

    integral = 2.0 * (part(re) + 1j * part(im))
    jac = y ** (mu[1] + 0.5) * integral
    central = a[1] ** (mu[0] + mu[1])
    return complex(D2_JACQUET * c_func(1.0, mu) * jac * central)


def mellin_barnes_gl2_integral(nu, x: float, contour: VerticalContour, tol: float | None = 1e-12):
    """int x^z Gamma_R(1/2 + nu1 - z) Gamma_R(1/2 + nu2 - z) dz/(2 pi i)."""
    nu = _params(nu, 2)
    lx = math.log(x)

    def f(z):
        return np.exp(z * lx) * gamma_R(0.5 + nu[0] - z) * gamma_R(0.5 + nu[1] - z)

    return contour_integral(f, contour, tol=tol)


def saddle_sigma(nu, x: float) -> float:
    """Real part where |x^z Gamma_R(1/2 + nu_i - z)| is smallest along the real axis.

    All poles of the integrand lie to the right of the line Re z = 0, so the
    line may move left freely; sitting at the saddle avoids the heavy
    cancellation a Re z = 0 line suffers when x is large.
    """
    nu = _params(nu, 2)
    base = 0.5 + 0.5 * (nu[0].real + nu[1].real)
    target = math.log(math.pi * x)
    # u = (base - sigma)/2 solves digamma(u) = log(pi x)
    if special.digamma(base / 2.0) >= target:
        return 0.0
    u = optimize.brentq(lambda v: special.digamma(v) - target, base / 2.0, 1e6)
    return min(0.0, base - 2.0 * u)


def stade_gl2_mellin_barnes(nu, a, contour: VerticalContour | None = None,
                            kappa: float = KAPPA2, tol: float | None = 1e-12) -> complex:
    """GL(2) Whittaker function as a GL(1) Mellin-Barnes integral."""
    nu = _params(nu, 2)
    a = _point(a)
    if any(v.real < 0 for v in nu):
        raise RegimeError("Mellin-Barnes form needs Re(nu_i) >= 0")
    if contour is None:
        contour = VerticalContour(saddle_sigma(nu, a[0] / a[1]),
                                  80.0 + 2.0 * max(abs(v.imag) for v in nu), 1024)
    elif contour.sigma >= 0.5 + min(v.real for v in nu):
        raise RegimeError("contour must stay left of the Gamma_R poles")
    res = mellin_barnes_gl2_integral(nu, a[0] / a[1], contour, tol=tol)
    return complex(kappa * a[1] ** (nu[0] + nu[1]) * res.value)


def calibrate_kappa2(nu=(0.0, 0.0), a=(1.0, 1.0)) -> float:
    """kappa2 from one reference point: Bessel value over the contour value."""
    nu = _params(nu, 2)
    a = _point(a)
    raw = stade_gl2_mellin_barnes(nu, a, kappa=1.0)
    return float((whittaker_gl2(nu, a) / raw).real)


def whittaker_gl3(nu, a, contour: VerticalContour | None = None, prime: bool = False) -> complex:
    """Spherical GL(3) Whittaker function through a GL(2) contour integral.

    W_nu(a) = KAPPA3 a3^(sum nu) int int W_z(a1/a3, a2/a3)
              prod_{i,j} Gamma_R(1/2 + nu_i - z_j) / (c(z) c(-z)) dz/(2 pi i)^2

    over z = (sigma + i y1, sigma + i y2).  The integrand is
    A(y1) A(y2) G(y1 - y2), so on a uniform grid the double sum is a
    Toeplitz quadratic form; the trapezoid rule is used in both directions.
    """
    nu = _params(nu, 3)
    a = _point(a)
    if a.n != 3:
        raise ValueError("GL(3) needs a three-entry torus point")
    if contour is None:
        contour = VerticalContour(0.0, 30.0, 601)
    sigma, T = contour.sigma, contour.height
    gap = min(0.5 + v.real - sigma for v in nu)
    if gap <= 0:
        raise RegimeError("contour lies right of a Gamma_R pole")
    if gap < 1e-3:
        warnings.warn("contour passes within 1e-3 of a Gamma_R pole", RuntimeWarning)
    m = (contour.nodes - 1) // 2
    h = T / m
    y = h * np.arange(-m, m + 1)
    b1, b2 = a[0] / a[2], a[1] / a[2]
    x = 2.0 * math.pi * b1 / b2
    lprod = math.log(b1 * b2)
    A = np.exp(0.5j * y * lprod)
    for v in nu:
        A = A * gamma_R(0.5 + v - sigma - 1j * y)
    diffs = h * np.arange(0, 2 * m + 1)
    kv = np.array([complex(bessel_K(0.5j * dd, x)) if dd > 0 else complex(bessel_K(0.0, x))
                   for dd in diffs])
    r = rgamma_R(1j * diffs)
    G_pos = D2 * math.sqrt(b1 / b2) * kv * r * np.conj(r)
    # G depends on y1 - y2 only and is even in it
    idx = np.abs(np.arange(-m, m + 1)[:, None] - np.arange(-m, m + 1)[None, :])
    G = G_pos[idx]
    total = A @ G @ A
    outer = np.abs(y) >= 0.9 * T
    absA = np.abs(A)
    tail = 2.0 * float(absA[outer] @ np.abs(G[outer]) @ absA)
    scale = (h / (2.0 * math.pi)) ** 2 * math.exp(sigma * lprod)
    val = KAPPA3 * a[2] ** sum(nu.mu) * scale * total
    if tail * scale > 1e-6 * max(abs(val), 1e-300) and tail * scale > 1e-14:
        raise ContourTailError(f"GL(3) contour tail {tail * scale:.2e} not negligible")
    if prime:
        val = val / delta_half(a)
    return complex(val)
