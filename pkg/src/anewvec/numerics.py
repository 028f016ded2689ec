"""Numeric substrate: log-gamma, K-Bessel, vertical-line quadrature, bump functions.

Everything here is double precision and vectorized over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ContourTailError, PoleError, RegimeError

LOG_PI = math.log(math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 671/128, 14 terms.
_LANCZOS_G = 671.0 / 128.0
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = np.array([
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
])


def _lanczos(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    ser = np.full(z.shape, _LANCZOS_C0, dtype=complex)
    for j, c in enumerate(_LANCZOS_COEF):
        ser = ser + c / (z + (j + 1))
    tmp = z + _LANCZOS_G
    return (z + 0.5) * np.log(tmp) - tmp + _LOG_SQRT_2PI + np.log(ser) - np.log(z)


def _sinpi(z: np.ndarray) -> np.ndarray:
    # sin(pi z) with the real part reduced mod 2 first, which keeps
    # precision for large |Re z|
    x = np.real(z)
    n = np.round(x)
    r = (x - n) + 1j * np.imag(z)
    sign = np.where(np.mod(n, 2) == 0, 1.0, -1.0)
    return sign * np.sin(np.pi * r)


def _log_sinpi(z: np.ndarray) -> np.ndarray:
    """log sin(pi z) modulo 2 pi i, without overflow for large |Im z|."""
    x = np.real(z)
    n = np.round(x)
    r = (x - n) + 1j * np.imag(z)
    odd = np.mod(n, 2) != 0
    out = np.empty(r.shape, dtype=complex)
    small = np.abs(r.imag) < 20.0
    out[small] = np.log(np.sin(np.pi * r[small]))
    # sin(pi r) = -exp(-i pi r)(1 - exp(2 pi i r))/(2i) for Im r > 0, mirrored below
    up = ~small & (r.imag > 0)
    dn = ~small & (r.imag <= 0)
    ru, rd = r[up], r[dn]
    out[up] = -1j * np.pi * ru + np.log(-(1.0 - np.exp(2j * np.pi * ru)) / 2j)
    out[dn] = 1j * np.pi * rd + np.log((1.0 - np.exp(-2j * np.pi * rd)) / 2j)
    return out + np.where(odd, 1j * np.pi, 0.0)


def _log_gamma_unchecked(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    out = np.empty(s.shape, dtype=complex)
    right = np.real(s) >= 0.5
    if np.any(right):
        out[right] = _lanczos(s[right])
    left = ~right
    if np.any(left):
        z = s[left]
        val = LOG_PI - _log_sinpi(z) - _lanczos(1.0 - z)
        # The reflection formula is correct only up to 2 pi i k. The upward
        # recurrence log G(z) = log G(z+N) - sum log(z+j) is exact on the
        # principal branch, so its imaginary part fixes k.
        x = np.real(z)
        y = np.imag(z) + 0.0
        n_shift = np.ceil(0.5 - x).astype(int)
        target = np.imag(_lanczos(z + n_shift))
        for j in range(int(n_shift.max())):
            active = j < n_shift
            target = target - np.where(active, np.arctan2(y, x + j), 0.0)
        k = np.round((target - np.imag(val)) / (2.0 * np.pi))
        out[left] = val + 2j * np.pi * k
    return out


def log_gamma(s):
    """Principal-branch log Gamma(s), vectorized.

    Raises PoleError on the nonpositive integers.
    """
    arr = np.asarray(s, dtype=complex)
    re, im = np.real(arr), np.imag(arr)
    bad = (im == 0) & (re <= 0) & (re == np.round(re))
    if np.any(bad):
        raise PoleError(f"log_gamma has a pole at {arr[bad].ravel()[0].real:g}")
    out = _log_gamma_unchecked(arr)
    return out[()] if out.ndim == 0 else out


def gamma(s):
    return np.exp(log_gamma(s))


def rgamma(s):
    """1/Gamma(s), entire; exact zeros at the nonpositive integers."""
    arr = np.asarray(s, dtype=complex)
    re, im = np.real(arr), np.imag(arr)
    zero = (im == 0) & (re <= 0) & (re == np.round(re))
    safe = np.where(zero, 1.0, arr)
    out = np.where(zero, 0.0, np.exp(-_log_gamma_unchecked(safe)))
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# K-Bessel of complex order


def _bessel_k_plan(order: complex, x: np.ndarray):
    """Per-x contour tilt theta, step h and half-length m (in steps)."""
    a, b = order.real, order.imag
    # The saddle of exp(-x cosh w + nu w) sits near Im w = asin(b/x) when
    # |b| < x and near Im w = pi/2 otherwise; running the trapezoid along
    # Im w = theta removes most of the oscillatory cancellation.
    if b != 0.0:
        cap = max(0.0, math.pi / 2 - 4.0 / abs(b))
        theta = np.sign(b) * np.minimum(np.arcsin(np.minimum(1.0, abs(b) / x)), cap)
    else:
        theta = np.zeros_like(x)
    width = math.pi / 2 - np.abs(theta)
    h = np.minimum(0.1, 2.0 * math.pi / (abs(b) + 60.0 / width))
    c = x * np.cos(theta)
    U = np.ones_like(x)
    for _ in range(80):
        U = np.arccosh(np.maximum(1.0, (c + 45.0 + abs(a) * U) / c))
    U = np.maximum(U, 1.0) + 0.5
    m = np.ceil(U / h).astype(int)
    return theta, h, m


def bessel_K(order, x):
    """Modified Bessel function K_order(x) for complex order and x > 0.

    Uses K_nu(x) = 1/2 int_R exp(-x cosh w + nu w) dw on the line
    Im w = theta, summed by the trapezoidal rule (the integrand decays
    doubly exponentially, so the rule converges geometrically in 1/h).
    """
    order = complex(order)
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise RegimeError("bessel_K requires x > 0")
    if abs(order.real) > 2.0 + 1e-12:
        raise RegimeError("bessel_K supports |Re(order)| <= 2")
    return _bessel_k_unchecked(order, xa)


def _bessel_k_unchecked(order, x):
    # same quadrature without the |Re(order)| <= 2 guard; series code needs
    # larger real orders and keeps its own accuracy bookkeeping
    order = complex(order)
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    theta, h, m = _bessel_k_plan(order, flat)
    out = np.empty(flat.shape, dtype=complex)
    mm = int(m.max())
    k = np.arange(-mm, mm + 1)
    chunk = max(1, 4_000_000 // k.size)
    for i in range(0, flat.size, chunk):
        sl = slice(i, i + chunk)
        w = h[sl, None] * k[None, :] + 1j * theta[sl, None]
        vals = np.exp(-flat[sl, None] * np.cosh(w) + order * w)
        vals[np.abs(k)[None, :] > m[sl, None]] = 0.0
        out[sl] = 0.5 * h[sl] * np.sum(vals, axis=1)
    out = out.reshape(xa.shape)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Vertical-line quadrature

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def composite_gl(a: float, b: float, panels: int, order: int = 16):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class VerticalContour:
    """The segment sigma + i[-height, height], integrated with `nodes` points."""

    sigma: float
    height: float
    nodes: int = 512

    def __post_init__(self):
        if not self.height > 0:
            raise ContourTailError("contour height must be positive")
        if self.nodes < 8:
            raise ValueError("a contour needs at least 8 nodes")

    def refined(self) -> "VerticalContour":
        return VerticalContour(self.sigma, 2.0 * self.height, 4 * self.nodes)


class ContourResult(NamedTuple):
    value: complex
    tail: float

    def __complex__(self):
        return complex(self.value)


def contour_points(contour: VerticalContour):
    """Points s_j and weights w_j with sum w_j f(s_j) ~ int f ds/(2 pi i)."""
    order = 16 if contour.nodes >= 16 else contour.nodes
    panels = max(1, contour.nodes // order)
    t, w = composite_gl(-contour.height, contour.height, panels, order)
    return contour.sigma + 1j * t, w / (2.0 * np.pi)


def contour_integral(f: Callable, contour: VerticalContour, tol: float | None = None) -> ContourResult:
    """Integral of f over the truncated vertical line, divided by 2 pi i.

    `f` is called once with the full array of nodes. The tail estimate is
    the mass of |f| on the outer tenth of the segment; with tol given, a
    ContourTailError is raised when that exceeds tol * max(1, |value|).
    """
    s, w = contour_points(contour)
    vals = np.asarray(f(s), dtype=complex)
    if vals.shape != s.shape:
        vals = np.broadcast_to(vals, s.shape)
    value = complex(np.sum(w * vals))
    outer = np.abs(s.imag) >= 0.9 * contour.height
    tail = float(np.sum(w[outer] * np.abs(vals[outer])))
    if tol is not None and tail > tol * max(1.0, abs(value)):
        raise ContourTailError(
            f"tail estimate {tail:.3e} exceeds tolerance at height {contour.height:g}")
    return ContourResult(value, tail)


def adaptive_height(f: Callable, sigma: float, tol: float, start: float = 8.0,
                    limit: float = 4096.0) -> float:
    """Smallest doubling of `start` whose endpoint magnitude is < 1e-3 tol."""
    T = start
    while T <= limit:
        ends = np.abs(np.asarray(f(np.array([sigma + 1j * T, sigma - 1j * T])), dtype=complex))
        if float(ends.max()) < 1e-3 * tol:
            return T
        T *= 2.0
    raise ContourTailError(f"integrand not small by height {limit:g}")


# --------------------------------------------------------------------------
# Bump functions


@dataclass(frozen=True)
class BumpFunction:
    """amplitude * exp(-1/(1-u^2)) with u = (t - center)/radius, zero for |u| >= 1."""

    center: float = 1.0
    radius: float = 0.5
    amplitude: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0 and self.center - self.radius > 0):
            raise ValueError("bump support must lie inside the positive reals")

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.radius, self.center + self.radius

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center) / self.radius
        inside = np.abs(u) < 1.0
        us = np.where(inside, u, 0.0)
        out = np.where(inside, self.amplitude * np.exp(-1.0 / (1.0 - us * us)), 0.0)
        return out[()] if out.ndim == 0 else out

    def scaled(self, amplitude: float) -> "BumpFunction":
        return BumpFunction(self.center, self.radius, amplitude)

    def l2_norm_multiplicative(self, nodes: int = 2048) -> float:
        """(int |f(t)|^2 dt/t)^(1/2)."""
        t, w = self.quadrature(nodes)
        return math.sqrt(float(np.sum(w * self(t) ** 2 / t)))

    def normalized(self) -> "BumpFunction":
        unit = self.scaled(1.0)
        return unit.scaled(1.0 / unit.l2_norm_multiplicative())

    def quadrature(self, nodes: int = 512):
        """Gauss-Legendre nodes/weights in t covering the support."""
        lo, hi = self.support
        return composite_gl(lo, hi, max(1, nodes // 32), 32)


def _mellin_bump_real(f: BumpFunction, s: np.ndarray, nodes: int) -> np.ndarray:
    t, w = f.quadrature(nodes)
    g = w * f(t) / t
    lt = np.log(t)
    out = np.empty(s.shape, dtype=complex)
    chunk = max(1, 4_000_000 // t.size)
    for i in range(0, s.size, chunk):
        out[i:i + chunk] = np.exp(-s[i:i + chunk, None] * lt[None, :]) @ g
    return out


_DEFORM_SWITCH = 24.0
_DIAG = np.exp(0.25j * np.pi)


def _bump_path(f: BumpFunction, tau: float) -> list[complex]:
    """Polyline in u = (t - center)/radius from -1 to 1 through the lower half plane.

    The end pieces run at 45 degrees, which is the steepest-descent direction
    of exp(-1/(1-u^2)) t^(-i tau) near u = +-1; the saddles sit at distance
    sqrt(t_end/(2 tau r)) from the endpoints.
    """
    c, r = f.center, f.radius
    rho_r = math.sqrt((c + r) / (2.0 * tau * r))
    rho_l = math.sqrt((c - r) / (2.0 * tau * r))
    lr = min(6.0 * rho_r, 0.6)
    ll = min(6.0 * rho_l, 0.6)
    p_l = -1.0 + ll * _DIAG.conjugate()
    p_r = 1.0 - lr * _DIAG
    depth = 0.5
    return [-1.0 + 0j, p_l, p_l - 1j * depth, p_r - 1j * depth, p_r, 1.0 + 0j]


def _panel_nodes(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx, gw = gauss_legendre(16)
    half = 0.5 * (edges[1:, None] - edges[:-1, None])
    x = (0.5 * (edges[:-1, None] + edges[1:, None]) + half * gx[None, :]).ravel()
    return x, (half * gw[None, :]).ravel()


# panels graded geometrically toward the singular endpoint of a diagonal piece
_GRADED = _panel_nodes(np.concatenate([[0.0], np.geomspace(1e-3, 1.0, 16)]))


def _tau_chunks(tau: np.ndarray, order: np.ndarray, size: int = 256, ratio: float = 1.25):
    """Blocks of at most `size` indices (sorted by tau) with tau_max <= ratio * tau_min."""
    start = 0
    while start < order.size:
        lo = tau[order[start]]
        stop = min(start + size, int(np.searchsorted(tau[order], ratio * lo, side="right")))
        stop = max(stop, start + 1)
        yield order[start:stop]
        start = stop


_BLOCK = 16


def _exp_kernel(base: np.ndarray, logy: np.ndarray, sb: np.ndarray) -> np.ndarray:
    """exp(base - s_k log y) for every s_k in sb, rows by k.

    For equally spaced sb the row k = 16 q + j is exp(base - s_{16 q} log y)
    times exp(-j d log y): two direct exponentials, no accumulated product.
    """
    n = sb.size
    if n > 2 * _BLOCK:
        d = (sb[-1] - sb[0]) / (n - 1)
        q = -(-n // _BLOCK)
        anchors = sb[::_BLOCK]
        offsets = np.arange(q * _BLOCK)[:n] % _BLOCK
        drift = np.abs(sb - np.repeat(anchors, _BLOCK)[:n] - offsets * d)
        if drift.max() <= 4 * np.finfo(float).eps * np.abs(sb).max():
            head = np.exp(base[None, :] - anchors[:, None] * logy[None, :])
            steps = np.exp(-(d * np.arange(_BLOCK))[:, None] * logy[None, :])
            full = (head[:, None, :] * steps[None, :, :]).reshape(q * _BLOCK, -1)
            return full[:n]
    return np.exp(base[None, :] - sb[:, None] * logy[None, :])


def _mellin_bump_deformed(f: BumpFunction, s: np.ndarray) -> np.ndarray:
    """Mellin transform for Im s >= _DEFORM_SWITCH along the deformed path."""
    c, r = f.center, f.radius
    out = np.empty(s.shape, dtype=complex)
    order = np.argsort(s.imag)

    def log_integrand(u, sb):
        y = c + r * u
        return (-1.0 / (1.0 - u * u) - np.log(y))[None, :] - sb[:, None] * np.log(y)[None, :]

    def integrand(u, sb):
        logy = np.log(c + r * u)
        return _exp_kernel(-1.0 / (1.0 - u * u) - logy, logy, sb)

    xg, wg = _GRADED
    probe = np.linspace(0.0, 1.0, 33)
    for idx in _tau_chunks(s.imag, order):
        sb = s[idx]
        tau_hi = float(sb.imag.max())
        path = _bump_path(f, float(sb.imag.min()))
        total = np.zeros(sb.size, dtype=complex)
        # the two diagonal pieces, parametrized from their singular endpoint
        peak = -np.inf
        for end, corner in ((path[0], path[1]), (path[-1], path[-2])):
            u = end + (corner - end) * xg
            vals = integrand(u, sb)
            peak = max(peak, float(log_integrand(u, sb).real.max()))
            sign = 1.0 if end == path[0] else -1.0
            total += sign * (vals @ wg) * (corner - end) * r
        for k in range(1, len(path) - 2):
            a, b = path[k], path[k + 1]
            if float(log_integrand(a + (b - a) * probe, sb).real.max()) < peak - 50.0:
                continue
            spread = abs(np.log(c + r * b) - np.log(c + r * a))
            panels = max(6, int(math.ceil(tau_hi * spread / 6.0)))
            x, w = _panel_nodes(np.linspace(0.0, 1.0, panels + 1))
            total += (integrand(a + (b - a) * x, sb) @ w) * (b - a) * r
        out[idx] = f.amplitude * total
    return out


def mellin_bump(f: BumpFunction, s, nodes: int = 512):
    """f~(s) = int f(t) t^(-s) dt/t, vectorized over s.

    For |Im s| >= 24 the path is deformed into the complex plane so that
    the exponentially small values are computed without cancellation.
    """
    sa = np.asarray(s, dtype=complex)
    flat = sa.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if f.amplitude != 0.0:
        big = np.abs(flat.imag) >= _DEFORM_SWITCH
        if np.any(~big):
            out[~big] = _mellin_bump_real(f, flat[~big], nodes)
        if np.any(big):
            # conjugate symmetry of a real bump puts every point in Im s > 0
            up = flat[big].real + 1j * np.abs(flat[big].imag)
            vals = _mellin_bump_deformed(f, up)
            out[big] = np.where(flat[big].imag > 0, vals, vals.conjugate())
    out = out.reshape(sa.shape)
    return out[()] if out.ndim == 0 else out


def pairwise_sum(values) -> complex:
    """Fixed-order compensated sum (math.fsum on real and imaginary parts)."""
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))
