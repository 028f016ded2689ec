"""The n = 1 analytic newvector pipeline for GL(2).

Conventions. V has Kirillov function f, a normalized bump on the positive
reals. For Pi with parameters (mu, -mu) and Theta(s) = C^(-s) L(1/2 + s, Pi)
/ L(1/2 - s, Pi~), the local functional equation gives the side values

    S(t) = V[diag(C, t) w] = int_(sigma) t^s Theta(s) f~(s) ds/(2 pi i),

valid on any line sigma > -1/2 + theta. The invariance defect is

    V[(1, 0; c/C, 1)] - V(1)
        = int_(0) Theta(s) int_0^oo (e(-c/t) - 1) S(t) t^s dt/t ds/(2 pi i).

Both integrals are evaluated on one lattice tau_k = k dtau, u_j = u0 + j du
with du dtau = 2 pi/N, so each is an FFT. Applying the same formula to S
itself (without the e(-c/t) - 1 factor) returns f(1), which the pipeline
reports as a self-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContourTailError, DegenerateFitError, PoleError, RegimeError
from .gamma_factors import LanglandsParams, analytic_conductor, theta
from .numerics import BumpFunction, VerticalContour, contour_integral, mellin_bump

LINE_FLOOR = 1e-18
# the asymptotic window: closer to t = 0.3 the side value is still in transition
DECAY_GRID = tuple(np.geomspace(1e-3, 1e-2, 8))
FAMILY_CONDUCTORS = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class Gl2Rep:
    """Generic unitary GL(2) representation with trivial central character."""

    params: LanglandsParams

    def __init__(self, params):
        params = params if isinstance(params, LanglandsParams) else LanglandsParams(params)
        if params.n != 2:
            raise ValueError("Gl2Rep needs two Langlands parameters")
        if abs(params[0] + params[1]) > 1e-12:
            raise ValueError("trivial central character needs mu_2 = -mu_1")
        if params.theta() >= 0.5:
            raise RegimeError("need theta < 1/2")
        object.__setattr__(self, "params", params)

    @classmethod
    def tempered(cls, t: float) -> "Gl2Rep":
        return cls((1j * t, -1j * t))

    @classmethod
    def with_conductor(cls, C: float) -> "Gl2Rep":
        """Tempered representation (it, -it) with (1 + |t|)^2 = C."""
        if C < 1.0:
            raise ValueError("conductor is at least 1")
        return cls.tempered(math.sqrt(C) - 1.0)

    @property
    def conductor(self) -> float:
        return analytic_conductor(self.params)

    @property
    def theta(self) -> float:
        return self.params.theta()


@dataclass(frozen=True)
class KirillovVector:
    """Kirillov-model function of V, normalized in L^2(dt/t) unless identically zero."""

    bump: BumpFunction = field(default_factory=BumpFunction)

    def __post_init__(self):
        if self.bump.amplitude != 0.0:
            object.__setattr__(self, "bump", self.bump.normalized())

    @classmethod
    def zero(cls) -> "KirillovVector":
        return cls(BumpFunction(amplitude=0.0))

    @property
    def is_zero(self) -> bool:
        return self.bump.amplitude == 0.0

    def mellin(self, s):
        return mellin_bump(self.bump, s)

    def at_one(self) -> float:
        return float(self.bump(1.0))


def _check_line(rep: Gl2Rep, sigma: float) -> None:
    if sigma <= -0.5 + rep.theta:
        raise PoleError(f"line Re(s) = {sigma} crosses the poles of Theta")


def _integrand(rep: Gl2Rep, v: KirillovVector, s: np.ndarray) -> np.ndarray:
    return theta(s, rep.params) * v.mellin(s)


def line_height(rep: Gl2Rep, v: KirillovVector, sigma: float, floor: float = LINE_FLOOR) -> float:
    """Height past which |Theta f~| on the line stays below floor times its peak."""
    _check_line(rep, sigma)
    probe = np.geomspace(1.0, 2e5, 240)
    mags = np.abs(_integrand(rep, v, sigma + 1j * probe))
    mags = np.maximum(mags, np.abs(_integrand(rep, v, sigma - 1j * probe)))
    peak = float(mags.max())
    if peak == 0.0:
        return 1.0
    above = np.nonzero(mags > floor * peak)[0]
    if above.size == 0:
        return float(probe[0])
    last = int(above[-1])
    if last == probe.size - 1:
        raise ContourTailError("integrand has not decayed by the largest probe height")
    return float(probe[last + 1])


@dataclass(frozen=True)
class MellinLine:
    """Samples of Theta f~ on sigma + i tau_k, tau_k = k dtau, |tau_k| <= height."""

    sigma: float
    dtau: float
    tau: np.ndarray
    values: np.ndarray

    @property
    def tail(self) -> float:
        """Mass of |values| on the outer tenth of the window."""
        outer = np.abs(self.tau) >= 0.9 * self.tau.max()
        return float(np.abs(self.values[outer]).sum() * self.dtau / (2.0 * math.pi))

    @property
    def mass(self) -> float:
        return float(np.abs(self.values).sum() * self.dtau / (2.0 * math.pi))


_LINES: dict[tuple, MellinLine] = {}


def mellin_line(rep: Gl2Rep, v: KirillovVector, sigma: float, dtau: float | None = None,
                height: float | None = None,
                integrand: Callable[[np.ndarray], np.ndarray] | None = None) -> MellinLine:
    """Theta(s) f~(s) sampled on a vertical line.

    The default spacing is 0.05 on sigma = 0 and 0.1 elsewhere; the trapezoid
    sum then aliases S(t) only against S(t exp(+-2 pi/dtau)) exp(-+2 pi sigma/dtau).
    """
    _check_line(rep, sigma)
    if dtau is None:
        dtau = 0.05 if abs(sigma) < 1.0 else 0.1
    if integrand is None:
        if height is None:
            height = line_height(rep, v, sigma)
        fn = lambda s: _integrand(rep, v, s)  # noqa: E731
    else:
        if height is None:
            raise ValueError("a custom integrand needs an explicit height")
        fn = integrand
    key = (rep.params.mu, v.bump, sigma, dtau, height) if integrand is None else None
    if key is not None and key in _LINES:
        return _LINES[key]
    m = int(math.floor(height / dtau + 1e-9))
    tau = dtau * np.arange(-m, m + 1)
    if v.is_zero and integrand is None:
        vals = np.zeros(tau.shape, dtype=complex)
    else:
        vals = np.asarray(fn(sigma + 1j * tau), dtype=complex)
    line = MellinLine(sigma, dtau, tau, vals)
    if key is not None:
        if len(_LINES) > 16:
            _LINES.clear()
        _LINES[key] = line
    return line


def _sum_line(line: MellinLine, t: np.ndarray) -> np.ndarray:
    lt = np.log(t)
    out = np.empty(t.shape, dtype=complex)
    for i, x in enumerate(lt):
        out[i] = np.sum(line.values * np.exp(1j * line.tau * x))
    return np.exp(line.sigma * lt) * out * line.dtau / (2.0 * math.pi)


def side_values(rep: Gl2Rep, v: KirillovVector, t, sigma: float = 0.0,
                line: MellinLine | None = None) -> np.ndarray:
    """S(t) for an array of t > 0 from one sampled line."""
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ta <= 0):
        raise ValueError("t must be positive")
    if line is None:
        line = mellin_line(rep, v, sigma)
    return _sum_line(line, ta)


def side_value(rep: Gl2Rep, v: KirillovVector, t: float, sigma: float = 0.0,
               contour: VerticalContour | None = None, tol: float | None = 1e-12) -> complex:
    """V[diag(C, t) w] as the integral over Re(s) = sigma.

    Without a contour the line is sampled by the trapezoid rule at the
    automatic height. With an explicit VerticalContour the composite
    Gauss-Legendre rule of that contour is used instead, and its tail
    diagnostic is enforced with tol.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if contour is None:
        return complex(side_values(rep, v, [t], sigma)[0])
    _check_line(rep, contour.sigma)
    if v.is_zero:
        return 0j
    lt = math.log(t)
    res = contour_integral(lambda s: np.exp(s * lt) * _integrand(rep, v, s), contour, tol)
    return complex(res.value)


def majorant_bound(rep: Gl2Rep, v: KirillovVector, t: float, sigma: float) -> float:
    """t^sigma times the integral of |Theta f~| on the line: a bound for |S(t)|."""
    return t ** sigma * mellin_line(rep, v, sigma).mass


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    t: np.ndarray
    values: np.ndarray


def decay_fit(rep: Gl2Rep, v: KirillovVector, t_grid: Sequence[float], M: int,
              integrand: Callable[[np.ndarray], np.ndarray] | None = None,
              height: float | None = None, dtau: float | None = None) -> DecayFit:
    """Least-squares slope of log|S(t)| against log t on the Re(s) = M line."""
    t = np.asarray(t_grid, dtype=float)
    if t.size < 4 or np.any(t <= 0) or np.any(t > 0.3):
        raise ValueError("t_grid needs at least 4 points in (0, 0.3]")
    if t.max() / t.min() < 10.0 * (1 - 1e-12):
        raise ValueError("t_grid must span a decade")
    line = mellin_line(rep, v, float(M), dtau=dtau, height=height, integrand=integrand)
    vals = _sum_line(line, t)
    mag = np.abs(vals)
    if not np.all(np.isfinite(mag)) or np.any(mag < 1e-300):
        raise DegenerateFitError("side values underflow; the fit is meaningless")
    slope, intercept = np.polyfit(np.log(t), np.log(mag), 1)
    return DecayFit(float(slope), float(intercept), t, vals)


# ---------------------------------------------------------------------------
# FFT pipeline for the invariance defect


@dataclass(frozen=True)
class FFTGrid:
    n: int = 2 ** 19
    dtau: float = 0.05
    u0: float = -40.0

    @property
    def du(self) -> float:
        return 2.0 * math.pi / (self.n * self.dtau)

    @property
    def tau(self) -> np.ndarray:
        return self.dtau * np.fft.fftfreq(self.n, 1.0 / self.n)

    @property
    def u(self) -> np.ndarray:
        return self.u0 + self.du * np.arange(self.n)


class DefectPipeline:
    """Side values of one (rep, v) on the FFT lattice, reused across c."""

    def __init__(self, rep: Gl2Rep, v: KirillovVector, grid: FFTGrid | None = None):
        self.rep, self.v = rep, v
        self.grid = grid or FFTGrid()
        g = self.grid
        tau = g.tau
        if v.is_zero:
            self.theta_line = np.ones(g.n, dtype=complex)
            self.side = np.zeros(g.n, dtype=complex)
            self.line_tail = 0.0
            return
        height = min(line_height(rep, v, 0.0), 0.95 * float(np.abs(tau).max()))
        self.theta_line = np.asarray(theta(1j * tau, rep.params), dtype=complex)
        inside = np.abs(tau) <= height
        G = np.zeros(g.n, dtype=complex)
        G[inside] = self.theta_line[inside] * v.mellin(1j * tau[inside])
        outer = inside & (np.abs(tau) >= 0.9 * height)
        self.line_tail = float(np.abs(G[outer]).sum() * g.dtau / (2.0 * math.pi))
        self.side = g.dtau / (2.0 * math.pi) * g.n * np.fft.ifft(G * np.exp(1j * tau * g.u0))

    @property
    def t(self) -> np.ndarray:
        return np.exp(self.grid.u)

    def _pair(self, h: np.ndarray) -> complex:
        g = self.grid
        tau = g.tau
        D = g.du * np.exp(1j * tau * g.u0) * g.n * np.fft.ifft(h)
        return complex(np.sum(self.theta_line * D) * g.dtau / (2.0 * math.pi))

    def identity_value(self) -> complex:
        """V(1) through both functional equations; should equal f(1)."""
        return self._pair(self.side)

    def defect(self, c: float) -> complex:
        if c == 0.0:
            return 0j
        phase = np.exp(-2j * math.pi * c * np.exp(-self.grid.u))
        return self._pair((phase - 1.0) * self.side)


_PIPELINES: dict[tuple, DefectPipeline] = {}


def _pipeline(rep: Gl2Rep, v: KirillovVector) -> DefectPipeline:
    key = (rep.params.mu, v.bump)
    if key not in _PIPELINES:
        if len(_PIPELINES) > 8:
            _PIPELINES.clear()
        _PIPELINES[key] = DefectPipeline(rep, v)
    return _PIPELINES[key]


def invariance_defect(rep: Gl2Rep, v: KirillovVector, c: float) -> complex:
    """V[(1, 0; c/C, 1)] - V(1)."""
    if abs(c) > 1.0:
        raise ValueError("need |c| <= 1")
    return _pipeline(rep, v).defect(c)


def subconductor_probe(rep: Gl2Rep, v: KirillovVector, shrink: float, c: float) -> complex:
    """The defect at the too-small scale X = shrink * C: c/C becomes c/(shrink C)."""
    if not 0.0 < shrink <= 1.0:
        raise ValueError("shrink must lie in (0, 1]")
    if shrink * rep.conductor < 1.0:
        raise ValueError("need shrink * C >= 1")
    if abs(c) > 1.0:
        raise ValueError("need |c| <= 1")
    return _pipeline(rep, v).defect(c / shrink)


def conductor_family(conductors: Sequence[float] = FAMILY_CONDUCTORS) -> list[Gl2Rep]:
    return [Gl2Rep.with_conductor(C) for C in conductors]


@dataclass(frozen=True)
class UniformityReport:
    conductors: tuple[float, ...]
    cs: tuple[float, ...]
    ratios: np.ndarray  # |defect| / |c|, rows by conductor

    @property
    def K(self) -> float:
        return float(self.ratios.max())


def uniform_constant(v: KirillovVector | None = None,
                     conductors: Sequence[float] = FAMILY_CONDUCTORS,
                     cs: Sequence[float] = (0.01, 0.05, 0.1)) -> UniformityReport:
    v = v or KirillovVector()
    ratios = np.empty((len(conductors), 2 * len(cs)))
    for i, rep in enumerate(conductor_family(conductors)):
        for j, c in enumerate(cs):
            ratios[i, 2 * j] = abs(invariance_defect(rep, v, c)) / c
            ratios[i, 2 * j + 1] = abs(invariance_defect(rep, v, -c)) / c
    return UniformityReport(tuple(r.conductor for r in conductor_family(conductors)),
                            tuple(cs), ratios)


def richardson_check(rep: Gl2Rep, v: KirillovVector, c: float = 0.02) -> float:
    """Relative spread between defect(c)/c at c, c/2, c/4 after one Richardson step."""
    q = [invariance_defect(rep, v, x) / x for x in (c, c / 2, c / 4)]
    r1 = 2 * q[1] - q[0]
    r2 = 2 * q[2] - q[1]
    return abs(r1 - r2) / abs(r2)


def toy_defect(t: float, X: float, points: int = 10_000) -> float:
    """sup of | |y|^(it) - 1 | over an even grid of |y - 1| < 1/X."""
    if not X > 1.0:
        raise ValueError("X must exceed 1")
    y = 1.0 + np.linspace(-1.0, 1.0, points + 2)[1:-1] / X
    return float(np.max(np.abs(np.exp(1j * t * np.log(np.abs(y))) - 1.0)))


def toy_bound(t: float, X: float) -> float:
    """|t| max|log y| <= |t|/(X - 1) on the same set."""
    return abs(t) / (X - 1.0)
