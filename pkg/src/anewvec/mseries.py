"""M-Whittaker power series and the GL(2)/GL(3) residue decompositions.

For tau in C^(s+1) and k in Z_{>=0}^s,

    P_k(tau) = L(tau, tau^s + 2k) / (c(tau) c(-tau) c(tau^s + 2k) c(-tau^s - 2k))
    M_tau(a) = sum_k P_k(tau) W'_{tau^s + 2k}(a^s / a_{s+1}).

P_k is evaluated through a product of the entire functions

    E(x, k) = Gamma_R(x - 2k) / (Gamma_R(x) Gamma_R(-x))
            = (-1)^(k+1) x / (2 pi Gamma_R(2 + 2k - x)),

so it stays finite when tau has repeated coordinates mod 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RegimeError, TruncationError
from .gamma_factors import L_reg, LanglandsParams, c_func, gamma_R_residue, rgamma_R
from .numerics import _bessel_k_unchecked, pairwise_sum
from .whittaker import D2, KAPPA2, DiagonalPoint, delta_half, whittaker_gl2

RE_MAX = 0.05
RE_GAP = 5e-3


@dataclass(frozen=True)
class MSeriesSpec:
    tau: LanglandsParams
    s: int
    k_max: int = 24

    def __init__(self, tau, s: int | None = None, k_max: int = 24):
        tau = tau if isinstance(tau, LanglandsParams) else LanglandsParams(tau)
        s = tau.n - 1 if s is None else int(s)
        if s not in (1, 2) or tau.n != s + 1:
            raise ValueError("pivot s must be 1 or 2 with len(tau) = s + 1")
        if any(t.real < 0 for t in tau):
            raise ValueError("M-series needs Re(tau_i) >= 0")
        if k_max < 8:
            raise ValueError("k_max must be at least 8")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "k_max", int(k_max))


def check_small_regime(tau) -> None:
    """Re(tau_i) in (0, RE_MAX], pairwise separated by RE_GAP."""
    tau = tau if isinstance(tau, LanglandsParams) else LanglandsParams(tau)
    re = [t.real for t in tau]
    if any(not 0 < r <= RE_MAX for r in re):
        raise RegimeError(f"need 0 < Re(tau_i) <= {RE_MAX}")
    for i in range(len(re)):
        for j in range(i + 1, len(re)):
            if abs(re[i] - re[j]) < RE_GAP:
                raise RegimeError("real parts must be pairwise distinct")


def _E(x: complex, k: int) -> complex:
    return (-1) ** (k + 1) * x * complex(rgamma_R(2 + 2 * k - x)) / (2.0 * math.pi)


def p_coeff(spec: MSeriesSpec, k: Sequence[int]) -> complex:
    """P_k(tau) through the holomorphic product form."""
    tau, s = spec.tau.mu, spec.s
    k = tuple(int(v) for v in k)
    if len(k) != s or any(v < 0 for v in k):
        raise ValueError("k must be a nonnegative s-tuple")
    out = 1.0 + 0j
    for j in range(s):
        out *= gamma_R_residue(k[j])
        out *= _E(tau[s] - tau[j], k[j])
    for i in range(s):
        for j in range(i + 1, s):
            out *= _E(tau[j] - tau[i], k[i])
            out *= _E(tau[i] - tau[j] + 2 * k[i] - 2 * k[j], k[i])
    return out


def p_coeff_raw(spec: MSeriesSpec, k: Sequence[int]) -> complex:
    """P_k(tau) straight from the L/c quotient (regular tau only)."""
    tau = spec.tau
    shifted = LanglandsParams(tau[j] + 2 * k[j] for j in range(spec.s))
    num = L_reg(tau, shifted)
    den = (c_func(0.0, tau) * c_func(0.0, tau.dual())
           * c_func(0.0, shifted) * c_func(0.0, shifted.dual()))
    return num / den


def _inner_prime_gl2(z1: complex, z2: complex, b1: float, b2: float) -> complex:
    # W'_z(diag(b1, b2)) = D2 (b1 b2)^((z1+z2)/2) K_{(z1-z2)/2}(2 pi b1/b2)
    return D2 * complex(np.exp(0.5 * (z1 + z2) * math.log(b1 * b2))
                        * _bessel_k_unchecked(0.5 * (z1 - z2), 2.0 * math.pi * b1 / b2))


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail: float
    largest_term: float


def _terms(spec: MSeriesSpec, a: DiagonalPoint):
    tau, s = spec.tau.mu, spec.s
    if a.n != s + 1:
        raise ValueError("torus point must have s + 1 entries")
    ks = list(itertools.product(range(spec.k_max + 1), repeat=s))
    vals = np.empty(len(ks), dtype=complex)
    if s == 1:
        lx = math.log(a[0] / a[1])
        for i, (k,) in enumerate(ks):
            vals[i] = p_coeff(spec, (k,)) * np.exp((tau[0] + 2 * k) * lx)
    else:
        b1, b2 = a[0] / a[2], a[1] / a[2]
        for i, k in enumerate(ks):
            vals[i] = p_coeff(spec, k) * _inner_prime_gl2(tau[0] + 2 * k[0], tau[1] + 2 * k[1], b1, b2)
    return ks, vals


def m_series(spec: MSeriesSpec, a, tol: float | None = None) -> SeriesValue:
    """Truncated M_tau(a) with a tail estimate from the outermost shell of terms."""
    a = a if isinstance(a, DiagonalPoint) else DiagonalPoint(a)
    ks, vals = _terms(spec, a)
    shell = np.array([max(k) >= spec.k_max - 1 for k in ks])
    tail = float(np.abs(vals[shell]).sum())
    value = pairwise_sum(vals)
    if tol is not None and tail > tol * max(abs(value), 1e-300):
        raise TruncationError(f"series tail {tail:.2e} exceeds tolerance")
    return SeriesValue(value, tail, float(np.abs(vals).max()))


def decompose_gl2(mu, a, k_max: int = 24) -> tuple[complex, complex]:
    """Both sides of W'_mu(a)/(c(mu)c(-mu)) = kappa a2^(mu1+mu2) (M_mu + M_{mu swapped})."""
    mu = mu if isinstance(mu, LanglandsParams) else LanglandsParams(mu)
    a = a if isinstance(a, DiagonalPoint) else DiagonalPoint(a)
    if mu.n != 2 or a.n != 2:
        raise ValueError("decompose_gl2 works on GL(2)")
    if a[0] / a[1] > 1.0:
        raise RegimeError("decomposition regime needs a1/a2 <= 1")
    check_small_regime(mu)
    lhs = whittaker_gl2(mu, a) / delta_half(a) / (c_func(0.0, mu) * c_func(0.0, mu.dual()))
    swapped = LanglandsParams((mu[1], mu[0]))
    m1 = m_series(MSeriesSpec(mu, 1, k_max), a).value
    m2 = m_series(MSeriesSpec(swapped, 1, k_max), a).value
    rhs = KAPPA2 * a[1] ** (mu[0] + mu[1]) * (m1 + m2)
    return complex(lhs), complex(rhs)


def m_vanishing(tau, a, k_max: int = 24) -> float:
    """|M_tau(a)| over its largest single term, for tau1 = tau2 mod 2."""
    tau = tau if isinstance(tau, LanglandsParams) else LanglandsParams(tau)
    if tau.n != 3:
        raise ValueError("vanishing check uses s = 2")
    half = (tau[0] - tau[1]) / 2.0
    if abs(half - round(half.real)) > 1e-12:
        raise RegimeError("need tau1 - tau2 in 2Z")
    res = m_series(MSeriesSpec(tau, 2, k_max), a)
    return abs(res.value) / res.largest_term


def m_residual(tau, a, k_max: int = 24) -> float:
    """Same normalized residual with no congruence requirement (negative controls)."""
    res = m_series(MSeriesSpec(tau, 2, k_max), a)
    return abs(res.value) / res.largest_term


def pop_holds(a, s: int) -> bool:
    """max(a_1..a_s) <= min(1, a_{s+1}, ..., a_n)."""
    a = tuple(a)
    if not 1 <= s <= len(a):
        return False
    return max(a[:s]) <= min((1.0,) + tuple(a[s:]))


def pop_classify(a) -> int | None:
    """Largest pivot s for which pop(s) holds, or None."""
    a = tuple(a.a if isinstance(a, DiagonalPoint) else a)
    for s in range(len(a), 0, -1):
        if pop_holds(a, s):
            return s
    return None
