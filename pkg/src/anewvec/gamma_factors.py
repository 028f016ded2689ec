"""Archimedean gamma factors for spherical principal series of GL_n(R).

Conventions: Gamma_R(s) = pi^(-s/2) Gamma(s/2); the contragredient of
pi_mu has parameters -mu; the epsilon factor of a spherical principal
series is taken to be 1 (see EPSILON_SPHERICAL).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import PoleError
from .numerics import LOG_PI, _log_gamma_unchecked, rgamma

EPSILON_SPHERICAL = 1.0
POLE_TOL = 1e-9


@dataclass(frozen=True)
class LanglandsParams:
    """Ordered spectral parameters (mu_1, ..., mu_n)."""

    mu: tuple[complex, ...]

    def __init__(self, mu: Iterable[complex] | "LanglandsParams"):
        if isinstance(mu, LanglandsParams):
            mu = mu.mu
        vals = tuple(complex(m) for m in mu)
        if not vals:
            raise ValueError("need at least one Langlands parameter")
        object.__setattr__(self, "mu", vals)

    def __len__(self):
        return len(self.mu)

    def __iter__(self):
        return iter(self.mu)

    def __getitem__(self, i):
        return self.mu[i]

    @property
    def n(self) -> int:
        return len(self.mu)

    def array(self) -> np.ndarray:
        return np.array(self.mu, dtype=complex)

    def dual(self) -> "LanglandsParams":
        return LanglandsParams(-m for m in self.mu)

    def shifted(self, s: complex) -> "LanglandsParams":
        return LanglandsParams(m + s for m in self.mu)

    def is_tempered(self, tol: float = 1e-12) -> bool:
        return all(abs(m.real) <= tol for m in self.mu)

    def theta(self) -> float:
        """Smallest theta with |Re mu_i| <= theta for all i."""
        return max(abs(m.real) for m in self.mu)

    def is_theta_tempered(self, theta: float) -> bool:
        return self.theta() <= theta


def _as_params(mu) -> LanglandsParams:
    return mu if isinstance(mu, LanglandsParams) else LanglandsParams(mu)


def _pole_mask(s: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    k = np.round(np.real(s) / 2.0)
    return (k <= 0) & (np.abs(s - 2.0 * k) <= tol)


def gamma_R(s):
    """pi^(-s/2) Gamma(s/2); PoleError on 0, -2, -4, ..."""
    arr = np.asarray(s, dtype=complex)
    bad = _pole_mask(arr)
    if np.any(bad):
        raise PoleError(f"Gamma_R has a pole at s = {arr[bad].ravel()[0]}")
    out = np.exp(-0.5 * arr * LOG_PI + _log_gamma_unchecked(0.5 * arr))
    return out[()] if out.ndim == 0 else out


def log_gamma_R(s):
    arr = np.asarray(s, dtype=complex)
    if np.any(_pole_mask(arr)):
        raise PoleError("Gamma_R pole")
    out = -0.5 * arr * LOG_PI + _log_gamma_unchecked(0.5 * arr)
    return out[()] if out.ndim == 0 else out


def rgamma_R(s):
    """1/Gamma_R(s) = pi^(s/2)/Gamma(s/2), an entire function."""
    arr = np.asarray(s, dtype=complex)
    out = np.exp(0.5 * arr * LOG_PI) * rgamma(0.5 * arr)
    return out[()] if np.ndim(out) == 0 else out


def gamma_R_residue(k: int) -> float:
    """Residue of Gamma_R at s = -2k, namely 2 (-pi)^k / k!."""
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    return 2.0 * (-math.pi) ** k / math.factorial(int(k))


def c_func(s, mu) -> complex:
    """c(s, mu) = prod_{i<j} Gamma_R(s + mu_i - mu_j)."""
    mu = _as_params(mu)
    out = 1.0 + 0j
    for i in range(mu.n):
        for j in range(i + 1, mu.n):
            arg = s + mu[i] - mu[j]
            if _pole_mask(np.asarray(arg)):
                raise PoleError(f"c-function pole from pair ({i + 1}, {j + 1})")
            out *= complex(gamma_R(arg))
    return out


@dataclass(frozen=True)
class RegularizedLSplit:
    poles: tuple[int, ...] = field(default_factory=tuple)
    regular: tuple[complex, ...] = field(default_factory=tuple)


def split_differences(nu, nu_prime, tol: float = POLE_TOL) -> RegularizedLSplit:
    """Sort the differences nu_i - nu'_j into poles (2Z<=0) and regular values."""
    nu, nu_prime = _as_params(nu), _as_params(nu_prime)
    poles: list[int] = []
    regular: list[complex] = []
    for a in nu:
        for b in nu_prime:
            d = a - b
            k = round(d.real / 2.0)
            if k <= 0 and abs(d - 2 * k) <= tol:
                poles.append(2 * k)
            else:
                regular.append(d)
    return RegularizedLSplit(tuple(poles), tuple(regular))


def L_reg(nu, nu_prime) -> complex:
    """Regularized product of Gamma_R(nu_i - nu'_j): residues replace poles."""
    nu, nu_prime = _as_params(nu), _as_params(nu_prime)
    if nu.n <= nu_prime.n:
        raise ValueError("L_reg needs len(nu) > len(nu_prime)")
    split = split_differences(nu, nu_prime)
    out = 1.0 + 0j
    for p in split.poles:
        out *= gamma_R_residue(-p // 2)
    for b in split.regular:
        out *= complex(gamma_R(b))
    return out


def analytic_conductor(mu) -> float:
    """C(pi) = prod_j (1 + |mu_j|)."""
    return float(np.prod([1.0 + abs(m) for m in _as_params(mu)]))


def L_factor(s, mu):
    """prod_i Gamma_R(s + mu_i), vectorized over s."""
    mu = _as_params(mu)
    sa = np.asarray(s, dtype=complex)
    out = np.ones(sa.shape, dtype=complex)
    for i, m in enumerate(mu):
        if np.any(_pole_mask(sa + m)):
            raise PoleError(f"L-factor pole from parameter index {i + 1}")
        out = out * gamma_R(sa + m)
    return out[()] if out.ndim == 0 else out


def log_L_factor(s, mu):
    mu = _as_params(mu)
    sa = np.asarray(s, dtype=complex)
    out = np.zeros(sa.shape, dtype=complex)
    for i, m in enumerate(mu):
        if np.any(_pole_mask(sa + m)):
            raise PoleError(f"L-factor pole from parameter index {i + 1}")
        out = out + log_gamma_R(sa + m)
    return out


def gamma_factor(s, mu):
    """gamma(s, pi_mu) = eps * L(1-s, -mu) / L(s, mu)."""
    mu = _as_params(mu)
    sa = np.asarray(s, dtype=complex)
    try:
        num = log_L_factor(1.0 - sa, mu.dual())
    except PoleError as exc:
        raise PoleError(f"gamma factor numerator: {exc}") from None
    try:
        den = log_L_factor(sa, mu)
    except PoleError as exc:
        raise PoleError(f"gamma factor denominator: {exc}") from None
    out = EPSILON_SPHERICAL * np.exp(num - den)
    return out[()] if out.ndim == 0 else out


def rs_params(mu_Pi, mu_pi) -> LanglandsParams:
    """Parameters of the Rankin-Selberg product: all sums mu_Pi,i + mu_pi,j."""
    A, B = _as_params(mu_Pi), _as_params(mu_pi)
    return LanglandsParams(a + b for a in A for b in B)


def theta(s, mu_Pi):
    """Theta(s, Pi) = C(Pi)^(-s) / gamma(1/2 + s, Pi), vectorized over s."""
    mu = _as_params(mu_Pi)
    sa = np.asarray(s, dtype=complex)
    th = mu.theta()
    if np.any(np.real(sa) <= -0.5 + th):
        raise PoleError("theta needs Re(s) > -1/2 + theta")
    C = analytic_conductor(mu)
    logv = -sa * math.log(C) + log_L_factor(0.5 + sa, mu) - log_L_factor(0.5 - sa, mu.dual())
    out = np.exp(logv) / EPSILON_SPHERICAL
    return out[()] if out.ndim == 0 else out


def theta_tuple(mu, mu_Pi) -> complex:
    """Theta(mu, Pi) = C(Pi)^(-sum mu) gamma(1/2, Pi x pi_mu~)."""
    mu, Pi = _as_params(mu), _as_params(mu_Pi)
    if any(m.real < 0 for m in mu):
        raise ValueError("theta_tuple needs Re(mu_i) >= 0")
    C = analytic_conductor(Pi)
    rs = rs_params(Pi, mu.dual())
    return complex(C ** (-sum(mu.mu)) * gamma_factor(0.5, rs))


@dataclass(frozen=True)
class TensorBound:
    lower: float
    value: float
    upper: float
    holds: bool
    exact: bool  # True when the comparison ran in rational arithmetic


def _collinear(values) -> bool:
    return all(v.real == 0 for v in values) or all(v.imag == 0 for v in values)


def _exact_conductor(values) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= 1 + abs(Fraction(v.real) + Fraction(v.imag))
    return out


def conductor_tensor_bound(mu_Pi, mu_pi) -> TensorBound:
    """C(Pi)^n / C(pi)^(n+1) <= C(Pi x pi) <= C(Pi)^n C(pi)^(n+1), Pi on GL(n+1), pi on GL(n).

    Both sides follow from 1 + |a + b| <= (1 + |a|)(1 + |b|). When every
    parameter lies on one axis the float inputs are compared as exact
    rationals, so equality cases (e.g. Pi trivial) cannot flip on rounding.
    """
    Pi, pi = _as_params(mu_Pi), _as_params(mu_pi)
    if Pi.n != pi.n + 1:
        raise ValueError("expected Pi on GL(n+1) and pi on GL(n)")
    n = pi.n
    cP, cp = analytic_conductor(Pi), analytic_conductor(pi)
    value = analytic_conductor(rs_params(Pi, pi))
    lower, upper = cP ** n / cp ** (n + 1), cP ** n * cp ** (n + 1)
    exact = _collinear(Pi.mu + pi.mu)
    if exact:
        eP, ep = _exact_conductor(Pi), _exact_conductor(pi)
        # sums of exact rationals, so no rounding enters C(Pi x pi) either
        ev = Fraction(1)
        for a in Pi:
            for b in pi:
                ev *= 1 + abs(Fraction(a.real) + Fraction(b.real) + Fraction(a.imag)
                              + Fraction(b.imag))
        holds = eP ** n / ep ** (n + 1) <= ev <= eP ** n * ep ** (n + 1)
    else:
        slack = 8 * np.finfo(float).eps * (Pi.n * pi.n + 2 * n + 2)
        holds = lower * (1 - slack) <= value <= upper * (1 + slack)
    return TensorBound(lower, value, upper, bool(holds), exact)


def tensor_bound_draws(n: int, draws: int = 1000, seed: int = 0, scale: float = 50.0) -> int:
    """Number of seeded imaginary draws (Pi on GL(n+1), pi on GL(n)) violating the bound."""
    rng = np.random.Generator(np.random.Philox(key=int(seed) % (1 << 64)))
    bad = 0
    for _ in range(draws):
        a = 1j * rng.uniform(-scale, scale, n + 1)
        b = 1j * rng.uniform(-scale, scale, n)
        if not conductor_tensor_bound(a, b).holds:
            bad += 1
    return bad
