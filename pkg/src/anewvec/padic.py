"""Exact p-adic side: Schur polynomials, Shintani values, torus integrals.

Polynomials are dicts from exponent tuples to Fractions, so every
vanishing statement here is checked with zero tolerance.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class LaurentPoly:
    """Exact multivariate Laurent polynomial in n variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple[int, ...], Fraction | int] | None = None):
        self.n = int(n)
        clean: dict[tuple[int, ...], Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != self.n:
                raise ValueError("exponent length mismatch")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    @classmethod
    def one(cls, n: int) -> "LaurentPoly":
        return cls(n, {(0,) * n: 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "LaurentPoly":
        return cls(len(exps), {tuple(exps): coeff})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(self.n, out)

    def __neg__(self):
        return LaurentPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(self.n, {e: c * Fraction(other) for e, c in self.terms.items()})
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return LaurentPoly(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "LaurentPoly(0)"
        parts = [f"{c}*a^{e}" for e, c in sorted(self.terms.items(), reverse=True)]
        return "LaurentPoly(" + " + ".join(parts) + ")"

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.n, Fraction(0))

    def evaluate(self, point: Sequence) -> complex | Fraction:
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                term = term * x ** k
            total = total + term
        return total

    def shift(self, exps: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial a^exps."""
        return LaurentPoly(self.n, {tuple(a + b for a, b in zip(e, exps)): c
                                    for e, c in self.terms.items()})

    def conjugate_on_torus(self) -> "LaurentPoly":
        """On |a_i| = 1 the conjugate of a^e is a^(-e) (coefficients are rational)."""
        return LaurentPoly(self.n, {tuple(-x for x in e): c for e, c in self.terms.items()})

    def max_degree(self, var: int) -> int:
        return max(e[var] for e in self.terms)

    def divide_exact(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient of polynomials (nonnegative exponents); raises if inexact."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        # lexicographic leading-term division
        lead_e = max(divisor.terms)
        lead_c = divisor.terms[lead_e]
        rem = LaurentPoly(self.n, self.terms)
        quot = LaurentPoly(self.n)
        while not rem.is_zero():
            e = max(rem.terms)
            diff = tuple(a - b for a, b in zip(e, lead_e))
            if any(d < 0 for d in diff):
                raise ArithmeticError("polynomial division is not exact")
            q = LaurentPoly.monomial(diff, rem.terms[e] / lead_c)
            quot = quot + q
            rem = rem - q * divisor
        return quot


def _det(rows: list[list[LaurentPoly]]) -> LaurentPoly:
    # Leibniz expansion; n <= 4 here so n! terms are cheap
    n = len(rows)
    total = LaurentPoly(rows[0][0].n)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = LaurentPoly.one(rows[0][0].n)
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + (term if inv % 2 == 0 else -term)
    return total


def vandermonde(n: int) -> LaurentPoly:
    """prod_{i<j} (a_i - a_j)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = LaurentPoly.one(n)
    for i in range(n):
        for j in range(i + 1, n):
            ei = [0] * n
            ej = [0] * n
            ei[i] = 1
            ej[j] = 1
            out = out * (LaurentPoly.monomial(ei) - LaurentPoly.monomial(ej))
    return out


def alternant(exps: Sequence[int]) -> LaurentPoly:
    """det(a_j^(exps_i))_{i,j}."""
    n = len(exps)
    rows = []
    for e in exps:
        row = []
        for j in range(n):
            v = [0] * n
            v[j] = e
            row.append(LaurentPoly.monomial(v))
        rows.append(row)
    return _det(rows)


def is_dominant(m: Sequence[int]) -> bool:
    return all(m[i] >= m[i + 1] for i in range(len(m) - 1))


def schur(m: Sequence[int], n: int | None = None) -> LaurentPoly:
    """Schur polynomial as the bialternant det(a_j^(m_i+n-i)) / Vandermonde."""
    m = tuple(int(v) for v in m)
    n = len(m) if n is None else int(n)
    if len(m) != n:
        raise ValueError("m must have n entries")
    if not is_dominant(m):
        raise ValueError("m must be dominant (weakly decreasing)")
    low = m[-1]
    # factor out (a_1...a_n)^low so the division stays polynomial
    base = tuple(v - low for v in m)
    num = alternant([base[i] + n - 1 - i for i in range(n)])
    quot = num.divide_exact(vandermonde(n))
    return quot.shift((low,) * n)


@dataclass(frozen=True)
class PadicRepData:
    q: int
    conductor_exponent: int
    epsilon_center: complex = 1.0

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if self.conductor_exponent < 0:
            raise ValueError("conductor exponent must be nonnegative")
        if abs(abs(self.epsilon_center) - 1.0) > 1e-12:
            raise ValueError("epsilon(1/2) must have modulus one")

    @property
    def conductor(self) -> int:
        return self.q ** self.conductor_exponent


@dataclass(frozen=True)
class ShintaniValue:
    """Exact pieces of delta^(1/2)(a) s_m(alpha): value = q^(half_qpower/2) * poly(alpha)."""

    half_qpower: int
    poly: LaurentPoly | None

    def evaluate(self, q: int, alpha: Sequence[complex]) -> complex:
        if self.poly is None:
            return 0.0
        return q ** (self.half_qpower / 2.0) * complex(self.poly.evaluate(alpha))


def delta_half_exponent(m: Sequence[int]) -> int:
    """Twice the q-exponent of delta^(1/2)(diag(w^m_1, ..., w^m_n))."""
    n = len(m)
    return -sum(m[i] * (n + 1 - 2 * (i + 1)) for i in range(n))


def shintani_exact(m: Sequence[int]) -> ShintaniValue:
    m = tuple(int(v) for v in m)
    if not is_dominant(m):
        return ShintaniValue(0, None)
    return ShintaniValue(delta_half_exponent(m), schur(m))


def shintani(m: Sequence[int], alpha: Sequence[complex], rep: PadicRepData) -> complex:
    """Spherical p-adic Whittaker value at diag(w^m): zero unless m is dominant."""
    if any(abs(abs(x) - 1.0) > 1e-12 for x in alpha):
        raise ValueError("Satake parameters must have modulus one")
    return shintani_exact(m).evaluate(rep.q, alpha)


def torus_integrand(m: Sequence[int], form: str = "plancherel") -> LaurentPoly:
    """The Laurent polynomial whose constant term is the torus integral.

    form="plancherel": det(a_j^(m_i+n-i)) * conj(prod_{i<j}(a_i - a_j)),
    i.e. s_m times |Vandermonde|^2 on the unit torus.
    form="display": det(a_j^(m_i+n-i-1)) * prod_{i>j}(a_i - a_j), taken
    literally; the two agree for n = 2 and differ from n = 3 on.
    """
    m = tuple(int(v) for v in m)
    n = len(m)
    if form == "plancherel":
        alt = alternant([m[i] + n - 1 - i for i in range(n)])
        return alt * vandermonde(n).conjugate_on_torus()
    if form == "display":
        alt = alternant([m[i] + n - 2 - i for i in range(n)])
        rev = LaurentPoly.one(n)
        for i in range(n):
            for j in range(i):
                ei = [0] * n
                ej = [0] * n
                ei[i] = 1
                ej[j] = 1
                rev = rev * (LaurentPoly.monomial(ei) - LaurentPoly.monomial(ej))
        return alt * rev
    raise ValueError(f"unknown form {form!r}")


def torus_integral(m: Sequence[int], n: int | None = None, form: str = "plancherel") -> Fraction:
    """Exact integral over (S^1)^n with normalized Haar measure: the constant term."""
    m = tuple(int(v) for v in m)
    if n is not None and len(m) != n:
        raise ValueError("m must have n entries")
    if not is_dominant(m):
        raise ValueError("m must be dominant")
    return torus_integrand(m, form).constant_term()


def torus_integral_bruteforce(m: Sequence[int], form: str = "plancherel") -> Fraction:
    """Independent constant-term count: expand both factors monomial by monomial."""
    m = tuple(int(v) for v in m)
    n = len(m)
    shift = 1 if form == "plancherel" else 2
    exps = [m[i] + n - shift - i for i in range(n)]
    total = Fraction(0)
    # alternant monomials: sign(p) prod_j a_j^(exps[p^-1 j])
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        alt_e = [0] * n
        for i in range(n):
            alt_e[perm[i]] = exps[i]
        sign_a = -1 if inv % 2 else 1
        # second factor: product over pairs of (a_x - a_y), expanded by choice
        pairs = ([(i, j) for i in range(n) for j in range(i + 1, n)] if form == "plancherel"
                 else [(i, j) for i in range(n) for j in range(i)])
        for picks in itertools.product((0, 1), repeat=len(pairs)):
            e = list(alt_e)
            sign = sign_a
            for (i, j), p in zip(pairs, picks):
                var = i if p == 0 else j
                if p == 1:
                    sign = -sign
                e[var] += -1 if form == "plancherel" else 1
            if all(v == 0 for v in e):
                total += sign
    return total


def dominant_window(n: int, m1_max: int, m_min: int = -12) -> list[tuple[int, ...]]:
    out = []

    def rec(prefix, upper, left):
        if left == 0:
            out.append(tuple(prefix))
            return
        for v in range(upper, m_min - 1, -1):
            rec(prefix + [v], v, left - 1)

    for first in range(m1_max, m_min - 1, -1):
        rec([first], first, n - 1)
    return out


@dataclass(frozen=True)
class HeartScan:
    n: int
    rows: tuple[tuple[tuple[int, ...], Fraction], ...]
    threshold: int | None  # smallest t with value 0 for every scanned m with m_1 >= t

    @property
    def nonzero(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return [(m, v) for m, v in self.rows if v != 0]


def heart_vanishing_scan(n: int, m1_max: int, m_min: int = -12, form: str = "plancherel",
                         order: str = "lex") -> HeartScan:
    """Exact torus integrals over the dominant window and the vanishing threshold in m_1."""
    if n not in (2, 3):
        raise ValueError("scan supports n in {2, 3}")
    if m1_max > 12:
        raise ValueError("m1_max is capped at 12")
    ms = dominant_window(n, m1_max, m_min)
    if order == "reverse":
        ms = list(reversed(ms))
    elif order != "lex":
        raise ValueError("order must be 'lex' or 'reverse'")
    rows = tuple((m, torus_integral(m, form=form)) for m in ms)
    nz = [m[0] for m, v in rows if v != 0]
    threshold = (max(nz) + 1) if nz else None
    return HeartScan(n, tuple(sorted(rows)), threshold)


def epsilon_shift(rep: PadicRepData, beta: complex) -> complex:
    """epsilon(1/2 - beta) = C^beta epsilon(1/2)."""
    return rep.conductor ** complex(beta) * complex(rep.epsilon_center)


def epsilon_shift_product(rep: PadicRepData, betas: Iterable[complex]) -> complex:
    out = 1.0 + 0j
    for b in betas:
        out *= epsilon_shift(rep, b)
    return out


def tableaux_count(m: Sequence[int], n: int) -> int:
    """Number of semistandard Young tableaux of shape m with entries in 1..n (brute force)."""
    shape = [v for v in m if v > 0]
    cells = [(r, c) for r, length in enumerate(shape) for c in range(length)]
    count = 0
    for filling in itertools.product(range(1, n + 1), repeat=len(cells)):
        t = dict(zip(cells, filling))
        ok = all(t[(r, c)] <= t[(r, c + 1)] for (r, c) in cells if (r, c + 1) in t) and \
            all(t[(r, c)] < t[(r + 1, c)] for (r, c) in cells if (r + 1, c) in t)
        count += ok
    return count
