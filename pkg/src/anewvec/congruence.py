"""Archimedean congruence sets K_0(X, tau), K_1(X, tau) and majorants on them.

Block form g = [[a, b], [c, d]] with a of size (n-1)x(n-1) and d a scalar.
Membership uses the max-absolute-entry norm:

    |a - 1| < tau,  |b| < tau,  |c| < tau/X,  |d - 1| < tau   (star = 0)
    same, with |d - 1| < tau/X                                  (star = 1)

Haar measure is |det g|^(-n) prod dg_ij. Monte Carlo runs draw uniformly
from the coordinate box and weight by that density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SINGULAR_TOL = 1e-12
DEFAULT_SUBSTREAMS = 8


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class CongruenceBox:
    n: int
    X: float
    tau: float
    star: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not self.X >= 1.0:
            raise ValueError("X must be >= 1")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.star not in (0, 1):
            raise ValueError("star must be 0 or 1")

    def with_tau(self, tau: float) -> "CongruenceBox":
        return CongruenceBox(self.n, self.X, tau, self.star)

    def half_widths(self) -> np.ndarray:
        """Per-entry half-widths of the coordinate box, as an n x n array."""
        n = self.n
        w = np.full((n, n), self.tau)
        w[n - 1, : n - 1] = self.tau / self.X
        if self.star == 1:
            w[n - 1, n - 1] = self.tau / self.X
        return w

    def box_volume(self) -> float:
        return float(np.prod(2.0 * self.half_widths()))

    def volume_exponent(self) -> int:
        """A with vol(K_*(X, tau)) of order X^(-A)."""
        return self.n - 1 + self.star


def _check_matrix(g, n: int | None = None) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("expected a square matrix")
    if n is not None and g.shape[0] != n:
        raise ValueError(f"expected an {n}x{n} matrix")
    if abs(np.linalg.det(g)) <= SINGULAR_TOL:
        raise SingularMatrixError("matrix is singular")
    return g


def _contains_batch(gs: np.ndarray, box: CongruenceBox) -> np.ndarray:
    dev = np.abs(gs - np.eye(box.n))
    return np.all(dev < box.half_widths(), axis=(-2, -1))


def k_contains(g, box: CongruenceBox) -> bool:
    g = _check_matrix(g, box.n)
    return bool(_contains_batch(g[None], box)[0])


def haar_density(g) -> float:
    g = _check_matrix(g)
    return float(abs(np.linalg.det(g)) ** (-g.shape[0]))


def _streams(seed: int, count: int) -> list[np.random.Generator]:
    base = np.random.Philox(key=int(seed) % (1 << 64))
    return [np.random.Generator(base.jumped(i + 1)) for i in range(count)]


def _split(samples: int, count: int) -> list[int]:
    q, r = divmod(samples, count)
    return [q + (i < r) for i in range(count)]


def sample_box(box: CongruenceBox, samples: int, rng: np.random.Generator) -> np.ndarray:
    w = box.half_widths()
    u = rng.uniform(-1.0, 1.0, size=(samples, box.n, box.n))
    return np.eye(box.n) + u * w


def _weights(gs: np.ndarray) -> np.ndarray:
    det = np.abs(np.linalg.det(gs))
    out = np.zeros_like(det)
    ok = det > SINGULAR_TOL
    out[ok] = det[ok] ** (-gs.shape[-1])
    return out


def _mc_mean(fn: Callable[[np.ndarray], np.ndarray], box: CongruenceBox, samples: int,
             seed: int, substreams: int, chunk: int = 200_000) -> tuple[float, float]:
    # per-substream sums, merged in fixed order
    s1 = 0.0
    s2 = 0.0
    for rng, m in zip(_streams(seed, substreams), _split(samples, substreams)):
        left = m
        while left > 0:
            k = min(chunk, left)
            vals = fn(sample_box(box, k, rng))
            s1 += math.fsum(vals)
            s2 += math.fsum(vals * vals)
            left -= k
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples)


def volume_mc(box: CongruenceBox, samples: int, seed: int,
              substreams: int = DEFAULT_SUBSTREAMS) -> tuple[float, float]:
    """Haar volume of K_*(X, tau) with its Monte Carlo standard error."""
    if samples < 10_000:
        raise ValueError("volume_mc needs at least 1e4 samples")
    mean, err = _mc_mean(_weights, box, samples, seed, substreams)
    vol = box.box_volume()
    return mean * vol, err * vol


def probe_element(box: CongruenceBox, tau1: float, kind: str = "unipotent") -> np.ndarray:
    """A fixed element of K_*(X, tau1).

    kind="unipotent": lower unipotent with c-entries at half the c-bound, the
    direction squeezed by X. kind="corner": every entry pushed halfway to the
    boundary with alternating signs.
    """
    probe = box.with_tau(tau1)
    w = probe.half_widths()
    if kind == "unipotent":
        g = np.eye(box.n)
        g[box.n - 1, : box.n - 1] = 0.5 * w[box.n - 1, : box.n - 1]
        return g
    if kind == "corner":
        signs = np.ones((box.n, box.n))
        signs[::2, 1::2] = -1.0
        signs[1::2, ::2] = -1.0
        return np.eye(box.n) + 0.5 * signs * w
    raise ValueError("kind must be 'unipotent' or 'corner'")


def folner_ratio(g, box: CongruenceBox, tau1: float, samples: int = 200_000, seed: int = 0,
                 substreams: int = DEFAULT_SUBSTREAMS) -> float:
    """vol(gA sym-diff A) / vol(A) for A = K_*(X, tau)."""
    g = _check_matrix(g, box.n)
    if not 0.0 < tau1 < 1.0 or not k_contains(g, box.with_tau(tau1)):
        raise ValueError("g must lie in K_*(X, tau1)")
    ginv = np.linalg.inv(g)

    # left translation preserves Haar measure, so the symmetric difference is 2 vol(A \ gA)
    def lost(gs):
        w = _weights(gs)
        return w * ~_contains_batch(ginv @ gs, box)

    num, _ = _mc_mean(lost, box, samples, seed, substreams)
    den, _ = _mc_mean(_weights, box, samples, seed, substreams)
    return 2.0 * num / den


def product_stability(box: CongruenceBox, pairs: int = 1000, seed: int = 0) -> int:
    """Count of seeded pairs g1, g2 in K_0(X, tau/4) whose product leaves K_0(X, tau)."""
    quarter = box.with_tau(box.tau / 4.0)
    rng = _streams(seed, 1)[0]
    g1 = sample_box(quarter, pairs, rng)
    g2 = sample_box(quarter, pairs, rng)
    return int(np.count_nonzero(~_contains_batch(g1 @ g2, box)))


def _plateau(x: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """Smooth even profile: 1 on |x| <= inner, 0 on |x| >= outer."""
    ax = np.abs(x)
    u = np.clip((ax - inner) / (outer - inner), 0.0, 1.0)

    def psi(v):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)

    return psi(1.0 - u) / (psi(1.0 - u) + psi(u))


@dataclass(frozen=True)
class Majorant:
    """Normalized majorant F_X = X^(n-1) F_1 with the c-block rescaled by X."""

    n: int
    X: float
    tau: float = 0.1
    inner_ratio: float = 0.5

    def __post_init__(self):
        CongruenceBox(self.n, self.X, self.tau, 0)
        if not 0.0 < self.inner_ratio < 1.0:
            raise ValueError("inner_ratio must lie in (0, 1)")

    @property
    def box(self) -> CongruenceBox:
        return CongruenceBox(self.n, self.X, self.tau, 0)

    @property
    def inner_tau(self) -> float:
        return self.inner_ratio * self.tau

    def base_profile(self, gs: np.ndarray) -> np.ndarray:
        dev = gs - np.eye(self.n)
        vals = _plateau(dev, self.inner_tau, self.tau)
        return np.prod(vals, axis=(-2, -1))

    def evaluate_batch(self, gs: np.ndarray) -> np.ndarray:
        scaled = np.array(gs, dtype=float, copy=True)
        scaled[..., self.n - 1, : self.n - 1] *= self.X
        return self.X ** (self.n - 1) * self.base_profile(scaled)


def majorant_eval(m: Majorant, g) -> float:
    g = _check_matrix(g, m.n)
    return float(m.evaluate_batch(g[None])[0])


def majorant_mass(m: Majorant, samples: int = 200_000, seed: int = 0,
                  substreams: int = DEFAULT_SUBSTREAMS) -> tuple[float, float]:
    """Haar integral of F_X with its standard error."""
    box = m.box
    mean, err = _mc_mean(lambda gs: m.evaluate_batch(gs) * _weights(gs), box, samples, seed,
                         substreams)
    vol = box.box_volume()
    return mean * vol, err * vol


def majorant_convolve(m1: Majorant, m2: Majorant, g, samples: int = 100_000,
                      seed: int = 0, substreams: int = DEFAULT_SUBSTREAMS) -> float:
    """Monte Carlo value of the integral of m1(h) m2(g h) dh."""
    if m1.X != m2.X or m1.n != m2.n:
        raise ValueError("majorants must share n and X")
    g = _check_matrix(g, m1.n)
    box = m1.box

    def integrand(hs):
        return m1.evaluate_batch(hs) * m2.evaluate_batch(g @ hs) * _weights(hs)

    mean, _ = _mc_mean(integrand, box, samples, seed, substreams)
    return max(mean * box.box_volume(), 0.0)


def convolution_support_box(m1: Majorant, m2: Majorant) -> CongruenceBox:
    """A box certain to contain the support of m1 * m2 (for tau small)."""
    t = min(0.999, 3.0 * max(m1.tau, m2.tau))
    return CongruenceBox(m1.n, m1.X, t, 0)


def convolution_mass(m1: Majorant, m2: Majorant, samples: int = 200_000,
                     seed: int = 0, substreams: int = DEFAULT_SUBSTREAMS) -> tuple[float, float]:
    """Haar integral over g of (m1 * m2)(g), by joint sampling of (g, h)."""
    outer = convolution_support_box(m1, m2)
    inner = m1.box
    streams = _streams(seed, substreams)
    vals = []
    for rng, k in zip(streams, _split(samples, substreams)):
        gs = sample_box(outer, k, rng)
        hs = sample_box(inner, k, rng)
        vals.append(m1.evaluate_batch(hs) * m2.evaluate_batch(gs @ hs)
                    * _weights(hs) * _weights(gs))
    v = np.concatenate(vals)
    scale = outer.box_volume() * inner.box_volume()
    return float(v.mean() * scale), float(v.std() / math.sqrt(v.size) * scale)
