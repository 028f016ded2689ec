import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anewvec.errors import CalibrationError, ContourTailError, RegimeError
from anewvec.numerics import VerticalContour
from anewvec.whittaker import (
    D2,
    KAPPA2,
    DiagonalPoint,
    calibrate_gl2_norm,
    calibrate_kappa2,
    delta_half,
    jacquet_gl2,
    stade_gl2_mellin_barnes,
    stade_norm_residual,
    whittaker_gl2,
    whittaker_gl2_prime,
    whittaker_gl3,
)

from oracles import WHITTAKER_GL2

# sqrt(8/pi) K_0(2 pi), 30-digit mpmath
W00_AT_ONE = 0.0014626570204779171


def test_diagonal_point_positive():
    with pytest.raises(ValueError):
        DiagonalPoint((1.0, 0.0))
    with pytest.raises(ValueError):
        DiagonalPoint(())
    assert DiagonalPoint((2.0, 3.0)).scaled(2.0).a == (4.0, 6.0)


@pytest.mark.parametrize("a,expected", [((1, 1), 1.0), ((4, 1), 2.0),
                                        ((1, 2, 4), math.sqrt(0.5 * 0.25 * 0.5))])
def test_delta_half(a, expected):
    assert delta_half(a) == pytest.approx(expected, rel=1e-15)


def test_gl2_reference_value():
    assert whittaker_gl2((0, 0), (1, 1)) == pytest.approx(W00_AT_ONE, rel=1e-12)


@pytest.mark.parametrize("key", sorted(WHITTAKER_GL2))
def test_gl2_oracles(key):
    t, y = key
    assert whittaker_gl2((1j * t, -1j * t), (y, 1)).real == pytest.approx(WHITTAKER_GL2[key],
                                                                            rel=1e-10)


@given(st.floats(0.0, 30.0), st.floats(0.01, 3.0))
@settings(max_examples=40, deadline=None)
def test_gl2_real_on_imaginary_params(t, y):
    w = whittaker_gl2((1j * t, -1j * t), (y, 1))
    assert abs(w.imag) <= 1e-12 * max(abs(w), 1e-300)


@given(st.floats(-0.9, 0.9), st.floats(0.0, 20.0), st.floats(0.05, 4.0), st.floats(0.2, 5.0))
@settings(max_examples=40, deadline=None)
def test_gl2_weyl_invariance(re, im, a1, a2):
    mu = (re + 1j * im, -re - 1j * im)
    w = whittaker_gl2(mu, (a1, a2))
    ws = whittaker_gl2(mu[::-1], (a1, a2))
    assert abs(w - ws) <= 1e-10 * abs(w) + 1e-300


@given(st.floats(0.2, 5.0))
@settings(max_examples=30, deadline=None)
def test_gl2_central_twist(z):
    mu = (0.3 + 2j, 0.1 - 1j)
    a = DiagonalPoint((0.4, 0.9))
    lhs = whittaker_gl2(mu, a.scaled(z))
    rhs = z ** (mu[0] + mu[1]) * whittaker_gl2(mu, a)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_gl2_super_exponential_decay():
    mu = (2j, -2j)
    vals = [abs(whittaker_gl2(mu, (y, 1 / y))) for y in (1.0, 1.5, 2.0)]
    for y, v in zip((1.0, 1.5, 2.0), vals):
        assert v <= delta_half((y, 1 / y)) * math.exp(-2 * math.pi * y * y) * 10 * (1 + y) ** 4
    assert vals[0] > vals[1] > vals[2]


def test_gl2_flank_bound():
    # for y < 1, |W'(diag(y,1))| y^(-|Re nu|) stays bounded as y -> 0
    mu = (0.3 + 1j, -0.3 - 1j)
    ys = np.geomspace(1e-5, 1e-1, 9)
    ratios = [abs(whittaker_gl2_prime(mu, (y, 1))) * y ** 0.3 for y in ys]
    assert max(ratios) / min(ratios) < 2.0


def test_gl2_rejects_wrong_shape():
    with pytest.raises(ValueError):
        whittaker_gl2((0, 0, 0), (1, 1))
    with pytest.raises(ValueError):
        whittaker_gl2((0, 0), (1, 1, 1))


def test_calibration_recovers_d2():
    norm = calibrate_gl2_norm([1.0, 5.0, 10.0])
    assert norm.d2 == pytest.approx(D2, rel=1e-6)
    assert norm.spread < 1e-5
    assert norm.kappa2 == pytest.approx(KAPPA2, rel=1e-6)


def test_calibration_errors():
    with pytest.raises(ValueError):
        calibrate_gl2_norm([])
    with pytest.raises(ValueError):
        calibrate_gl2_norm([0.0, 1.0])
    with pytest.raises(CalibrationError):
        calibrate_gl2_norm([1.0, 5.0], rel_spread=0.0)


@pytest.mark.parametrize("t", [1.0, 5.0, 10.0])
def test_stade_norm(t):
    assert stade_norm_residual(t) <= 1e-6


def test_jacquet_real_order():
    mu = (0.6, -0.6)
    assert jacquet_gl2(mu, (1, 1)) == pytest.approx(whittaker_gl2(mu, (1, 1)), rel=1e-6)


def test_jacquet_complex_order():
    mu = (0.6 + 5j, -0.6 - 5j)
    assert abs(jacquet_gl2(mu, (1, 1)) - whittaker_gl2(mu, (1, 1))) <= 1e-5 * abs(
        whittaker_gl2(mu, (1, 1)))


def test_jacquet_regime():
    with pytest.raises(RegimeError):
        jacquet_gl2((0, 0), (1, 1))


@pytest.mark.parametrize("nu,a", [((0, 0), (1, 1)), ((5j, -5j), (0.5, 2)),
                                  ((0.3, 0.1 + 2j), (3.0, 1.0))])
def test_mellin_barnes_matches_bessel(nu, a):
    mb = stade_gl2_mellin_barnes(nu, a)
    w = whittaker_gl2(nu, a)
    assert abs(mb - w) <= 1e-7 * abs(w)


def test_mellin_barnes_tail_diagnostic():
    with pytest.raises(ContourTailError):
        stade_gl2_mellin_barnes((0, 0), (1, 1), VerticalContour(0.0, 1e-9, 16))


def test_mellin_barnes_regime():
    with pytest.raises(RegimeError):
        stade_gl2_mellin_barnes((-0.2, 0.2), (1, 1))
    with pytest.raises(RegimeError):
        stade_gl2_mellin_barnes((0, 0), (1, 1), VerticalContour(0.6, 40.0, 256))


def test_kappa_calibration():
    assert calibrate_kappa2() == pytest.approx(KAPPA2, rel=1e-10)
    assert calibrate_kappa2((2j, -2j), (0.7, 1.1)) == pytest.approx(KAPPA2, rel=1e-8)


NU3 = (0.02, 0.01, -0.03)


def test_gl3_node_doubling():
    v1 = whittaker_gl3(NU3, (1, 1, 1))
    v2 = whittaker_gl3(NU3, (1, 1, 1), VerticalContour(0.0, 30.0, 1201))
    assert np.isfinite(abs(v1)) and abs(v1) > 0
    assert abs(v1 - v2) <= 1e-6 * abs(v1)


def test_gl3_weyl_permutation():
    v = whittaker_gl3(NU3, (1, 1, 1))
    for p in [(0.01, 0.02, -0.03), (-0.03, 0.02, 0.01)]:
        assert abs(whittaker_gl3(p, (1, 1, 1)) - v) <= 1e-5 * abs(v)


def test_gl3_decay_along_torus():
    mags = [abs(whittaker_gl3(NU3, (y, 1, 1 / y))) for y in (2.0, 4.0, 8.0)]
    assert mags[0] > 1e6 * mags[1] > 1e12 * mags[2]


def test_gl3_prime_divides_by_delta():
    a = (1.2, 1.0, 0.9)
    assert whittaker_gl3(NU3, a, prime=True) == pytest.approx(
        whittaker_gl3(NU3, a) / delta_half(a), rel=1e-14)


def test_gl3_pole_guards():
    with pytest.raises(RegimeError):
        whittaker_gl3(NU3, (1, 1, 1), VerticalContour(0.5, 30.0, 601))
    with pytest.warns(RuntimeWarning):
        whittaker_gl3(NU3, (1, 1, 1), VerticalContour(0.4695, 30.0, 601))
