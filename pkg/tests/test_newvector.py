import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anewvec.errors import ContourTailError, DegenerateFitError, PoleError, RegimeError
from anewvec.newvector import (
    DECAY_GRID,
    Gl2Rep,
    KirillovVector,
    decay_fit,
    invariance_defect,
    line_height,
    majorant_bound,
    richardson_check,
    side_value,
    side_values,
    subconductor_probe,
    toy_bound,
    toy_defect,
)
from anewvec.numerics import BumpFunction, VerticalContour

V = KirillovVector()
REP10 = Gl2Rep.tempered(10.0)


def test_rep_validation():
    with pytest.raises(ValueError):
        Gl2Rep((1j, 2j))
    with pytest.raises(ValueError):
        Gl2Rep((1j, -1j, 0))
    with pytest.raises(RegimeError):
        Gl2Rep((0.6, -0.6))
    assert Gl2Rep((0.2 + 1j, -0.2 - 1j)).theta == pytest.approx(0.2)


@pytest.mark.parametrize("C", [10.0, 100.0, 1000.0])
def test_rep_with_conductor(C):
    assert Gl2Rep.with_conductor(C).conductor == pytest.approx(C, rel=1e-12)


def test_kirillov_vector_is_unit():
    v = KirillovVector(BumpFunction(center=1.3, radius=0.2, amplitude=7.0))
    assert v.bump.l2_norm_multiplicative() == pytest.approx(1.0, rel=1e-12)
    assert KirillovVector.zero().is_zero


def test_zero_vector_side_value():
    assert side_value(REP10, KirillovVector.zero(), 0.5) == 0
    assert invariance_defect(REP10, KirillovVector.zero(), 0.05) == 0


def test_pole_guard():
    with pytest.raises(PoleError):
        side_value(REP10, V, 1.0, sigma=-0.5)
    with pytest.raises(ValueError):
        side_value(REP10, V, 0.0)


def test_explicit_contour_reports_tail():
    with pytest.raises(ContourTailError):
        side_value(REP10, V, 1.0, contour=VerticalContour(0.0, 200.0, 4096))


def test_line_height_tail_error():
    with pytest.raises(ContourTailError):
        line_height(REP10, V, 0.0, floor=1e-300)


@pytest.fixture(scope="module")
def shifted_values():
    t = np.array([0.3, 1.0, 3.0])
    return {s: side_values(REP10, V, t, sigma=s) for s in (0.0, 2.0, 4.0)}


@pytest.mark.parametrize("sigma", [2.0, 4.0])
def test_contour_shift_invariance(shifted_values, sigma):
    a, b = shifted_values[0.0], shifted_values[sigma]
    assert np.max(np.abs(a - b) / np.abs(a)) <= 1e-8


def test_majorant_certificate():
    rep = Gl2Rep.tempered(20.0)
    assert abs(side_value(rep, V, 0.1, sigma=4.0)) <= majorant_bound(rep, V, 0.1, 4.0)


@pytest.mark.parametrize("M", [3, 5])
def test_constant_integrand_slope(M):
    fit = decay_fit(REP10, V, DECAY_GRID, M, integrand=np.ones_like, height=0.05, dtau=0.1)
    assert fit.slope == pytest.approx(M, abs=1e-9)


def test_decay_fit_grid_checks():
    one = np.ones_like
    with pytest.raises(ValueError):
        decay_fit(REP10, V, [1e-3, 2e-3, 5e-3], 3, integrand=one, height=0.05)
    with pytest.raises(ValueError):
        decay_fit(REP10, V, np.geomspace(1e-3, 5e-3, 5), 3, integrand=one, height=0.05)
    with pytest.raises(ValueError):
        decay_fit(REP10, V, np.geomspace(0.05, 0.5, 5), 3, integrand=one, height=0.05)


def test_decay_fit_underflow():
    with pytest.raises(DegenerateFitError):
        decay_fit(REP10, V, DECAY_GRID, 3, integrand=np.zeros_like, height=0.05)


REP100 = Gl2Rep.with_conductor(100.0)


def test_defect_at_zero():
    assert invariance_defect(REP100, V, 0.0) == 0


def test_defect_conjugate_symmetry():
    d, dm = invariance_defect(REP100, V, 0.05), invariance_defect(REP100, V, -0.05)
    assert abs(d - np.conj(dm)) <= 1e-12 * abs(d)


def test_defect_bounds_on_c():
    with pytest.raises(ValueError):
        invariance_defect(REP100, V, 1.5)


def test_defect_identity_self_check():
    from anewvec.newvector import _pipeline

    assert abs(_pipeline(REP100, V).identity_value() - V.at_one()) <= 1e-10


def test_defect_linear_regime():
    assert richardson_check(REP100, V) <= 0.05


def test_shrink_one_is_plain_defect():
    assert subconductor_probe(REP100, V, 1.0, 0.05) == invariance_defect(REP100, V, 0.05)


def test_subconductor_checks():
    with pytest.raises(ValueError):
        subconductor_probe(REP100, V, 0.0, 0.05)
    with pytest.raises(ValueError):
        subconductor_probe(REP100, V, 0.001, 0.05)


def test_subconductor_witness_and_scaling():
    rep = Gl2Rep.tempered(100.0)
    assert abs(subconductor_probe(rep, V, 0.01, 0.1)) >= 0.05
    assert abs(subconductor_probe(rep, V, 0.01, 0.001)) < 0.05


def test_toy_examples():
    assert toy_defect(0.0, 10.0) == 0.0
    assert toy_defect(10.0, 1000.0) == pytest.approx(2 * abs(math.sin(5 * math.log(1.001))),
                                                     rel=2e-3)
    with pytest.raises(ValueError):
        toy_defect(1.0, 1.0)


@given(st.floats(-200.0, 200.0), st.floats(1.5, 1e6))
@settings(max_examples=60, deadline=None)
def test_toy_bound_holds(t, X):
    assert toy_defect(t, X, points=2000) <= toy_bound(t, X) * (1 + 1e-9)
