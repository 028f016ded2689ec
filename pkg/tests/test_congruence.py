import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anewvec.congruence import (
    CongruenceBox,
    Majorant,
    SingularMatrixError,
    convolution_mass,
    folner_ratio,
    haar_density,
    k_contains,
    majorant_convolve,
    majorant_eval,
    majorant_mass,
    probe_element,
    product_stability,
    volume_mc,
)

TAU = 0.1
# high-sample run (2e6 draws, seed 0), frozen
V1_N2_X1 = 0.0016320325071563625


@pytest.mark.parametrize("kw", [dict(n=1, X=1.0, tau=0.1), dict(n=2, X=0.5, tau=0.1),
                                dict(n=2, X=1.0, tau=1.0), dict(n=2, X=1.0, tau=0.1, star=2)])
def test_box_rejects_bad_fields(kw):
    with pytest.raises(ValueError):
        CongruenceBox(**kw)


def test_identity_is_member():
    for star in (0, 1):
        assert k_contains(np.eye(3), CongruenceBox(3, 7.0, TAU, star))


def test_c_entry_outside():
    X = 10.0
    g = np.eye(2)
    g[1, 0] = 2 * TAU / X
    assert not k_contains(g, CongruenceBox(2, X, TAU))


def test_lower_unipotent_inside():
    X = 10.0
    g = np.eye(2)
    g[1, 0] = TAU / (2 * X)
    assert k_contains(g, CongruenceBox(2, X, TAU))


def test_star_one_squeezes_d():
    X = 10.0
    g = np.eye(2)
    g[1, 1] = 1 + TAU / 2
    assert k_contains(g, CongruenceBox(2, X, TAU, 0))
    assert not k_contains(g, CongruenceBox(2, X, TAU, 1))


def test_membership_rejects_singular():
    with pytest.raises(SingularMatrixError):
        k_contains(np.zeros((2, 2)), CongruenceBox(2, 1.0, TAU))


@pytest.mark.parametrize("g,expected", [(np.eye(2), 1.0), (2 * np.eye(2), 1 / 16),
                                        (np.diag([1.0, 3.0]), 1 / 9)])
def test_haar_density(g, expected):
    assert haar_density(g) == pytest.approx(expected, rel=1e-15)


def test_haar_density_singular():
    with pytest.raises(SingularMatrixError):
        haar_density([[1.0, 2.0], [2.0, 4.0]])


def test_volume_needs_samples():
    with pytest.raises(ValueError):
        volume_mc(CongruenceBox(2, 1.0, TAU), 5000, 0)


def test_volume_deterministic_and_frozen():
    box = CongruenceBox(2, 1.0, TAU)
    a = volume_mc(box, 200_000, 0)
    assert a == volume_mc(box, 200_000, 0)
    assert abs(a[0] - V1_N2_X1) <= 3 * a[1] + 3 * 1.9e-7


def test_volume_depends_on_seed_only_through_noise():
    box = CongruenceBox(2, 1.0, TAU)
    a, ea = volume_mc(box, 100_000, 1)
    b, eb = volume_mc(box, 100_000, 2)
    assert a != b
    assert abs(a - b) <= 4 * math.hypot(ea, eb)


def _scaled_pair(star):
    v1, e1 = volume_mc(CongruenceBox(2, 1.0, TAU, star), 200_000, 0)
    v100, e100 = volume_mc(CongruenceBox(2, 100.0, TAU, star), 200_000, 0)
    k = 100.0 ** (1 + star)
    return v1, e1, v100 * k, e100 * k


def test_volume_scaling_star0_within_noise():
    v1, e1, s, es = _scaled_pair(0)
    assert abs(s - v1) <= 3 * math.hypot(e1, es)


def test_volume_scaling_star1_within_five_percent():
    # |det|^-n varies with d over the X = 1 box, so X^2 vol is only asymptotically flat
    v1, _, s, _ = _scaled_pair(1)
    assert abs(s - v1) / v1 < 0.05


def test_product_stability():
    for n in (2, 3):
        for X in (1.0, 10.0, 100.0):
            assert product_stability(CongruenceBox(n, X, TAU), pairs=1000, seed=0) == 0


def test_folner_identity_is_zero():
    box = CongruenceBox(2, 50.0, TAU)
    assert folner_ratio(np.eye(2), box, TAU / 32, samples=20_000) == 0.0


def test_folner_precondition():
    box = CongruenceBox(2, 50.0, TAU)
    g = probe_element(box, TAU / 2)
    with pytest.raises(ValueError):
        folner_ratio(g, box, TAU / 32)


@pytest.mark.parametrize("X", [1.0, 50.0])
def test_folner_small_and_decreasing(X):
    box = CongruenceBox(2, X, TAU)
    ratios = [folner_ratio(probe_element(box, TAU / k), box, TAU / k, samples=100_000)
              for k in (2, 8, 100)]
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[2] < 0.1


def test_folner_inverse_symmetry():
    box = CongruenceBox(2, 50.0, TAU)
    g = probe_element(box, TAU / 32)
    N = 100_000
    a = folner_ratio(g, box, TAU / 32, samples=N)
    b = folner_ratio(np.linalg.inv(g), box, TAU / 32, samples=N)
    # binomial standard error of each ratio
    err = 2.0 * math.sqrt(max(a, b) / 2.0 / N)
    assert abs(a - b) <= 3 * math.sqrt(2) * err


def test_corner_probe_in_box():
    box = CongruenceBox(3, 10.0, TAU)
    assert k_contains(probe_element(box, TAU / 4, kind="corner"), box.with_tau(TAU / 4))
    with pytest.raises(ValueError):
        probe_element(box, TAU / 4, kind="diagonal")


def test_majorant_identity_value():
    for X in (1.0, 10.0):
        m = Majorant(2, X)
        assert majorant_eval(m, np.eye(2)) == pytest.approx(X)


def test_majorant_support():
    m = Majorant(2, 10.0)
    g = np.eye(2)
    g[1, 0] = 1.5 * TAU / 10.0
    assert majorant_eval(m, g) == 0.0
    g[1, 0] = 0.4 * TAU / 10.0
    assert majorant_eval(m, g) == pytest.approx(10.0)


@given(st.lists(st.floats(-0.2, 0.2), min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_majorant_nonnegative_and_supported(entries):
    m = Majorant(2, 10.0)
    g = np.eye(2) + np.array(entries).reshape(2, 2) * [[1, 1], [0.1, 1]]
    if abs(np.linalg.det(g)) < 1e-6:
        return
    val = majorant_eval(m, g)
    assert val >= 0.0
    if val > 0:
        assert k_contains(g, m.box)


def test_majorant_mass_independent_of_x():
    masses = [majorant_mass(Majorant(2, X), samples=100_000)[0] for X in (1.0, 10.0, 100.0)]
    assert max(masses) / min(masses) < 1.01


def test_convolution_support_and_positivity():
    m = Majorant(2, 10.0)
    assert majorant_convolve(m, m, np.eye(2), samples=20_000) > 0.0
    far = np.array([[1.0, 0.0], [0.5, 1.0]])
    assert majorant_convolve(m, m, far, samples=20_000) == 0.0


def test_convolution_requires_same_x():
    with pytest.raises(ValueError):
        majorant_convolve(Majorant(2, 1.0), Majorant(2, 10.0), np.eye(2))


def test_convolution_mass_independent_of_x():
    masses = [convolution_mass(Majorant(2, X), Majorant(2, X), samples=100_000)
              for X in (1.0, 10.0, 100.0)]
    vals = [v for v, _ in masses]
    errs = [e for _, e in masses]
    assert max(vals) - min(vals) <= 3 * max(errs)
