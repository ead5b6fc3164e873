import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loggas import (
    Configuration,
    DegenerateConfigError,
    breakdown,
    discrepancy,
    energy,
    gradient,
    model_constants,
    quadratic,
    quartic,
    semicircle_equilibrium,
)

MU = semicircle_equilibrium()
V2 = quadratic()
CONSTS = model_constants(MU, V2)
INV_SQRT2 = 1.0 / math.sqrt(2.0)


def sorted_config(rng, n, scale=1.2, gap=0.01):
    # additive ramp guarantees the minimum gap without rejection
    pts = np.sort(rng.normal(0.0, scale, n)) + gap * np.arange(n)
    return Configuration(pts)


def test_two_point_value():
    cfg = Configuration(np.array([-INV_SQRT2, INV_SQRT2]))
    assert energy(cfg, V2) == pytest.approx(1.0 - math.log(2.0), rel=1e-14)


def test_single_point():
    assert energy(Configuration(np.array([0.0])), V2) == 0.0
    assert energy(Configuration(np.array([1.5])), V2) == pytest.approx(1.125, rel=1e-14)
    g = gradient(Configuration(np.array([1.5])), V2)
    assert g.shape == (1,)
    assert g[0] == pytest.approx(1.5, rel=1e-14)


def test_coincident_points_rejected():
    with pytest.raises(DegenerateConfigError):
        Configuration(np.array([0.3, 0.3]))
    with pytest.raises(ValueError):
        Configuration(np.array([1.0, 0.0]))  # unsorted is a usage error
    # a subnormal but nonzero gap is still a valid (huge) energy
    assert np.isfinite(energy(Configuration(np.array([0.0, 1e-300])), V2))


def test_gradient_zero_at_two_point_minimizer():
    cfg = Configuration(np.array([-INV_SQRT2, INV_SQRT2]))
    assert np.max(np.abs(gradient(cfg, V2))) <= 1e-12


def test_gradient_antisymmetric_for_mirrored_pair():
    # even V: mirror symmetry flips the gradient componentwise
    for v in (V2, quartic()):
        cfg = Configuration(np.array([-1.3, 0.4]))
        mirrored = Configuration(np.array([-0.4, 1.3]))
        g = gradient(cfg, v)
        gm = gradient(mirrored, v)
        assert np.allclose(g, -gm[::-1], rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("n", [3, 10, 50])
def test_gradient_matches_finite_differences(n):
    rng = np.random.default_rng(4000 + n)
    for _ in range(4):
        cfg = sorted_config(rng, n)
        g = gradient(cfg, V2)

        def at(i, dx):
            pts = cfg.points.copy()
            pts[i] += dx
            return energy(Configuration(pts), V2)

        for i in rng.choice(n, size=min(3, n), replace=False):
            # fourth-order stencil keeps truncation below the target even
            # when a neighbor sits close and the third derivative blows up
            h = 1e-4 * max(1.0, abs(cfg.points[i]))
            fd = (8.0 * (at(i, h) - at(i, -h)) - (at(i, 2 * h) - at(i, -2 * h))) / (12.0 * h)
            assert abs(fd - g[i]) / max(abs(g[i]), 1e-8) <= 1e-6


def test_breakdown_two_point():
    cfg = Configuration(np.array([-INV_SQRT2, INV_SQRT2]))
    b = breakdown(cfg, V2, MU, CONSTS)
    # (w_2 - 4 F + 2 log 2) / 2 with w_2 = 1 - log 2 and F = 3/4
    assert b.f_n == pytest.approx((math.log(2.0) - 2.0) / 2.0, rel=1e-12)
    assert b.zeta_sum == pytest.approx(0.0, abs=1e-12)
    assert b.f_hat == pytest.approx(b.f_n, rel=1e-12)


@pytest.mark.parametrize("n", [2, 16, 128, 512])
def test_breakdown_reassembles(n):
    rng = np.random.default_rng(n)
    cfg = sorted_config(rng, n, scale=1.5, gap=1e-4)
    b = breakdown(cfg, V2, MU, CONSTS)
    w = b.leading - b.log_term + n * b.f_n
    assert w == pytest.approx(b.w_n, rel=1e-9)
    assert b.w_n == pytest.approx(energy(cfg, V2), rel=1e-12)


@settings(deadline=None, max_examples=25)
@given(st.integers(2, 40), st.integers(0, 10_000))
def test_f_hat_below_f_n(n, seed):
    rng = np.random.default_rng(seed)
    cfg = sorted_config(rng, n, scale=2.0, gap=1e-3)
    b = breakdown(cfg, V2, MU, CONSTS)
    assert b.f_hat <= b.f_n + 1e-12
    assert b.zeta_sum >= -1e-12


def test_discrepancy_conventions():
    n = 10
    cfg = Configuration(np.linspace(5.0, 6.0, n))  # far from the window
    # window centered at 0 with radius R/n = 1: mass of [-1, 1]
    mass = MU.interval_mass(-1.0, 1.0)
    assert discrepancy(cfg, MU, 0.0, n * 1.0) == pytest.approx(-n * mass, rel=1e-12)
    # far window sees neither points nor mass
    assert discrepancy(cfg, MU, 40.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        discrepancy(cfg, MU, 0.0, -1.0)


def test_discrepancy_quantiles_balanced():
    # quantile points track the measure: every window within one particle
    n = 64
    cfg = Configuration(MU.quantiles(n))
    rng = np.random.default_rng(7)
    for _ in range(40):
        x0 = rng.uniform(-2.2, 2.2)
        R = rng.uniform(0.1, 3.0) * n / 2.0
        assert abs(discrepancy(cfg, MU, x0, R)) <= 1.0 + 1e-9


def test_discrepancy_boundary_points_count():
    cfg = Configuration(np.array([-1.0, 0.0, 1.0]))
    d = discrepancy(cfg, MU, 0.0, 3.0)  # radius 1, closed interval
    assert d == pytest.approx(3 - 3 * MU.interval_mass(-1.0, 1.0), rel=1e-12)
