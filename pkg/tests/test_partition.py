import math

import numpy as np
import pytest

from loggas import (
    SamplerConfig,
    mehta_log_z,
    minimize,
    model_constants,
    next_order_report,
    quadratic,
    quadrature_log_z,
    quartic,
    semicircle_equilibrium,
    thermo_log_z,
)

V2 = quadratic()
CONSTS = model_constants(semicircle_equilibrium(), V2)


def test_single_particle_closed_form():
    for beta in (0.5, 1.0, 2.0, 17.0):
        assert mehta_log_z(1, beta) == pytest.approx(math.log(2.0 * math.sqrt(math.pi / beta)), rel=1e-13)


def test_two_particle_beta_two():
    assert mehta_log_z(2, 2.0) == pytest.approx(math.log(math.pi), abs=1e-12)


def test_quadrature_agrees_at_small_n():
    # the full (n, beta) battery runs in the acceptance suite
    assert quadrature_log_z(2, 1.0, V2) == pytest.approx(mehta_log_z(2, 1.0), rel=1e-6)


def test_quadrature_rejects_large_n():
    with pytest.raises(ValueError):
        quadrature_log_z(4, 1.0, V2)


def test_laplace_slope_two_particles():
    # -2 dlogZ/dbeta -> min w_2 = 1 - log 2 as beta grows
    w_min = 1.0 - math.log(2.0)
    b1, b2 = 2000.0, 4000.0
    slope = -2.0 * (mehta_log_z(2, b2) - mehta_log_z(2, b1)) / (b2 - b1)
    assert slope == pytest.approx(w_min, abs=1e-2)
    # the same check through the quadrature route at moderate beta
    b1, b2 = 100.0, 200.0
    slope_q = -2.0 * (quadrature_log_z(2, b2, V2) - quadrature_log_z(2, b1, V2)) / (b2 - b1)
    assert slope_q == pytest.approx(w_min, abs=0.1)


def test_next_order_report_fields():
    rep = next_order_report(8, 2.0, CONSTS, mehta_log_z(8, 2.0))
    assert rep.method == "exact-quadratic"
    assert rep.n == 8 and rep.beta == 2.0
    expect = (rep.log_z + 8.0 * 8.0 * 0.75 - 8.0 * math.log(8.0)) / 16.0
    assert rep.next_order == pytest.approx(expect, rel=1e-12)
    d = rep.to_json_dict()
    assert set(d) == {"n", "beta", "log_z", "method", "next_order", "error_bar"}


def test_next_order_bounded_in_n():
    vals = [
        next_order_report(n, 2.0, CONSTS, mehta_log_z(n, 2.0)).next_order
        for n in (8, 16, 32, 64, 128, 256, 512)
    ]
    assert max(vals) - min(vals) < 0.5
    assert all(abs(v) < 1.0 for v in vals)


def test_single_particle_next_order_limit():
    # n=1: next_order -> F/2 = 0.375 from below as beta -> infinity
    no = next_order_report(1, 1e6, CONSTS, mehta_log_z(1, 1e6)).next_order
    assert no == pytest.approx(0.375, abs=1e-4)


def test_zero_temperature_matches_fekete():
    # Laplace principle: next_order -> -f_n(Fekete)/2 at beta = 1e6
    for n in (4, 8):
        f_n = minimize(n, V2, seed=0).breakdown.f_n
        no = next_order_report(n, 1e6, CONSTS, mehta_log_z(n, 1e6)).next_order
        assert no == pytest.approx(-f_n / 2.0, abs=1e-3)


def test_next_order_limit_sign():
    # regression pin: the exact quadratic oracle gives a positive limit
    no = next_order_report(256, 1e4, CONSTS, mehta_log_z(256, 1e4)).next_order
    assert no == pytest.approx(0.2510051376526506, abs=1e-9)


def test_thermo_degenerate_path():
    # V equal to the reference: every expectation is identically zero
    est, err = thermo_log_z(
        2,
        2.0,
        V2,
        sampler_cfg=SamplerConfig(n=2, beta=2.0, V=V2, steps=2_000, burn_in=500, thinning=5, chains=2, seed=1),
        grid=4,
    )
    assert est == pytest.approx(mehta_log_z(2, 2.0), abs=1e-12)
    assert err == pytest.approx(0.0, abs=1e-12)


@pytest.fixture(scope="module")
def thermo_quartic_runs():
    def one(steps, seed):
        cfg = SamplerConfig(
            n=2, beta=2.0, V=quartic(), steps=steps, burn_in=2_000, thinning=5, chains=2, seed=seed
        )
        return thermo_log_z(2, 2.0, quartic(), sampler_cfg=cfg, grid=8)

    return one(5_000, 100), one(20_000, 100)


def test_thermo_matches_quadrature(thermo_quartic_runs):
    (est, err), _ = thermo_quartic_runs
    oracle = quadrature_log_z(2, 2.0, quartic())
    assert err > 0.0
    assert abs(est - oracle) <= 3.0 * err


def test_thermo_error_bar_scaling(thermo_quartic_runs):
    (_, err1), (est4, err4) = thermo_quartic_runs
    # 4x the steps should roughly halve the error bar
    ratio = err4 / err1
    assert 0.3 <= ratio <= 0.8
    oracle = quadrature_log_z(2, 2.0, quartic())
    assert abs(est4 - oracle) <= 3.0 * err4
