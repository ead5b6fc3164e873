import math

import numpy as np
import pytest

from loggas import gradient, hermite_oracle, minimize, quadratic

V2 = quadratic()
INV_SQRT2 = 1.0 / math.sqrt(2.0)


def test_two_point_minimizer():
    res = minimize(2, V2, seed=0)
    assert res.converged
    assert np.allclose(res.config.points, [-INV_SQRT2, INV_SQRT2], atol=1e-10)


def test_single_point_minimizer():
    res = minimize(1, V2, seed=0)
    assert res.converged
    assert res.config.points[0] == pytest.approx(0.0, abs=1e-10)


def test_oracle_small_cases():
    assert hermite_oracle(1).points[0] == pytest.approx(0.0, abs=1e-14)
    assert np.allclose(hermite_oracle(2).points, [-INV_SQRT2, INV_SQRT2], atol=1e-13)


@pytest.mark.parametrize("n", [4, 8, 32])
def test_oracle_stationarity(n):
    g = gradient(hermite_oracle(n), V2)
    assert np.max(np.abs(g)) <= 1e-9 * n


def test_oracle_interlacing():
    # roots of successive degrees interlace
    for n in (5, 12, 33):
        a = hermite_oracle(n).points * math.sqrt(n / 2.0)
        b = hermite_oracle(n + 1).points * math.sqrt((n + 1) / 2.0)
        assert np.all(b[:-1] < a) and np.all(a < b[1:])


def test_minimize_matches_oracle_16():
    res = minimize(16, V2, seed=0)
    assert res.converged
    assert np.max(np.abs(res.config.points - hermite_oracle(16).points)) <= 1e-8


def test_minimizer_support_near_equilibrium():
    # excess beyond [-2, 2] shrinks with n; delta_64 < 0.2
    res = minimize(64, V2, seed=0, multistart=1)
    delta = max(0.0, float(np.max(np.abs(res.config.points))) - 2.0)
    assert delta < 0.2


def test_every_accepted_step_decreases_energy():
    res = minimize(32, V2, seed=0, multistart=1)
    trace = np.asarray(res.energy_trace)
    assert len(trace) >= 2
    d = np.diff(trace)
    scale = np.maximum(1.0, np.abs(trace[:-1]))
    # non-increasing to rounding; the early phase strictly decreases
    assert np.all(d <= 1e-14 * scale)
    assert np.all(d[: len(d) // 2] < 0.0)
    assert trace[-1] == pytest.approx(res.breakdown.w_n, rel=1e-12)


def test_next_order_trend():
    f = []
    for n in (16, 32, 64):
        res = minimize(n, V2, seed=11, multistart=1)
        assert res.converged
        f.append(res.breakdown.f_n)
    # increasing toward the limit, magnitude gap to 1/2 shrinking
    assert f[0] < f[1] < f[2]
    gaps = [abs(abs(x) - 0.5) for x in f]
    assert gaps[0] > gaps[1] > gaps[2]


def test_ground_state_next_order_sign():
    # regression pin: the next-order term of the minimizer is negative,
    # approaching -1/2 from below
    res = minimize(64, V2, seed=11, multistart=1)
    assert res.breakdown.f_n == pytest.approx(-0.509302006349782, abs=1e-6)


def test_nonconverged_flagged():
    res = minimize(24, V2, seed=0, max_iter=3, multistart=1)
    assert not res.converged
    assert res.grad_norm > 0.0


def test_deterministic_given_seed():
    a = minimize(12, V2, seed=5)
    b = minimize(12, V2, seed=5)
    assert np.array_equal(a.config.points, b.config.points)
    assert a.iterations == b.iterations
