"""Weighted Fekete sets: minimizers of w_n, with an independent oracle.

For the quadratic model the minimizer is known in closed form up to the
root-finding: the scaled roots sqrt(2/n) y_k of the degree-n physicists'
Hermite polynomial satisfy sum_{j != i} 1/(y_i - y_j) = y_i, which makes
the w_n gradient vanish identically. The oracle computes those roots by
Newton iteration on the orthonormal three-term recurrence

    h_0 = pi^{-1/4},  h_{k+1}(y) = y sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1},

with initial brackets supplied level by level through root interlacing,
so it shares no code path with the optimizer it checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError
from .hamiltonian import Configuration, EnergyBreakdown, breakdown, energy, gradient
from .model import (
    EquilibriumMeasure,
    ModelConstants,
    Potential,
    model_constants,
    semicircle_equilibrium,
)

__all__ = ["FeketeResult", "minimize", "hermite_oracle"]


@dataclass(frozen=True)
class FeketeResult:
    config: Configuration
    grad_norm: float
    iterations: int
    converged: bool
    breakdown: EnergyBreakdown | None
    # w_n after each accepted step of the winning start; monotone
    # non-increasing, strictly decreasing until decrements drop below ulp
    energy_trace: tuple[float, ...] = ()


# ---------------------------------------------------------------------------
# Hermite-root oracle


def _orthonormal_hermite(y: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Value of the degree-n orthonormal Hermite polynomial and its
    derivative h_n' = sqrt(2 n) h_{n-1}, by the stable recurrence."""
    h_prev = np.full_like(y, math.pi ** -0.25)
    if n == 0:
        return h_prev, np.zeros_like(y)
    h_cur = y * math.sqrt(2.0) * h_prev
    for k in range(1, n):
        h_prev, h_cur = h_cur, y * math.sqrt(2.0 / (k + 1)) * h_cur - math.sqrt(
            k / (k + 1.0)
        ) * h_prev
    return h_cur, math.sqrt(2.0 * n) * h_prev


def _newton_roots(n: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Bisection-safeguarded Newton for all n roots at once.

    lo/hi bracket each root; the recurrence changes sign across it.
    """
    x = 0.5 * (lo + hi)
    flo, _ = _orthonormal_hermite(lo, n)
    for _ in range(200):
        f, fp = _orthonormal_hermite(x, n)
        # keep the bracket current
        same = np.sign(f) == np.sign(flo)
        lo = np.where(same, x, lo)
        hi = np.where(same, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / fp
        x_new = x - step
        bad = ~np.isfinite(x_new) | (x_new <= lo) | (x_new >= hi)
        x_new = np.where(bad, 0.5 * (lo + hi), x_new)
        if np.max(np.abs(x_new - x)) < 1e-15 * max(1.0, float(np.max(np.abs(x)))):
            return x_new
        x = x_new
    raise ConvergenceError(f"Hermite root iteration stalled at degree {n}")


@lru_cache(maxsize=64)
def _hermite_roots(n: int) -> tuple[float, ...]:
    # climb the recurrence: roots of level k+1 interlace those of level k,
    # with the outermost brackets closed by the classical bound sqrt(2k+2)
    roots = np.array([0.0])
    for k in range(1, n):
        m = k + 1
        bound = math.sqrt(2.0 * m) + 1.0
        lo = np.concatenate([[-bound], roots])
        hi = np.concatenate([roots, [bound]])
        roots = _newton_roots(m, lo, hi)
    # enforce exact symmetry; the recurrence is even or odd in y
    roots = 0.5 * (roots - roots[::-1])
    return tuple(float(v) for v in roots)


def hermite_oracle(n: int) -> Configuration:
    """Stationary configuration of the quadratic model: sqrt(2/n) times
    the roots of the degree-n physicists' Hermite polynomial."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return Configuration(np.array([0.0]))
    roots = np.array(_hermite_roots(n))
    return Configuration(math.sqrt(2.0 / n) * roots)


# ---------------------------------------------------------------------------
# optimizer


def _tridiagonal_newton_step(pts: np.ndarray, g: np.ndarray, V: Potential, n: int) -> np.ndarray:
    """Solve H d = -g with the tridiagonal part of the w_n Hessian.

    Diagonal 2 sum_j 1/(x_i-x_j)^2 + n V''(x_i) dominates the discarded
    entries, so the truncated H is strictly diagonally dominant and the
    step is a descent direction. V'' by central differencing of V'.
    """
    diff = pts[:, None] - pts[None, :]
    np.fill_diagonal(diff, np.inf)
    inv2 = 1.0 / (diff * diff)
    h = 1e-6 * max(1.0, float(np.max(np.abs(pts))))
    vpp = (np.asarray(V.deriv(pts + h)) - np.asarray(V.deriv(pts - h))) / (2.0 * h)
    diag = 2.0 * inv2.sum(axis=1) + n * vpp
    gaps = np.diff(pts)
    off = -2.0 / (gaps * gaps)
    # Thomas solve of the tridiagonal system
    a = np.array(diag)
    b = np.array(off)
    rhs = -np.array(g)
    for i in range(1, len(pts)):
        wgt = b[i - 1] / a[i - 1]
        a[i] -= wgt * b[i - 1]
        rhs[i] -= wgt * rhs[i - 1]
    d = np.empty_like(rhs)
    d[-1] = rhs[-1] / a[-1]
    for i in range(len(pts) - 2, -1, -1):
        d[i] = (rhs[i] - b[i] * d[i + 1]) / a[i]
    return d


def _descend(
    x0: np.ndarray,
    V: Potential,
    n: int,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, float, int, bool]:
    pts = np.array(x0)
    cfg = Configuration(pts)
    w = energy(cfg, V)
    g = gradient(cfg, V)
    gn = float(np.max(np.abs(g)))
    newton_gate = 1e-3 * n
    trace = [w]
    for it in range(max_iter):
        if gn <= tol:
            return pts, gn, it, True, trace
        if gn < newton_gate:
            # Newton tail: energy decrements shrink below ulp(w) long
            # before the gradient target, so accept on gradient descent,
            # guarded so w can never rise by more than rounding noise
            d = _tridiagonal_newton_step(pts, g, V, n)
            slack = 1e-14 * max(1.0, abs(w))
            step = 1.0
            for _ in range(60):
                cand = pts + step * d
                if np.all(np.diff(cand) > 0):
                    g_new = gradient(Configuration(cand), V)
                    gn_new = float(np.max(np.abs(g_new)))
                    w_new = energy(Configuration(cand), V)
                    if gn_new < gn and w_new <= w + slack:
                        pts, g, gn = cand, g_new, gn_new
                        w = min(w, w_new)
                        trace.append(w)
                        break
                step *= 0.5
            else:
                return pts, gn, it, gn <= tol, trace
            continue
        d = -g / (1.0 + gn)
        # backtrack: keep ordering and demand strict energy decrease
        step = 1.0
        for _ in range(60):
            cand = pts + step * d
            if np.all(np.diff(cand) > 0):
                w_new = energy(Configuration(cand), V)
                if w_new < w:
                    pts = cand
                    w = w_new
                    trace.append(w)
                    break
            step *= 0.5
        else:
            # no admissible decrease along this direction
            return pts, gn, it, gn <= tol, trace
        g = gradient(Configuration(pts), V)
        gn = float(np.max(np.abs(g)))
    return pts, gn, max_iter, gn <= tol, trace


def minimize(
    n: int,
    V: Potential | None = None,
    seed: int = 0,
    tol: float | None = None,
    max_iter: int = 2000,
    mu: EquilibriumMeasure | None = None,
    consts: ModelConstants | None = None,
    multistart: int = 3,
) -> FeketeResult:
    """Minimize w_n by Armijo descent with a damped tridiagonal Newton tail.

    Parameters
    ----------
    n : int
        Number of particles.
    V : Potential, optional
        Confining potential; defaults to the canonical quadratic model.
    seed : int
        Master seed; `multistart` jittered starts are derived from it and
        the best final energy wins (ties broken by gradient norm).
    tol : float, optional
        Sup-norm gradient target; defaults to 1e-10 * n (scale-aware).
    mu : EquilibriumMeasure, optional
        Measure whose quantiles seed the starts; semicircle by default
        for the quadratic model, Gaussian quantiles otherwise.
    consts : ModelConstants, optional
        Passed through to the energy breakdown when supplied with `mu`.

    Returns
    -------
    FeketeResult
        With `converged` false (and diagnostics kept) if no start reached
        the tolerance.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if V is None:
        V = _default_quadratic()
    if tol is None:
        tol = 1e-10 * n
    if n == 1:
        # minimize V directly: bounded scalar search plus Newton polish on V'
        from scipy.optimize import minimize_scalar

        R = V.growth_check_radius
        res = minimize_scalar(
            lambda t: float(np.asarray(V.eval(np.array([t])))[0]),
            bounds=(-R, R),
            method="bounded",
            options={"xatol": 1e-12},
        )
        x = float(res.x)
        for _ in range(50):
            h = 1e-7 * max(1.0, abs(x))
            d1 = float(np.asarray(V.deriv(np.array([x])))[0])
            d2 = (
                float(np.asarray(V.deriv(np.array([x + h])))[0])
                - float(np.asarray(V.deriv(np.array([x - h])))[0])
            ) / (2 * h)
            if abs(d1) < 1e-15 or d2 <= 0:
                break
            x -= d1 / d2
        cfg = Configuration(np.array([x]))
        bd = breakdown(cfg, V, mu, consts) if mu is not None and consts is not None else None
        return FeketeResult(cfg, abs(float(V.deriv(np.array([x]))[0])), 0, True, bd)

    if mu is None and V.label == "quadratic":
        mu = semicircle_equilibrium()
    if mu is not None:
        base = mu.quantiles(n)
    else:
        # Gaussian quantiles as a generic confined start
        from scipy.special import ndtri

        base = ndtri((np.arange(n) + 0.5) / n)

    rng_master = np.random.default_rng(seed)
    best: tuple[float, float, np.ndarray, int, bool] | None = None
    min_gap = float(np.min(np.diff(base))) if n > 1 else 1.0
    for start in range(multistart):
        rng = np.random.default_rng(rng_master.integers(0, 2**63 - 1))
        if start == 0:
            x0 = base.copy()
        else:
            jitter = 0.2 * min_gap
            x0 = np.sort(base + rng.normal(0.0, jitter, n))
            while np.any(np.diff(x0) <= 0):
                x0 = np.sort(base + rng.normal(0.0, jitter, n))
        pts, gn, its, ok, trace = _descend(x0, V, n, tol, max_iter)
        w = energy(Configuration(pts), V)
        cand = (w, gn, pts, its, ok, trace)
        if best is None or (w, gn) < (best[0], best[1]):
            best = cand
    w, gn, pts, its, ok, trace = best
    cfg = Configuration(pts)
    if consts is None and mu is not None and mu.closed_form == "semicircle" and V.label == "quadratic":
        consts = model_constants(mu, V)
    bd = breakdown(cfg, V, mu, consts) if (mu is not None and consts is not None) else None
    return FeketeResult(cfg, gn, its, ok, bd, tuple(trace))


def _default_quadratic() -> Potential:
    from .model import quadratic

    return quadratic()
