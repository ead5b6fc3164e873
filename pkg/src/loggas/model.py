"""Confining potentials, equilibrium measures, and mean-field constants.

The macroscopic state of the gas is the probability measure minimizing

    F(mu) = -iint log|x - y| dmu(x) dmu(y) + int V dmu,

whose minimizer mu0 (the equilibrium measure) is characterized by the
optimality condition U(x) + V(x)/2 = c on the support and >= c outside,
where U is the logarithmic potential of mu0 and c the Robin constant.
This module provides the quadratic closed form (semicircle), a simplex
projected-gradient solver for general V, and the derived constants
c, F(mu0), and alpha = int m0 log(2 pi m0).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, ConvergenceError

__all__ = [
    "Potential",
    "EquilibriumMeasure",
    "ModelConstants",
    "quadratic",
    "quartic",
    "double_well",
    "polynomial",
    "blend",
    "BUILTIN_POTENTIALS",
    "adaptive_gauss_legendre",
    "semicircle_equilibrium",
    "solve_equilibrium",
    "log_potential",
    "zeta",
    "mean_field_energy",
    "alpha",
    "model_constants",
    "measure_to_json",
    "measure_from_json",
]


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class Potential:
    """A confining field V with an exact derivative.

    Parameters
    ----------
    eval : callable
        Vectorized map x -> V(x).
    deriv : callable
        Vectorized map x -> V'(x), exact (no internal differencing).
    growth_check_radius : float
        Radius beyond which V(x)/2 - log|x| is expected to increase; used
        by confinement checks, not by the solvers themselves.
    label : str
        Short human-readable name.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    growth_check_radius: float
    label: str

    def __call__(self, x):
        return self.eval(x)

    def confinement_ok(self, n_samples: int = 64) -> bool:
        """Check that V(x)/2 - log|x| increases beyond growth_check_radius.

        Sampled proxy for logarithmic confinement; tested on both tails.
        """
        r = self.growth_check_radius
        for sign in (-1.0, 1.0):
            # index walks outward from the origin for either sign
            x = sign * np.geomspace(r, 8.0 * r, n_samples)
            g = self.eval(x) / 2.0 - np.log(np.abs(x))
            if np.any(np.diff(g) <= 0):
                return False
        return True


def quadratic() -> Potential:
    """The canonical quadratic model V(x) = x^2/2 (semicircle equilibrium)."""
    return Potential(
        eval=lambda x: 0.5 * np.asarray(x) ** 2,
        deriv=lambda x: np.asarray(x, dtype=float),
        growth_check_radius=4.0,
        label="quadratic",
    )


def quartic() -> Potential:
    """V(x) = x^4/4."""
    return Potential(
        eval=lambda x: 0.25 * np.asarray(x) ** 4,
        deriv=lambda x: np.asarray(x) ** 3,
        growth_check_radius=4.0,
        label="quartic",
    )


def double_well() -> Potential:
    """V(x) = x^4/4 - x^2 (two symmetric wells)."""
    return Potential(
        eval=lambda x: 0.25 * np.asarray(x) ** 4 - np.asarray(x) ** 2,
        deriv=lambda x: np.asarray(x) ** 3 - 2.0 * np.asarray(x),
        growth_check_radius=6.0,
        label="double-well",
    )


def polynomial(coeffs: Sequence[float]) -> Potential:
    """Potential from ascending coefficients: V(x) = sum_k coeffs[k] x^k.

    The derivative is taken on the coefficients, so it is exact.
    """
    c = np.asarray(list(coeffs), dtype=float)
    if c.size == 0:
        raise ValueError("polynomial potential needs at least one coefficient")
    dc = c[1:] * np.arange(1, c.size)
    return Potential(
        eval=lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), c),
        deriv=lambda x: (
            np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), dc)
            if dc.size
            else np.zeros_like(np.asarray(x, dtype=float))
        ),
        growth_check_radius=8.0,
        label="polynomial",
    )


def blend(a: Potential, b: Potential, t: float) -> Potential:
    """Linear interpolation (1-t) a + t b, derivative blended exactly."""
    return Potential(
        eval=lambda x: (1.0 - t) * a.eval(x) + t * b.eval(x),
        deriv=lambda x: (1.0 - t) * a.deriv(x) + t * b.deriv(x),
        growth_check_radius=max(a.growth_check_radius, b.growth_check_radius),
        label=f"blend({a.label},{b.label},{t:g})",
    )


BUILTIN_POTENTIALS: dict[str, Callable[[], Potential]] = {
    "quadratic": quadratic,
    "quartic": quartic,
    "double-well": double_well,
}


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre quadrature

_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)


def _panel(f, a, b, rule):
    t, w = rule
    x = 0.5 * (b - a) * t + 0.5 * (b + a)
    return 0.5 * (b - a) * float(np.dot(f(x), w))


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-8,
    split_at: Sequence[float] = (),
    max_depth: int = 52,
) -> float:
    """Integrate a vectorized f over [a, b] by adaptive Gauss-Legendre.

    The interval is pre-split at the points in `split_at` (integrable
    singularities such as log|x - x0| belong there); each panel is then
    bisected until a 10 vs 20 point comparison meets the tolerance.
    Nodes never touch panel endpoints, so endpoint singularities are safe.
    """
    if b < a:
        return -adaptive_gauss_legendre(f, b, a, tol, split_at, max_depth)
    cuts = sorted({float(s) for s in split_at if a < s < b})
    edges = [a] + cuts + [b]
    total = 0.0
    # per-panel budget keeps the global error near tol
    budget = tol / max(1, len(edges) - 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        stack = [(lo, hi, 0)]
        while stack:
            x0, x1, depth = stack.pop()
            coarse = _panel(f, x0, x1, _GL_LO)
            fine = _panel(f, x0, x1, _GL_HI)
            if abs(fine - coarse) <= budget * max(1e-3, (x1 - x0) / (hi - lo)) or depth >= max_depth:
                total += fine
            else:
                mid = 0.5 * (x0 + x1)
                stack.append((x0, mid, depth + 1))
                stack.append((mid, x1, depth + 1))
    return total


# ---------------------------------------------------------------------------
# equilibrium measures


@dataclass(frozen=True)
class EquilibriumMeasure:
    """A probability measure on a finite union of closed intervals.

    Either a tagged closed form (`closed_form == "semicircle"`) or a
    discrete measure of point masses `weights` at `nodes` (atoms standing
    for cells of the solver grid).
    """

    support: tuple[tuple[float, float], ...]
    nodes: np.ndarray | None
    weights: np.ndarray | None
    closed_form: str | None
    total_mass: float

    def density(self, x) -> np.ndarray:
        """Density m0(x); for grid measures, weight over cell width."""
        x = np.asarray(x, dtype=float)
        if self.closed_form == "semicircle":
            return np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)
        h = _cell_widths(self.nodes)
        out = np.zeros_like(x)
        idx = np.searchsorted(self.nodes, x)
        idx = np.clip(idx, 0, len(self.nodes) - 1)
        left = np.clip(idx - 1, 0, len(self.nodes) - 1)
        pick = np.where(
            np.abs(x - self.nodes[left]) < np.abs(x - self.nodes[idx]), left, idx
        )
        near = np.abs(x - self.nodes[pick]) <= h[pick]
        out[near] = (self.weights[pick] / h[pick])[near]
        return out

    def interval_mass(self, lo: float, hi: float) -> float:
        """Mass of [lo, hi]."""
        if hi <= lo:
            return 0.0
        if self.closed_form == "semicircle":
            return _semicircle_cdf(hi) - _semicircle_cdf(lo)
        inside = (self.nodes >= lo) & (self.nodes <= hi)
        return float(self.weights[inside].sum())

    def quantiles(self, n: int) -> np.ndarray:
        """Midpoint quantiles x_i with mass ((i + 1/2)/n) to the left."""
        q = (np.arange(n) + 0.5) / n
        if self.closed_form == "semicircle":
            return _semicircle_quantiles(q)
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        cum /= cum[-1]
        return np.interp(q, cum[1:], self.nodes)


def _cell_widths(nodes: np.ndarray) -> np.ndarray:
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    lo = np.concatenate([[nodes[0] - (mids[0] - nodes[0])], mids])
    hi = np.concatenate([mids, [nodes[-1] + (nodes[-1] - mids[-1])]])
    return hi - lo


def _semicircle_cdf(x: float) -> float:
    if x <= -2.0:
        return 0.0
    if x >= 2.0:
        return 1.0
    return 0.5 + x * math.sqrt(4.0 - x * x) / (4.0 * math.pi) + math.asin(x / 2.0) / math.pi


def _semicircle_quantiles(q: np.ndarray) -> np.ndarray:
    lo = np.full_like(q, -2.0)
    hi = np.full_like(q, 2.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        cm = np.array([_semicircle_cdf(v) for v in mid])
        lower = cm < q
        lo = np.where(lower, mid, lo)
        hi = np.where(lower, hi, mid)
    return 0.5 * (lo + hi)


def semicircle_equilibrium() -> EquilibriumMeasure:
    """Equilibrium measure of the quadratic model: density sqrt(4-x^2)/(2 pi)."""
    return EquilibriumMeasure(
        support=((-2.0, 2.0),),
        nodes=None,
        weights=None,
        closed_form="semicircle",
        total_mass=1.0,
    )


# ---------------------------------------------------------------------------
# logarithmic potential, effective potential, constants

#: exact values of the quadratic closed form
SEMICIRCLE_C = 0.5
SEMICIRCLE_F = 0.75
SEMICIRCLE_ALPHA = 0.5


def _semicircle_log_potential(x: np.ndarray) -> np.ndarray:
    # U(x) = 1/2 - x^2/4 inside [-2,2]. Outside, base + zeta suffers
    # cancellation at large |x| (x^2/4 terms of size 1e11 against an O(1)
    # answer), so use the algebraically equivalent stable form
    # 1/2 - a/(a + r) - log((a + r)/2), r = sqrt(a^2 - 4), a = |x|.
    x = np.asarray(x, dtype=float)
    res = 0.5 - x * x / 4.0
    out = np.abs(x) > 2.0
    if np.any(out):
        a = np.abs(x[out])
        r = np.sqrt(a * a - 4.0)
        res[out] = 0.5 - a / (a + r) - np.log((a + r) / 2.0)
    return res


def _semicircle_zeta(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    z = np.zeros_like(ax)
    out = ax > 2.0
    if np.any(out):
        a = ax[out]
        r = np.sqrt(a * a - 4.0)
        z[out] = a * r / 4.0 - np.log((a + r) / 2.0)
    return z


def log_potential(mu: EquilibriumMeasure, x, tol: float = 1e-8):
    """U(x) = -int log|x - y| dmu(y); scalar in, scalar out.

    Closed-form semicircle uses the exact piecewise formula; grid measures
    sum -w_i log|x - node_i| with the evaluation cell regularized by the
    self-energy of a uniform blob of its width.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if mu.closed_form == "semicircle":
        u = _semicircle_log_potential(x)
    else:
        d = np.abs(x[:, None] - mu.nodes[None, :])
        h = _cell_widths(mu.nodes)[None, :]
        # blob self-energy -log(h/e) replaces the divergent -log 0
        near = d < 0.5 * h
        terms = np.where(near, -np.log(h / math.e), -np.log(np.where(near, 1.0, d)))
        u = terms @ mu.weights
    return float(u[0]) if scalar else u


def zeta(mu: EquilibriumMeasure, V: Potential, c: float, x) -> np.ndarray:
    """Effective potential zeta = U + V/2 - c; zero on the support, >= 0 off it."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if mu.closed_form == "semicircle" and V.label == "quadratic" and c == SEMICIRCLE_C:
        z = _semicircle_zeta(x)
    else:
        z = log_potential(mu, x) + V.eval(x) / 2.0 - c
    return float(z[0]) if scalar else z


def mean_field_energy(mu: EquilibriumMeasure, V: Potential, tol: float = 1e-8) -> float:
    """F(mu) = -iint log|x-y| dmu dmu + int V dmu.

    The semicircle path integrates the exact potential U against mu.
    Grid measures use the quadratic form with blob-regularized diagonal.
    """
    if mu.closed_form == "semicircle":
        lo, hi = mu.support[0]

        def inner(xs):
            return mu.density(xs) * (
                _semicircle_log_potential(xs) + V.eval(xs)
            )

        # -iint log = int U dmu; total integrand U + V, then subtract the
        # double counting nothing: F = int U dmu + int V dmu is exact here
        return adaptive_gauss_legendre(inner, lo, hi, tol=tol)
    K = _log_kernel(mu.nodes)
    w = mu.weights
    return float(w @ K @ w + np.dot(w, V.eval(mu.nodes)))


def alpha(mu: EquilibriumMeasure, tol: float = 1e-8) -> float:
    """The entropy-like constant alpha = int m0 log(2 pi m0) dx."""
    if mu.closed_form == "semicircle":
        # substitute x = 2 sin t: m0 = cos t / pi, dx = 2 cos t dt,
        # integrand becomes (2 cos^2 t / pi) log(2 cos t), smooth
        def g(t):
            ct = np.cos(t)
            return (2.0 * ct * ct / np.pi) * np.log(2.0 * ct)

        return adaptive_gauss_legendre(g, -np.pi / 2, np.pi / 2, tol=tol)
    h = _cell_widths(mu.nodes)
    w = mu.weights
    pos = w > 0
    dens = w[pos] / h[pos]
    return float(np.dot(w[pos], np.log(2.0 * np.pi * dens)))


@dataclass(frozen=True)
class ModelConstants:
    """Derived constants of an equilibrium measure: Robin constant c,
    mean-field energy F(mu0), and alpha."""

    c: float
    mean_field_energy: float
    alpha: float


def model_constants(mu: EquilibriumMeasure, V: Potential) -> ModelConstants:
    """Compute (c, F, alpha) for a measure-potential pair.

    The quadratic closed form returns the exact constants (1/2, 3/4, 1/2).
    Grid measures extract c as the median of U + V/2 over the interior 80
    percent of the numerical support, which is robust to edge cells.
    """
    if mu.closed_form == "semicircle" and V.label == "quadratic":
        return ModelConstants(SEMICIRCLE_C, SEMICIRCLE_F, SEMICIRCLE_ALPHA)
    w = mu.weights
    sup = np.where(w > 1e-10)[0]
    cut = max(1, int(0.1 * len(sup)))
    interior = sup[cut : len(sup) - cut] if len(sup) > 2 * cut else sup
    K = _log_kernel(mu.nodes)
    r = K @ w + V.eval(mu.nodes) / 2.0
    c = float(np.median(r[interior]))
    return ModelConstants(c, mean_field_energy(mu, V), alpha(mu))


def _f2(t: np.ndarray) -> np.ndarray:
    """Second antiderivative of log|t| vanishing to second order at 0."""
    a = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = t * t * (2.0 * np.log(a) - 3.0) / 4.0
    return np.where(a == 0.0, 0.0, out)


def _log_kernel(nodes: np.ndarray) -> np.ndarray:
    """K_ij = -(1/(h_i h_j)) iint_{cell_i x cell_j} log|x - y| dx dy.

    Exact for the piecewise-constant cell measure, diagonal included, so
    the quadratic form w K w converges at second order instead of first.
    """
    h = _cell_widths(nodes)
    lo = nodes - 0.5 * h
    hi = nodes + 0.5 * h
    ii = _f2(hi[:, None] - lo[None, :])
    ii += _f2(lo[:, None] - hi[None, :])
    ii -= _f2(hi[:, None] - hi[None, :])
    ii -= _f2(lo[:, None] - lo[None, :])
    return -ii / (h[:, None] * h[None, :])


# ---------------------------------------------------------------------------
# equilibrium solver


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u + (1.0 - css) / k > 0)[0][-1]
    lam = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def solve_equilibrium(
    V: Potential,
    grid: np.ndarray,
    tol: float = 1e-3,
    max_iter: int = 5000,
) -> EquilibriumMeasure:
    """Minimize the discretized mean-field energy over measures on `grid`.

    Projected gradient descent on the probability simplex with
    Barzilai-Borwein step sizes. Convergence is declared when the
    optimality residual max |U + V/2 - c| over the numerical support
    drops below `tol`.

    Raises
    ------
    BracketError
        If mass piles up on the grid endpoints (support exceeds bracket).
    ConvergenceError
        If the residual is still above `tol` after `max_iter` iterations.
    """
    nodes = np.asarray(grid, dtype=float)
    if nodes.ndim != 1 or len(nodes) < 8:
        raise ValueError("grid must be a 1-d array of at least 8 nodes")
    if np.any(np.diff(nodes) <= 0):
        raise ValueError("grid nodes must be strictly increasing")
    M = len(nodes)
    K = _log_kernel(nodes)
    Vn = V.eval(nodes)
    w = np.full(M, 1.0 / M)
    g = 2.0 * (K @ w) + Vn

    # spectral norm estimate for the first step
    z = np.cos(np.arange(M))
    for _ in range(20):
        z = K @ z
        z /= np.linalg.norm(z)
    step = 1.0 / (2.0 * abs(float(z @ (K @ z))) + 1.0)

    def residual_and_c(wv):
        sup = wv > 1e-10
        if sup.sum() < 4:
            return np.inf, 0.0, sup
        r = K @ wv + Vn / 2.0
        idx = np.where(sup)[0]
        cut = max(1, int(0.1 * len(idx)))
        interior = idx[cut : len(idx) - cut] if len(idx) > 2 * cut else idx
        c = float(np.median(r[interior]))
        return float(np.max(np.abs(r[idx] - c))), c, sup

    res = np.inf
    for it in range(max_iter):
        w_new = _project_simplex(w - step * g)
        g_new = 2.0 * (K @ w_new) + Vn
        s = w_new - w
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-300:
            step = float(s @ s) / sy
            step = min(max(step, 1e-12), 1e6)
        else:
            step *= 1.5
        w, g = w_new, g_new
        if it % 25 == 24 or it == max_iter - 1:
            res, _, _ = residual_and_c(w)
            if res < tol:
                break
    res, c, sup = residual_and_c(w)

    # endpoint pile-up means the true support leaks out of the bracket
    w_interior = np.median(w[sup]) if sup.any() else 0.0
    if w[0] > max(10.0 * w_interior, 1e-6) or w[-1] > max(10.0 * w_interior, 1e-6):
        raise BracketError(
            "equilibrium mass accumulates on the grid endpoints; enlarge the bracket"
        )
    if res >= tol:
        raise ConvergenceError(
            f"equilibrium solver stalled at residual {res:.3e} (tol {tol:.1e})",
            residual=res,
        )

    idx = np.where(sup)[0]
    return EquilibriumMeasure(
        support=((float(nodes[idx[0]]), float(nodes[idx[-1]])),),
        nodes=nodes,
        weights=w,
        closed_form=None,
        total_mass=float(w.sum()),
    )


# ---------------------------------------------------------------------------
# serialization


def measure_to_json(mu: EquilibriumMeasure, consts: ModelConstants | None = None) -> str:
    """Serialize a measure (and optional constants) to the documented schema."""
    if consts is None:
        obj_consts = None
    else:
        obj_consts = {
            "c": consts.c,
            "F": consts.mean_field_energy,
            "alpha": consts.alpha,
        }
    obj = {
        "support": [[a, b] for a, b in mu.support],
        "nodes": None if mu.nodes is None else [float(v) for v in mu.nodes],
        "weights": None if mu.weights is None else [float(v) for v in mu.weights],
        "closed_form": mu.closed_form,
        "constants": obj_consts,
    }
    return json.dumps(obj, indent=2)


def measure_from_json(text: str) -> tuple[EquilibriumMeasure, ModelConstants | None]:
    obj = json.loads(text)
    mu = EquilibriumMeasure(
        support=tuple((float(a), float(b)) for a, b in obj["support"]),
        nodes=None if obj["nodes"] is None else np.asarray(obj["nodes"], dtype=float),
        weights=None if obj["weights"] is None else np.asarray(obj["weights"], dtype=float),
        closed_form=obj["closed_form"],
        total_mass=1.0 if obj["weights"] is None else float(np.sum(obj["weights"])),
    )
    consts = None
    if obj.get("constants"):
        c = obj["constants"]
        consts = ModelConstants(c["c"], c["F"], c["alpha"])
    return mu, consts
