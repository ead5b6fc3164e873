"""The n-particle energy w_n, its gradient, and next-order functionals.

    w_n(x) = -sum_{i != j} log|x_i - x_j| + n sum_i V(x_i)

The exact splitting w_n = n^2 F(mu0) - n log n + n f_n isolates the
next-order term f_n; subtracting the effective-potential mass gives
f_hat = f_n - 2 sum_i zeta(x_i) <= f_n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigError
from .model import EquilibriumMeasure, ModelConstants, Potential, zeta

__all__ = ["Configuration", "EnergyBreakdown", "energy", "gradient", "breakdown", "discrepancy"]


@dataclass(frozen=True)
class Configuration:
    """Sorted n-tuple of particle positions at original scale."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or len(pts) < 1:
            raise ValueError("need at least one point")
        if len(pts) > 1:
            d = np.diff(pts)
            if np.any(d == 0.0):
                raise DegenerateConfigError("coincident points: logarithmic energy diverges")
            if np.any(d < 0.0):
                raise ValueError("points must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class EnergyBreakdown:
    """w_n split into macroscopic, logarithmic, and next-order parts.

    Stored so that w_n = leading - log_term + n * f_n holds exactly as an
    algebraic identity of the stored floats.
    """

    w_n: float
    leading: float
    log_term: float
    f_n: float
    f_hat: float
    zeta_sum: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "w_n": self.w_n,
                "leading": self.leading,
                "log_term": self.log_term,
                "f_n": self.f_n,
                "f_hat": self.f_hat,
                "zeta_sum": self.zeta_sum,
            },
            indent=2,
        )


def _pair_distances(pts: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(len(pts), 1)
    d = pts[j] - pts[i]
    if np.any(d <= 0) or np.any(~np.isfinite(d)):
        raise DegenerateConfigError("coincident points: logarithmic energy diverges")
    return d


def energy(config: Configuration, V: Potential) -> float:
    """w_n with each unordered pair counted twice."""
    pts = config.points
    n = len(pts)
    if n == 1:
        return float(n * V.eval(pts).sum())
    d = _pair_distances(pts)
    if np.any(d == 0.0):
        raise DegenerateConfigError("coincident points: logarithmic energy diverges")
    interaction = -2.0 * math.fsum(np.log(d).tolist())
    confinement = n * math.fsum(np.asarray(V.eval(pts), dtype=float).tolist())
    return interaction + confinement


def gradient(config: Configuration, V: Potential) -> np.ndarray:
    """Gradient of w_n: component i is -2 sum_{j != i} 1/(x_i - x_j) + n V'(x_i)."""
    pts = config.points
    n = len(pts)
    if n == 1:
        return n * np.asarray(V.deriv(pts), dtype=float)
    diff = pts[:, None] - pts[None, :]
    np.fill_diagonal(diff, np.inf)
    if np.any(diff == 0.0):
        raise DegenerateConfigError("coincident points: gradient diverges")
    inv = 1.0 / diff
    return -2.0 * inv.sum(axis=1) + n * np.asarray(V.deriv(pts), dtype=float)


def breakdown(
    config: Configuration,
    V: Potential,
    mu: EquilibriumMeasure,
    consts: ModelConstants,
) -> EnergyBreakdown:
    """Split w_n by the exact identity w_n = n^2 F - n log n + n f_n."""
    n = config.n
    w = energy(config, V)
    leading = n * n * consts.mean_field_energy
    log_term = n * math.log(n)
    f_n = (w - leading + log_term) / n
    zs = float(np.sum(zeta(mu, V, consts.c, config.points)))
    return EnergyBreakdown(
        w_n=w,
        leading=leading,
        log_term=log_term,
        f_n=f_n,
        f_hat=f_n - 2.0 * zs,
        zeta_sum=zs,
    )


def discrepancy(
    config: Configuration,
    mu: EquilibriumMeasure,
    x0: float,
    R: float,
) -> float:
    """Count fluctuation D(x0, R) over the window of radius R/n around x0.

    Counts configuration points in the closed interval
    [x0 - R/n, x0 + R/n] minus n times the mu-mass of the same interval.
    Boundary points count fully.
    """
    if R <= 0:
        raise ValueError("window radius must be positive")
    n = config.n
    r = R / n
    lo, hi = x0 - r, x0 + r
    count = int(np.count_nonzero((config.points >= lo) & (config.points <= hi)))
    return count - n * mu.interval_mass(lo, hi)
