"""Metropolis sampling of the Gibbs law exp(-(beta/2) w_n) / Z.

Single-site random-walk proposals with O(n) energy updates. Chains are
independent, each with its own RNG stream spawned from the master seed
(numpy SeedSequence.spawn, so runs are bit-reproducible), and merge into
statistics carrying a between/within-chain R-hat diagnostic. The proposal
scale adapts toward 30-50 percent acceptance during burn-in only; it is
frozen afterward so the invariant law is exact.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hamiltonian import Configuration, energy
from .model import (
    EquilibriumMeasure,
    ModelConstants,
    Potential,
    model_constants,
    semicircle_equilibrium,
    zeta,
)

__all__ = ["SamplerConfig", "ChainState", "GasStatistics", "step", "run", "metropolis_accept"]

AUDIT_INTERVAL = 10_000
AUDIT_RTOL = 1e-8


@dataclass(frozen=True)
class SamplerConfig:
    """Run parameters for the Metropolis sampler.

    `steps` counts post-burn-in steps per chain; `windows` lists the
    (x0, R) count-fluctuation windows, each covering the closed interval
    of radius R/n around x0.
    """

    n: int
    beta: float
    V: Potential
    steps: int = 100_000
    step_scale: float | None = None
    burn_in: int = 10_000
    thinning: int = 50
    chains: int = 4
    seed: int = 0
    init: str = "fekete"
    windows: tuple[tuple[float, float], ...] = ()
    observable: Callable[[np.ndarray], float] | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.burn_in < 1 or self.thinning < 1:
            raise ValueError("burn_in and thinning must be at least 1")
        if self.chains < 1 or self.steps < 1:
            raise ValueError("need at least one chain and one step")
        if self.init not in ("fekete", "quantile"):
            raise ValueError("init must be 'fekete' or 'quantile'")

    def replaced(self, **kw) -> "SamplerConfig":
        return dataclasses.replace(self, **kw)

    @property
    def initial_step_scale(self) -> float:
        if self.step_scale is not None:
            return self.step_scale
        return 1.0 / (self.n * math.sqrt(self.beta))


@dataclass
class ChainState:
    """One chain: positions, cached energy, acceptance counters, RNG."""

    config: Configuration
    energy: float
    accepted: int
    proposed: int
    rng: np.random.Generator
    step_scale: float


@dataclass
class GasStatistics:
    """Merged observables of a sampler run.

    `samples` holds the thinned configurations, chain-major, one sorted
    row per retained step.
    """

    count_fluctuations: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]]
    count_traces: dict[tuple[float, float], np.ndarray]
    spacing_hist: tuple[np.ndarray, np.ndarray]
    spacing_samples: np.ndarray
    f_n_trace: np.ndarray
    zeta_trace: np.ndarray
    potential_diff_trace: np.ndarray
    mean_energy: float
    mean_energy_se: float
    r_hat: float
    converged: bool
    acceptance: float
    chain_count_means: dict[tuple[float, float], np.ndarray]
    samples: np.ndarray


def metropolis_accept(delta: float, beta: float, u: float) -> bool:
    """Accept a move of energy change `delta` given uniform draw `u`."""
    if not math.isfinite(delta):
        return False
    if delta <= 0.0:
        return True
    return u < math.exp(-0.5 * beta * delta)


def _delta_w(pts: np.ndarray, i: int, xp: float, n: int, V: Potential) -> float:
    """Energy change when site i moves to xp; O(n) by differencing."""
    xi = pts[i]
    d_old = np.delete(pts, i) - xi
    d_new = np.delete(pts, i) - xp
    if np.any(d_new == 0.0):
        return math.inf
    return float(
        -2.0 * (np.log(np.abs(d_new)).sum() - np.log(np.abs(d_old)).sum())
        + n * (float(np.asarray(V.eval(np.array([xp])))[0]) - float(np.asarray(V.eval(np.array([xi])))[0]))
    )


def step(state: ChainState, cfg: SamplerConfig) -> ChainState:
    """One Metropolis step, returning the new chain state.

    Kept functional for testability; `run` uses an equivalent in-place
    loop built from the same delta and acceptance rules.
    """
    pts = np.array(state.config.points)
    n = cfg.n
    rng = state.rng
    i = int(rng.integers(0, n))
    xp = float(pts[i] + state.step_scale * rng.normal())
    delta = _delta_w(pts, i, xp, n, cfg.V)
    accepted = metropolis_accept(delta, cfg.beta, float(rng.random()))
    if accepted:
        pts[i] = xp
        pts = np.sort(pts)
        new_energy = state.energy + delta
    else:
        new_energy = state.energy
    return ChainState(
        config=Configuration(pts),
        energy=new_energy,
        accepted=state.accepted + int(accepted),
        proposed=state.proposed + 1,
        rng=rng,
        step_scale=state.step_scale,
    )


def _initial_config(cfg: SamplerConfig, chain_idx: int, rng: np.random.Generator,
                    mu: EquilibriumMeasure | None) -> np.ndarray:
    if mu is not None:
        base = mu.quantiles(cfg.n)
    else:
        from scipy.special import ndtri

        base = ndtri((np.arange(cfg.n) + 0.5) / cfg.n)
    if cfg.init == "fekete" and chain_idx == 0:
        from .fekete import minimize

        return np.array(minimize(cfg.n, cfg.V, seed=0, multistart=1, tol=1e-8 * cfg.n).config.points)
    gap = float(np.min(np.diff(base))) if cfg.n > 1 else 1.0
    pts = np.sort(base + rng.normal(0.0, 0.3 * gap, cfg.n))
    while np.any(np.diff(pts) <= 0):
        pts = np.sort(base + rng.normal(0.0, 0.3 * gap, cfg.n))
    return pts


def _run_chain(cfg: SamplerConfig, chain_idx: int, seed_seq: np.random.SeedSequence,
               mu: EquilibriumMeasure | None):
    rng = np.random.default_rng(seed_seq)
    n = cfg.n
    V = cfg.V
    beta = cfg.beta
    pts = _initial_config(cfg, chain_idx, rng, mu)
    w = energy(Configuration(pts), V)
    scale = cfg.initial_step_scale

    total = cfg.burn_in + cfg.steps
    samples = []
    energies = []
    accepted = 0
    proposed = 0
    window_acc = 0
    window_len = 0
    CHUNK = 4096
    done = 0
    vec_eval = V.eval
    while done < total:
        m = min(CHUNK, total - done)
        sites = rng.integers(0, n, m)
        moves = rng.normal(0.0, 1.0, m)
        us = rng.random(m)
        for k in range(m):
            gstep = done + k
            i = int(sites[k])
            xi = pts[i]
            xp = xi + scale * moves[k]
            d_new = pts - xp
            d_new[i] = 1.0
            if np.any(d_new == 0.0):
                delta = math.inf
            else:
                d_old = pts - xi
                d_old[i] = 1.0
                v_new, v_old = np.asarray(vec_eval(np.array([xp, xi])), dtype=float)
                delta = float(
                    -2.0 * (np.log(np.abs(d_new)).sum() - np.log(np.abs(d_old)).sum())
                    + n * (v_new - v_old)
                )
            proposed += 1
            window_len += 1
            if metropolis_accept(delta, beta, float(us[k])):
                pts[i] = xp
                if (i > 0 and pts[i] < pts[i - 1]) or (i < n - 1 and pts[i] > pts[i + 1]):
                    pts = np.sort(pts)
                w += delta
                accepted += 1
                window_acc += 1
            in_burn = gstep < cfg.burn_in
            if in_burn and window_len >= 500:
                rate = window_acc / window_len
                if rate > 0.5:
                    scale *= 1.3
                elif rate < 0.3:
                    scale /= 1.3
                window_acc = 0
                window_len = 0
            if (gstep + 1) % AUDIT_INTERVAL == 0:
                w_true = energy(Configuration(np.sort(pts)), V)
                if abs(w - w_true) > AUDIT_RTOL * max(1.0, abs(w_true)):
                    raise RuntimeError(
                        f"energy cache drifted: cached {w!r} vs exact {w_true!r}"
                    )
                w = w_true
            if not in_burn and (gstep - cfg.burn_in + 1) % cfg.thinning == 0:
                samples.append(pts.copy())
                energies.append(w)
        done += m
    return np.array(samples), np.array(energies), accepted, proposed, scale


def _gelman_rubin(chain_series: list[np.ndarray]) -> float:
    m = len(chain_series)
    if m < 2:
        return 1.0
    L = min(len(s) for s in chain_series)
    if L < 2:
        return math.inf
    X = np.stack([s[:L] for s in chain_series])
    within = X.var(axis=1, ddof=1).mean()
    between = L * X.mean(axis=1).var(ddof=1)
    if within == 0:
        return 1.0 if between == 0 else math.inf
    var_plus = (L - 1) / L * within + between / L
    return math.sqrt(var_plus / within)


def run(cfg: SamplerConfig, threads: int = 1) -> GasStatistics:
    """Run all chains and merge observables.

    The R-hat diagnostic is computed on the energy traces; statistics are
    returned (not suppressed) even when the diagnostic fails, with
    `converged` set accordingly. Chains run on `threads` workers; the
    merge order is fixed by chain index, so results do not depend on
    scheduling.
    """
    mu: EquilibriumMeasure | None
    consts: ModelConstants | None
    if cfg.V.label == "quadratic":
        mu = semicircle_equilibrium()
        consts = model_constants(mu, cfg.V)
    else:
        mu = None
        consts = None

    windows = cfg.windows if cfg.windows else ((0.0, float(cfg.n)),)
    windows = tuple((float(a), float(b)) for a, b in windows)

    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    if threads > 1 and cfg.chains > 1:
        with ThreadPoolExecutor(max_workers=min(threads, cfg.chains)) as pool:
            results = list(pool.map(lambda c: _run_chain(cfg, c, seqs[c], mu), range(cfg.chains)))
    else:
        results = [_run_chain(cfg, c, seqs[c], mu) for c in range(cfg.chains)]
    all_samples = []
    energy_series = []
    accepted = 0
    proposed = 0
    for samples, energies, acc, prop, _ in results:
        all_samples.append(samples)
        energy_series.append(energies)
        accepted += acc
        proposed += prop

    n = cfg.n
    r_hat = _gelman_rubin(energy_series)
    energies = np.concatenate(energy_series)
    chain_means = np.array([np.mean(e) for e in energy_series])
    se = float(np.std(chain_means, ddof=1) / math.sqrt(cfg.chains)) if cfg.chains > 1 else float(
        np.std(energies, ddof=1) / math.sqrt(len(energies))
    )

    count_traces: dict[tuple[float, float], np.ndarray] = {}
    chain_count_means: dict[tuple[float, float], np.ndarray] = {}
    fluct_hists = {}
    for (x0, R) in windows:
        r = R / n
        per_chain = []
        for samples in all_samples:
            counts = ((samples >= x0 - r) & (samples <= x0 + r)).sum(axis=1)
            per_chain.append(counts.astype(float))
        trace = np.concatenate(per_chain)
        count_traces[(x0, R)] = trace
        chain_count_means[(x0, R)] = np.array([np.mean(c) for c in per_chain])
        if mu is not None:
            base = n * mu.interval_mass(x0 - r, x0 + r)
        else:
            base = float(np.mean(trace))
        d_vals = trace - base
        lo = math.floor(d_vals.min()) - 0.5
        hi = math.ceil(d_vals.max()) + 0.5
        hist = np.histogram(d_vals, bins=max(1, int(hi - lo)), range=(lo, hi))
        fluct_hists[(x0, R)] = hist

    # normalized nearest-neighbor spacings from the bulk (central half)
    spacings = []
    lo_i, hi_i = n // 4, max(n // 4 + 1, (3 * n) // 4)
    for samples in all_samples:
        gaps = np.diff(samples, axis=1)[:, lo_i : hi_i]
        left = samples[:, lo_i:hi_i]
        if mu is not None:
            dens = mu.density(left)
        else:
            dens = np.full_like(left, 1.0)
        spacings.append((n * dens * gaps).ravel())
    spacing_samples = np.concatenate(spacings) if spacings else np.array([])
    if spacing_samples.size:
        counts, edges = np.histogram(spacing_samples, bins=40, range=(0.0, 4.0))
        total_counts = counts.sum()
        spacing_hist = (counts / max(1, total_counts), edges)
    else:
        spacing_hist = (np.array([]), np.array([]))

    flat = np.concatenate([s.reshape(-1, n) for s in all_samples])
    if consts is not None:
        F = consts.mean_field_energy
        f_n_trace = (energies - n * n * F + n * math.log(n)) / n
        zeta_trace = np.array(
            [float(np.sum(zeta(mu, cfg.V, consts.c, row))) for row in flat]
        )
    else:
        f_n_trace = np.array([])
        zeta_trace = np.array([])

    if cfg.observable is not None:
        pot_trace = np.array([float(cfg.observable(row)) for row in flat])
    else:
        pot_trace = np.array([])

    return GasStatistics(
        count_fluctuations=fluct_hists,
        count_traces=count_traces,
        spacing_hist=spacing_hist,
        spacing_samples=spacing_samples,
        f_n_trace=f_n_trace,
        zeta_trace=zeta_trace,
        potential_diff_trace=pot_trace,
        mean_energy=float(np.mean(energies)),
        mean_energy_se=se,
        r_hat=r_hat,
        converged=bool(r_hat <= 1.1),
        acceptance=accepted / max(1, proposed),
        chain_count_means=chain_count_means,
        samples=flat,
    )
