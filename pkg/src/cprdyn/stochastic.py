"""Finite-population Monte Carlo realization of the strategy dynamics.

One micro step: a single strategy-update attempt (cooperator count moves by
at most one) followed by an explicit-Euler resource step, both with
dt = 1/N, so macro time is t = tau/N. In the large-N limit the per-step
drift of x reproduces the deterministic strategy derivative and the
fluctuations shrink like 1/sqrt(N); both are validated empirically rather
than by solving the Fokker-Planck density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (ModelParams, SystemState, UpdateRule, resource_rate,
                    switch_rates)


@dataclass(frozen=True)
class MicroState:
    """Cooperator count, resource level, and micro-step counter (t = tau/N)."""

    n_c: int
    R: float
    tau: int = 0

    def validate(self, p: ModelParams):
        if not 0 <= self.n_c <= p.N:
            raise ValueError(f"n_c must lie in [0, {p.N}], got {self.n_c}")
        if not 0 <= self.R <= 1:
            raise ValueError(f"R must lie in [0, 1], got {self.R}")


@dataclass
class EnsembleStats:
    sample_times: np.ndarray
    mean_R: np.ndarray
    std_R: np.ndarray
    mean_x: np.ndarray
    std_x: np.ndarray
    replicas: int
    seed: int


def transition_rates(rule: UpdateRule, n_c, R, p: ModelParams):
    """(t_plus, t_minus): probabilities that one micro step moves the
    cooperator count up or down. Array-capable over (n_c, R)."""
    x = np.asarray(n_c, dtype=float) / p.N
    p_dc, p_cd = switch_rates(rule, R, x, p)
    if rule.pairwise:
        enc = x * (1.0 - x)
        return enc * p_dc, enc * p_cd
    return (1.0 - x) * p_dc, x * p_cd


def step_micro(state: MicroState, rule: UpdateRule, p: ModelParams,
               rng: np.random.Generator) -> MicroState:
    """One strategy-update attempt plus one Euler resource step (dt = 1/N).

    The resource step uses the pre-update cooperator fraction so both
    coordinates advance from the same state, as in the coupled ODEs.
    """
    state.validate(p)
    t_plus, t_minus = transition_rates(rule, state.n_c, state.R, p)
    u = rng.random()
    n_c = state.n_c
    if u < t_plus:
        n_c += 1
    elif u < t_plus + t_minus:
        n_c -= 1
    x_old = state.n_c / p.N
    R = state.R + resource_rate(state.R, x_old, p) / p.N
    R = min(max(float(R), 0.0), 1.0)
    return MicroState(n_c=n_c, R=R, tau=state.tau + 1)


def one_step_drift(rule: UpdateRule, p: ModelParams, s: SystemState,
                   trials: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of E[delta x per micro step] * N at a fixed state,
    with its standard error. Matches the deterministic strategy derivative
    in expectation."""
    n_c = int(np.floor(s.x * p.N + 0.5))
    t_plus, t_minus = transition_rates(rule, n_c, s.R, p)
    rng = np.random.default_rng(seed)
    u = rng.random(trials)
    delta = (u < t_plus).astype(float) - ((u >= t_plus) & (u < t_plus + t_minus))
    return float(delta.mean()), float(delta.std(ddof=1) / np.sqrt(trials))


def initial_cooperators(x0: float, N: int) -> int:
    """round(x0 * N) with exact ties broken toward cooperators."""
    return int(np.floor(x0 * N + 0.5))


def run_ensemble(rule: UpdateRule, p: ModelParams, s0: SystemState,
                 replicas: int, t_end: float, seed: int,
                 n_samples: int = 101) -> EnsembleStats:
    """Ensemble of independent finite-N realizations.

    Each replica owns the RNG stream seeded by (seed, replica index); replicas
    advance in lockstep (vectorized) but consume their own streams, so stats
    are independent of scheduling and bit-reproducible.
    """
    if replicas < 2:
        raise ValueError(f"need at least 2 replicas, got {replicas}")
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    N = p.N
    n_steps = int(round(t_end * N))
    sample_taus = np.unique(np.rint(np.linspace(0.0, t_end, n_samples) * N).astype(int))
    sample_taus = sample_taus[sample_taus <= n_steps]

    n_c = np.full(replicas, initial_cooperators(s0.x, N), dtype=np.int64)
    R = np.full(replicas, float(s0.R))
    gens = [np.random.default_rng((seed, rep)) for rep in range(replicas)]

    times, mR, sR, mx, sx = [], [], [], [], []

    def record(tau):
        x = n_c / N
        times.append(tau / N)
        mR.append(R.mean())
        sR.append(R.std(ddof=1))
        mx.append(x.mean())
        sx.append(x.std(ddof=1))

    sample_set = set(int(t) for t in sample_taus)
    if 0 in sample_set:
        record(0)

    chunk = 8192
    tau = 0
    while tau < n_steps:
        this = min(chunk, n_steps - tau)
        u = np.empty((replicas, this))
        for rep, g in enumerate(gens):
            u[rep] = g.random(this)
        for i in range(this):
            x = n_c / N
            t_plus, t_minus = transition_rates(rule, n_c, R, p)
            col = u[:, i]
            up = col < t_plus
            down = (~up) & (col < t_plus + t_minus)
            n_c = n_c + up.astype(np.int64) - down.astype(np.int64)
            R = np.clip(R + resource_rate(R, x, p) / N, 0.0, 1.0)
            tau += 1
            if tau in sample_set:
                record(tau)

    return EnsembleStats(sample_times=np.array(times), mean_R=np.array(mR),
                         std_R=np.array(sR), mean_x=np.array(mx),
                         std_x=np.array(sx), replicas=replicas, seed=seed)
