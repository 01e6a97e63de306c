"""Fixed-step RK4 integration of the coupled system.

The flow preserves the unit square, but a discrete step can overshoot it, so
every accepted step is clamped back to [0,1]^2. A resource level below
``eps_extinct`` is snapped to exactly 0, which is absorbing (dR/dt vanishes
identically at R = 0 for every rule). Convergence is declared when the
derivative norm stays below ``eps_converge`` for two consecutive steps; a
single-step test misfires near the slow manifolds at x near 0 or 1.

A fixed step is used deliberately: the unit-step rule has a discontinuous
right-hand side at R = c and adaptive error control would stall on it. For
the same rule, trajectories that never satisfy the convergence test report
the time-average of the final 10% of steps as a chattering endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .model import ModelParams, SystemState, UpdateRule, resource_rate, strategy_rate


class IntegrationError(RuntimeError):
    """A non-finite state was encountered (step size too large)."""


class Terminal(str, Enum):
    CONVERGED = "converged"
    HORIZON_REACHED = "horizon-reached"


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_max: float = 200.0
    eps_converge: float = 1e-9
    eps_extinct: float = 1e-9
    sample_every: int = 100

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_max > self.dt:
            raise ValueError(f"t_max must exceed dt, got t_max={self.t_max}, dt={self.dt}")
        if not self.eps_converge > 0:
            raise ValueError("eps_converge must be positive")
        if not self.eps_extinct > 0:
            raise ValueError("eps_extinct must be positive")
        if not (isinstance(self.sample_every, int) and self.sample_every >= 1):
            raise ValueError("sample_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_max / self.dt)))


@dataclass
class Trajectory:
    times: np.ndarray
    R: np.ndarray
    x: np.ndarray
    terminal: Terminal

    def final_state(self) -> SystemState:
        return SystemState(R=float(self.R[-1]), x=float(self.x[-1]))

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class Endpoint:
    state: SystemState
    terminal: Terminal
    steps: int
    chattering: bool = False


@dataclass
class BatchResult:
    """Endpoints of a batch of independent integrations (row-major order)."""

    R: np.ndarray
    x: np.ndarray
    steps: np.ndarray
    converged: np.ndarray
    chattering: np.ndarray


def _rhs(rule: UpdateRule, p: ModelParams):
    def f(R, x):
        return resource_rate(R, x, p), strategy_rate(rule, R, x, p)

    return f


def _check_finite(R, x):
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(x))):
        raise IntegrationError("non-finite state encountered; reduce dt")


def integrate_batch(rule: UpdateRule, p: ModelParams, R0, x0,
                    cfg: IntegratorConfig) -> BatchResult:
    """Integrate many initial conditions at once.

    Vectorized over the batch axis; converged entries are retired from the
    active set as they finish, so results are independent of batch order.
    """
    f = _rhs(rule, p)
    R = np.array(R0, dtype=float).ravel().copy()
    x = np.array(x0, dtype=float).ravel().copy()
    n = R.size
    if np.any(R < 0) or np.any(R > 1) or np.any(x < 0) or np.any(x > 1):
        raise ValueError("initial conditions must lie in [0,1]^2")

    n_steps = cfg.n_steps
    tail_start = int(math.floor(0.9 * n_steps))
    h = cfg.dt
    eps2 = cfg.eps_converge ** 2
    chatter_average = rule is UpdateRule.UNIT_STEP

    out_R = np.empty(n)
    out_x = np.empty(n)
    out_steps = np.full(n, n_steps, dtype=int)
    out_conv = np.zeros(n, dtype=bool)
    out_chat = np.zeros(n, dtype=bool)

    idx = np.arange(n)
    consec = np.zeros(n, dtype=np.int8)
    tail_R = np.zeros(n)
    tail_x = np.zeros(n)
    tail_n = np.zeros(n, dtype=int)

    k1r, k1x = f(R, x)
    for step in range(1, n_steps + 1):
        k2r, k2x = f(R + 0.5 * h * k1r, x + 0.5 * h * k1x)
        k3r, k3x = f(R + 0.5 * h * k2r, x + 0.5 * h * k2x)
        k4r, k4x = f(R + h * k3r, x + h * k3x)
        R = np.clip(R + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r), 0.0, 1.0)
        x = np.clip(x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x), 0.0, 1.0)
        R[R < cfg.eps_extinct] = 0.0  # absorbing: dR/dt vanishes at R = 0

        k1r, k1x = f(R, x)
        norm2 = k1r * k1r + k1x * k1x
        consec = np.where(norm2 < eps2, consec + 1, 0).astype(np.int8)
        done = consec >= 2
        if done.any():
            sel = idx[done]
            out_R[sel] = R[done]
            out_x[sel] = x[done]
            out_steps[sel] = step
            out_conv[sel] = True
            keep = ~done
            idx, R, x = idx[keep], R[keep], x[keep]
            k1r, k1x, consec = k1r[keep], k1x[keep], consec[keep]
        if idx.size == 0:
            break
        if step >= tail_start:
            tail_R[idx] += R
            tail_x[idx] += x
            tail_n[idx] += 1
        if step % 512 == 0:
            _check_finite(R, x)

    if idx.size:
        _check_finite(R, x)
        if chatter_average:
            avg_ok = tail_n[idx] > 0
            out_R[idx] = np.where(avg_ok, tail_R[idx] / np.maximum(tail_n[idx], 1), R)
            out_x[idx] = np.where(avg_ok, tail_x[idx] / np.maximum(tail_n[idx], 1), x)
            out_chat[idx] = avg_ok
        else:
            out_R[idx] = R
            out_x[idx] = x
    return BatchResult(R=out_R, x=out_x, steps=out_steps,
                       converged=out_conv, chattering=out_chat)


def integrate(rule: UpdateRule, p: ModelParams, s0: SystemState,
              cfg: IntegratorConfig) -> Trajectory:
    """Single trajectory with decimated samples (every ``sample_every`` steps)."""
    f = _rhs(rule, p)
    h = cfg.dt
    n_steps = cfg.n_steps
    eps2 = cfg.eps_converge ** 2

    R, x = float(s0.R), float(s0.x)
    times = [0.0]
    Rs = [R]
    xs = [x]
    consec = 0
    terminal = Terminal.HORIZON_REACHED
    k1r, k1x = f(R, x)
    for step in range(1, n_steps + 1):
        k2r, k2x = f(R + 0.5 * h * k1r, x + 0.5 * h * k1x)
        k3r, k3x = f(R + 0.5 * h * k2r, x + 0.5 * h * k2x)
        k4r, k4x = f(R + h * k3r, x + h * k3x)
        R = min(max(R + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r), 0.0), 1.0)
        x = min(max(x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x), 0.0), 1.0)
        if R < cfg.eps_extinct:
            R = 0.0
        if not (math.isfinite(R) and math.isfinite(x)):
            raise IntegrationError("non-finite state encountered; reduce dt")
        recorded = False
        if step % cfg.sample_every == 0:
            times.append(step * h)
            Rs.append(R)
            xs.append(x)
            recorded = True
        k1r, k1x = f(R, x)
        consec = consec + 1 if k1r * k1r + k1x * k1x < eps2 else 0
        if consec >= 2:
            terminal = Terminal.CONVERGED
            if not recorded:
                times.append(step * h)
                Rs.append(R)
                xs.append(x)
            break
    else:
        if n_steps % cfg.sample_every != 0:
            times.append(n_steps * h)
            Rs.append(R)
            xs.append(x)
    return Trajectory(times=np.array(times), R=np.array(Rs), x=np.array(xs),
                      terminal=terminal)


def integrate_to_equilibrium(rule: UpdateRule, p: ModelParams, s0: SystemState,
                             cfg: IntegratorConfig) -> Endpoint:
    """Endpoint-only integration; HORIZON_REACHED signals 'unresolved'."""
    res = integrate_batch(rule, p, [s0.R], [s0.x], cfg)
    terminal = Terminal.CONVERGED if res.converged[0] else Terminal.HORIZON_REACHED
    return Endpoint(state=SystemState(R=float(res.R[0]), x=float(res.x[0])),
                    terminal=terminal, steps=int(res.steps[0]),
                    chattering=bool(res.chattering[0]))
