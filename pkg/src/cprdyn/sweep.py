"""Basin-of-attraction sweeps over a grid of initial conditions.

Each grid cell is integrated to its endpoint and classified as depleted,
sustainable, or unresolved. Cells are independent; the batched integrator
evaluates them as one vectorized map, so a rerun is bit-identical regardless
of how the work is scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .integrator import Endpoint, IntegratorConfig, Terminal, integrate_batch
from .model import ModelParams, SystemState, UpdateRule

#: endpoint resource level below which a cell counts as depleted. Looser than
#: the integrator's absorption threshold so that slowly collapsing
#: trajectories cut off at t_max still classify as depleted.
DEPLETION_THRESHOLD = 1e-4


class Outcome(str, Enum):
    DEPLETED = "depleted"
    SUSTAINABLE = "sustainable"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class GridSpec:
    """Inclusive grid over initial conditions (R0 excludes 0, which is
    trivially absorbing)."""

    r0_min: float = 0.01
    r0_max: float = 1.0
    x0_min: float = 0.0
    x0_max: float = 1.0
    n_r: int = 101
    n_x: int = 101

    def __post_init__(self):
        if not 0 < self.r0_min < self.r0_max <= 1:
            raise ValueError(
                f"need 0 < r0_min < r0_max <= 1, got [{self.r0_min}, {self.r0_max}]")
        if not 0 <= self.x0_min < self.x0_max <= 1:
            raise ValueError(
                f"need 0 <= x0_min < x0_max <= 1, got [{self.x0_min}, {self.x0_max}]")
        if self.n_r < 2 or self.n_x < 2:
            raise ValueError(f"need at least 2 points per axis, got {self.n_r}x{self.n_x}")

    @property
    def r_points(self) -> np.ndarray:
        return np.linspace(self.r0_min, self.r0_max, self.n_r)

    @property
    def x_points(self) -> np.ndarray:
        return np.linspace(self.x0_min, self.x0_max, self.n_x)


def classify_endpoint(s: SystemState, terminal: Terminal,
                      chattering: bool = False) -> Outcome:
    if s.R < DEPLETION_THRESHOLD:
        return Outcome.DEPLETED
    if terminal is Terminal.CONVERGED or chattering:
        return Outcome.SUSTAINABLE
    return Outcome.UNRESOLVED


def classify_endpoint_result(e: Endpoint) -> Outcome:
    return classify_endpoint(e.state, e.terminal, e.chattering)


@dataclass
class BasinMap:
    """Per-cell endpoints and outcome classes, shape (n_r, n_x), row-major
    with R0 as the slow axis. ``outcome`` holds the Outcome string values."""

    spec: GridSpec
    final_R: np.ndarray
    final_x: np.ndarray
    outcome: np.ndarray
    steps: np.ndarray
    chattering: np.ndarray

    def mask(self, o: Outcome) -> np.ndarray:
        return self.outcome == o.value

    def counts(self) -> dict[Outcome, int]:
        return {o: int(np.sum(self.mask(o))) for o in Outcome}

    def rows(self):
        """Yield (R0, x0, R_star, x_star, outcome, steps) in row-major order."""
        r_pts, x_pts = self.spec.r_points, self.spec.x_points
        for i in range(self.spec.n_r):
            for j in range(self.spec.n_x):
                yield (r_pts[i], x_pts[j], self.final_R[i, j], self.final_x[i, j],
                       Outcome(str(self.outcome[i, j])), int(self.steps[i, j]))


def run_basin_sweep(rule: UpdateRule, p: ModelParams, grid: GridSpec,
                    cfg: IntegratorConfig) -> BasinMap:
    r_pts, x_pts = grid.r_points, grid.x_points
    R0 = np.repeat(r_pts, grid.n_x)
    x0 = np.tile(x_pts, grid.n_r)
    res = integrate_batch(rule, p, R0, x0, cfg)

    shape = (grid.n_r, grid.n_x)
    final_R = res.R.reshape(shape)
    final_x = res.x.reshape(shape)
    converged = res.converged.reshape(shape)
    chattering = res.chattering.reshape(shape)

    outcome = np.full(shape, Outcome.UNRESOLVED.value, dtype="<U11")
    depleted = final_R < DEPLETION_THRESHOLD
    resolved = converged | chattering
    outcome[resolved & ~depleted] = Outcome.SUSTAINABLE.value
    outcome[depleted] = Outcome.DEPLETED.value
    return BasinMap(spec=grid, final_R=final_R, final_x=final_x,
                    outcome=outcome, steps=res.steps.reshape(shape),
                    chattering=chattering)
