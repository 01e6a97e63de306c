"""Stationary points, Jacobians, and stability classification.

The pairwise rules share a line of depleted equilibria {R=0, any x} plus the
sustainable point (1 - ec_hat, 1); the linear and unit-step rules have
isolated depleted and sustainable points in closed form; the logistic rule
has no closed form and its fixed points are located numerically by damped
iteration on the nullclines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit

from .model import (DomainError, ModelParams, SystemState, UpdateRule,
                    resource_rate, strategy_rate)

log = logging.getLogger(__name__)


class EquilibriumKind(str, Enum):
    DEPLETED_POINT = "depleted_point"
    DEPLETED_LINE = "depleted_line"
    SUSTAINABLE_POINT = "sustainable_point"
    NUMERICAL_FIXED_POINT = "numerical_fixed_point"


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SADDLE = "saddle"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Equilibrium:
    """A stationary point; for DEPLETED_LINE, x is a free coordinate (None)."""

    kind: EquilibriumKind
    R: float
    x: float | None

    def state(self, x: float | None = None) -> SystemState:
        if self.kind is EquilibriumKind.DEPLETED_LINE:
            if x is None:
                raise ValueError("depleted line needs an explicit x coordinate")
            return SystemState(R=self.R, x=x)
        if x is not None:
            raise ValueError("x is only free on the depleted line")
        return SystemState(R=self.R, x=self.x)


@dataclass
class EquilibriumReport:
    equilibrium: Equilibrium
    eval_state: SystemState
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    det: float
    trace: float
    stability: Stability


def neutral_threshold_values(ec_hat: float, ed_hat: float) -> float:
    """x-threshold (ed_hat - 1)/(ed_hat - ec_hat) below which the depleted
    line is neutrally stable for the pairwise rules; clamped to [0, 1]."""
    if ed_hat <= ec_hat:
        raise DomainError(f"requires ed_hat > ec_hat, got {ec_hat}, {ed_hat}")
    return float(min(max((ed_hat - 1.0) / (ed_hat - ec_hat), 0.0), 1.0))


def neutral_threshold(p: ModelParams) -> float:
    return neutral_threshold_values(p.ec_hat, p.ed_hat)


def logistic_fixed_points(p: ModelParams, damping: float = 0.5,
                          max_iter: int = 10_000, tol: float = 1e-12,
                          n_seeds: int = 5, dedupe: float = 1e-6) -> list[Equilibrium]:
    """Fixed points of the logistic-rule system by damped nullcline iteration.

    The R-nullcline is R = 0 or R = 1 - ed_hat + x*(ed_hat - ec_hat) (clipped
    to the box); the x-nullcline is x = 1 - sigmoid(k*(R - c)). Iterates the
    damped composite map from an n_seeds x n_seeds grid and deduplicates.
    """
    roots: list[tuple[float, float]] = []
    grid = np.linspace(0.0, 1.0, n_seeds)
    # (branch R=0, seed) plus (interior branch, seed grid); the R-nullcline
    # has two branches and the composite map follows only one at a time.
    seeds = [(True, 0.0, x0) for x0 in grid]
    seeds += [(False, float(r0), float(x0)) for r0 in grid for x0 in grid]
    for depleted_branch, r0, x0 in seeds:
        R, x = r0, x0
        converged = False
        for _ in range(max_iter):
            if depleted_branch:
                R_t = 0.0
            else:
                R_t = min(max(1.0 - p.ed_hat + x * (p.ed_hat - p.ec_hat), 0.0), 1.0)
            x_t = 1.0 - float(expit(p.k * (R - p.c)))
            R_n = R + damping * (R_t - R)
            x_n = x + damping * (x_t - x)
            if abs(R_n - R) < tol and abs(x_n - x) < tol:
                R, x = R_n, x_n
                converged = True
                break
            R, x = R_n, x_n
        if converged:
            res = np.hypot(resource_rate(R, x, p),
                           strategy_rate(UpdateRule.LOGISTIC, R, x, p))
            if res <= 1e-10 and not any(abs(R - r) < dedupe and abs(x - q) < dedupe
                                        for r, q in roots):
                roots.append((float(R), float(x)))
    if not roots:
        log.warning("logistic fixed-point iteration found no roots "
                    "(k=%g, c=%g); reporting empty set", p.k, p.c)
    roots.sort()
    return [Equilibrium(kind=EquilibriumKind.NUMERICAL_FIXED_POINT, R=r, x=q)
            for r, q in roots]


def stationary_points(rule: UpdateRule, p: ModelParams) -> list[Equilibrium]:
    """Closed-form stationary points (numerical for the logistic rule)."""
    if rule.pairwise:
        return [
            Equilibrium(EquilibriumKind.DEPLETED_LINE, R=0.0, x=None),
            Equilibrium(EquilibriumKind.SUSTAINABLE_POINT, R=1.0 - p.ec_hat, x=1.0),
        ]
    if rule is UpdateRule.LINEAR:
        d = 1.0 - p.ec_hat + p.ed_hat
        return [
            Equilibrium(EquilibriumKind.DEPLETED_POINT, R=0.0, x=1.0),
            Equilibrium(EquilibriumKind.SUSTAINABLE_POINT,
                        R=(1.0 - p.ec_hat) / d, x=p.ed_hat / d),
        ]
    if rule is UpdateRule.UNIT_STEP:
        # closed form assumes the sustainable level sits below the threshold
        # (1 - ec_hat < c); otherwise the flow slides at R = c instead.
        return [
            Equilibrium(EquilibriumKind.DEPLETED_POINT, R=0.0, x=1.0),
            Equilibrium(EquilibriumKind.SUSTAINABLE_POINT, R=1.0 - p.ec_hat, x=1.0),
        ]
    return logistic_fixed_points(p)


def jacobian(rule: UpdateRule, p: ModelParams, s: SystemState,
             h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of the coupled right-hand side."""
    if rule is UpdateRule.UNIT_STEP and abs(s.R - p.c) < h:
        raise DomainError(
            f"unit-step rule is discontinuous at R = c = {p.c}; cannot "
            f"differentiate at R = {s.R}")
    R, x = s.R, s.x

    def f(R_, x_):
        return np.array([resource_rate(R_, x_, p),
                         strategy_rate(rule, R_, x_, p)], dtype=float)

    dR = (f(R + h, x) - f(R - h, x)) / (2.0 * h)
    dx = (f(R, x + h) - f(R, x - h)) / (2.0 * h)
    return np.column_stack([dR, dx])


def replicator_jacobian(p: ModelParams, s: SystemState) -> np.ndarray:
    """Analytic Jacobian of the replicator-rule system (finite-difference
    cross-check anchor)."""
    R, x = s.R, s.x
    e_bar = x * p.ec_hat + (1.0 - x) * p.ed_hat
    return np.array([
        [p.T * (1.0 - 2.0 * R - e_bar), p.T * R * (p.ed_hat - p.ec_hat)],
        [-p.w * x * (1.0 - x), -p.w * R * (1.0 - 2.0 * x)],
    ])


def classify(matrix: np.ndarray, tol: float = 1e-8) -> Stability:
    """Det/Tr stability test extended with eigenvalues.

    The matrix is normalized by its spectral radius first, so the verdict is
    invariant under positive rescaling. Neutral means a (near-)zero
    eigenvalue with no positive real part; a zero eigenvalue next to a
    positive one is reported as unstable.
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise ValueError("classify expects a finite 2x2 matrix")
    eig = np.linalg.eigvals(m)
    scale = float(np.max(np.abs(eig)))
    if scale <= tol:
        return Stability.NEUTRAL
    re = eig.real / scale
    det = float(np.linalg.det(m)) / scale**2
    tr = float(np.trace(m)) / scale
    if det > tol and tr < -tol:
        return Stability.STABLE
    if det < -tol:
        return Stability.SADDLE
    if np.max(re) > tol:
        return Stability.UNSTABLE
    if np.any(np.abs(re) <= tol):
        return Stability.NEUTRAL
    return Stability.UNSTABLE


def report(rule: UpdateRule, p: ModelParams, eq: Equilibrium,
           line_x: float | None = None, tol: float = 1e-8) -> EquilibriumReport:
    """Jacobian, eigenvalues, and stability class at an equilibrium.

    For a depleted line, ``line_x`` picks the evaluation point (defaults to
    the midpoint of the neutrally stable segment).
    """
    if eq.kind is EquilibriumKind.DEPLETED_LINE:
        x = line_x if line_x is not None else 0.5 * neutral_threshold(p)
        s = eq.state(x)
    else:
        s = eq.state()
    jac = jacobian(rule, p, s)
    eig = np.linalg.eigvals(jac)
    return EquilibriumReport(
        equilibrium=eq,
        eval_state=s,
        jacobian=jac,
        eigenvalues=eig,
        det=float(np.linalg.det(jac)),
        trace=float(np.trace(jac)),
        stability=classify(jac, tol=tol),
    )


def analyze(rule: UpdateRule, p: ModelParams,
            line_x: float | None = None) -> list[EquilibriumReport]:
    return [report(rule, p, eq, line_x=line_x) for eq in stationary_points(rule, p)]
