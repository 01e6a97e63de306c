"""Model parameters and right-hand sides of the coupled resource/strategy dynamics.

The shared resource R follows logistic growth minus extraction by a population
split into cooperators (fraction x, sustainable extraction) and defectors
(fraction 1-x, unsustainable extraction). Six alternative update rules drive
the strategy dynamics: three pairwise imitation rules (replicator, Moran,
Fermi) whose switch probabilities compare payoffs, and three resource-driven
rules (linear, unit-step, logistic) whose switch probabilities depend on R
directly.

All rate functions broadcast over numpy arrays so the same code serves scalar
evaluation, finite differencing, and batched grid integration.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit


class DomainError(ValueError):
    """Inputs left the regime where a rate expression is defined."""


class UpdateRule(str, Enum):
    """Driver of the strategy-switch probabilities."""

    REPLICATOR = "replicator"
    MORAN = "moran"
    FERMI = "fermi"
    LINEAR = "linear"
    UNIT_STEP = "unit-step"
    LOGISTIC = "logistic"

    @property
    def pairwise(self) -> bool:
        """True for imitation rules (payoff comparison); transition rates
        carry the encounter factor x(1-x)."""
        return self in (UpdateRule.REPLICATOR, UpdateRule.MORAN, UpdateRule.FERMI)


def rule_from_name(name: str) -> UpdateRule:
    try:
        return UpdateRule(name)
    except ValueError:
        valid = ", ".join(r.value for r in UpdateRule)
        raise ValueError(f"unknown rule {name!r}; valid rules: {valid}") from None


@dataclass(frozen=True)
class ModelParams:
    """All model constants.

    T       -- natural growth rate of the resource (> 0)
    ec_hat  -- normalized cooperator extraction N*e_C/T, in (0, 1)
    ed_hat  -- normalized defector extraction N*e_D/T, > 1
    w       -- greed parameter in [-1, 0]; 0 only as degenerate test case
    c       -- resource threshold for unit-step and logistic rules, in (0, 1)
    k       -- logistic intensity (> 0)
    N       -- population size (positive integer), used to recover raw
               extraction rates and by the stochastic module

    Defaults are the reference configuration used throughout the output
    artifacts (T=2, ec_hat=0.7, ed_hat=2, w=-1, c=0.5, k=10, N=100).
    """

    T: float = 2.0
    ec_hat: float = 0.7
    ed_hat: float = 2.0
    w: float = -1.0
    c: float = 0.5
    k: float = 10.0
    N: int = 100

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not 0 < self.ec_hat < 1:
            raise ValueError(f"ec_hat must satisfy 0 < ec_hat < 1, got {self.ec_hat}")
        if not self.ed_hat > 1:
            raise ValueError(f"ed_hat must satisfy ed_hat > 1, got {self.ed_hat}")
        if not -1 <= self.w <= 0:
            raise ValueError(f"w must lie in [-1, 0], got {self.w}")
        if not 0 < self.c < 1:
            raise ValueError(f"c must satisfy 0 < c < 1, got {self.c}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise ValueError(f"N must be a positive integer, got {self.N}")
        # Moran denominator 1 - w + w*U must stay positive for every attainable
        # mean payoff; the worst case is U = e_D (all defectors at R = 1).
        if 1.0 - self.w + self.w * self.e_d <= 0:
            raise ValueError(
                "Moran denominator 1 - w + w*U is non-positive at the maximum "
                f"mean payoff e_D = {self.e_d}; reduce ed_hat or increase N"
            )

    @property
    def e_c(self) -> float:
        """Raw cooperator extraction rate, e_C = T*ec_hat/N."""
        return self.T * self.ec_hat / self.N

    @property
    def e_d(self) -> float:
        """Raw defector extraction rate, e_D = T*ed_hat/N."""
        return self.T * self.ed_hat / self.N

    @property
    def delta_u_max(self) -> float:
        """Maximum payoff difference e_D - e_C (attained at R = 1)."""
        return self.e_d - self.e_c


@dataclass(frozen=True)
class SystemState:
    """The pair (R, x): resource level and cooperator fraction."""

    R: float
    x: float

    def __post_init__(self):
        if not 0 <= self.R <= 1:
            raise ValueError(f"R must lie in [0, 1], got {self.R}")
        if not 0 <= self.x <= 1:
            raise ValueError(f"x must lie in [0, 1], got {self.x}")


@dataclass(frozen=True)
class Payoffs:
    """Per-strategy payoffs at a state: u_c = R*e_C, u_d = R*e_D."""

    u_c: float
    u_d: float
    u_mean: float


def payoffs(s: SystemState, p: ModelParams) -> Payoffs:
    u_c = s.R * p.e_c
    u_d = s.R * p.e_d
    return Payoffs(u_c=u_c, u_d=u_d, u_mean=s.x * u_c + (1.0 - s.x) * u_d)


# ---------------------------------------------------------------------------
# raw (array-capable) rate functions
# ---------------------------------------------------------------------------

def resource_rate(R, x, p: ModelParams):
    """dR/dt = T*(R(1-R) - R*(x*ec_hat + (1-x)*ed_hat)); K normalized to 1."""
    return p.T * (R * (1.0 - R) - R * (x * p.ec_hat + (1.0 - x) * p.ed_hat))


def _resource_switch(rule: UpdateRule, R, p: ModelParams):
    """Cooperator->defector switch probability for the resource-driven rules."""
    if rule is UpdateRule.LINEAR:
        return np.asarray(R, dtype=float) + 0.0
    if rule is UpdateRule.UNIT_STEP:
        # Heaviside with theta[0] = 1 (right-continuous convention)
        return np.where(np.asarray(R) >= p.c, 1.0, 0.0)
    if rule is UpdateRule.LOGISTIC:
        return expit(p.k * (np.asarray(R, dtype=float) - p.c))
    raise ValueError(f"not a resource-driven rule: {rule}")


def _moran_denominator(R, x, p: ModelParams):
    u_mean = R * (x * p.e_c + (1.0 - x) * p.e_d)
    return 1.0 - p.w + p.w * u_mean


def switch_rates(rule: UpdateRule, R, x, p: ModelParams):
    """(p_dc, p_cd): defector->cooperator and cooperator->defector switch
    probabilities. Array-capable."""
    if rule is UpdateRule.REPLICATOR:
        R = np.asarray(R, dtype=float)
        return 0.5 - 0.5 * p.w * R, 0.5 + 0.5 * p.w * R
    if rule is UpdateRule.MORAN:
        denom = _moran_denominator(R, x, p)
        if np.any(denom <= 0):
            raise DomainError("Moran denominator 1 - w + w*<U> is non-positive")
        p_dc = (1.0 - p.w + p.w * R * p.e_c) / denom
        p_cd = (1.0 - p.w + p.w * R * p.e_d) / denom
        return p_dc, p_cd
    if rule is UpdateRule.FERMI:
        d = p.w * np.asarray(R, dtype=float) * (p.e_c - p.e_d)
        return expit(d), expit(-d)
    p_cd = _resource_switch(rule, R, p)
    return 1.0 - p_cd, p_cd


def strategy_rate(rule: UpdateRule, R, x, p: ModelParams):
    """dx/dt for the active rule. Array-capable."""
    if rule is UpdateRule.REPLICATOR:
        return -p.w * R * x * (1.0 - x)
    if rule is UpdateRule.MORAN:
        denom = _moran_denominator(R, x, p)
        if np.any(denom <= 0):
            raise DomainError("Moran denominator 1 - w + w*<U> is non-positive")
        return p.w * R * x * (1.0 - x) * (p.e_c - p.e_d) / denom
    if rule is UpdateRule.FERMI:
        return x * (1.0 - x) * np.tanh(0.5 * p.w * R * (p.e_c - p.e_d))
    return 1.0 - x - _resource_switch(rule, R, p)


# ---------------------------------------------------------------------------
# public scalar operations
# ---------------------------------------------------------------------------

def resource_derivative(s: SystemState, p: ModelParams) -> float:
    return float(resource_rate(s.R, s.x, p))


def strategy_derivative(rule: UpdateRule, s: SystemState, p: ModelParams) -> float:
    return float(strategy_rate(rule, s.R, s.x, p))


def coupled_derivative(rule: UpdateRule, s: SystemState, p: ModelParams) -> tuple[float, float]:
    return resource_derivative(s, p), strategy_derivative(rule, s, p)


def switch_probabilities(rule: UpdateRule, s: SystemState, p: ModelParams) -> tuple[float, float]:
    """(p_dc, p_cd) at a state.

    Note: the Moran p_dc is a relative-fitness ratio and can exceed 1 by at
    most |w|*e_D/(1 - w + w*e_D) when the focal payoff is below the mean; the
    other five rules stay in [0, 1] exactly.
    """
    p_dc, p_cd = switch_rates(rule, s.R, s.x, p)
    return float(p_dc), float(p_cd)
