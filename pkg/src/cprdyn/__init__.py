"""Coupled common-pool-resource / strategy dynamics toolkit."""

__version__ = "0.1.0"

from .model import (DomainError, ModelParams, Payoffs, SystemState, UpdateRule,
                    coupled_derivative, payoffs, resource_derivative,
                    rule_from_name, strategy_derivative, switch_probabilities)
from .integrator import (Endpoint, IntegrationError, IntegratorConfig,
                         Terminal, Trajectory, integrate, integrate_batch,
                         integrate_to_equilibrium)
from .equilibria import (Equilibrium, EquilibriumKind, EquilibriumReport,
                         Stability, analyze, classify, jacobian,
                         logistic_fixed_points, neutral_threshold,
                         neutral_threshold_values, replicator_jacobian,
                         stationary_points)
from .sweep import (BasinMap, DEPLETION_THRESHOLD, GridSpec, Outcome,
                    classify_endpoint, classify_endpoint_result,
                    run_basin_sweep)
from .stochastic import (EnsembleStats, MicroState, initial_cooperators,
                         one_step_drift, run_ensemble, step_micro,
                         transition_rates)
