import numpy as np
import pytest

from cprdyn import (EnsembleStats, MicroState, ModelParams, SystemState,
                    UpdateRule, initial_cooperators, one_step_drift,
                    run_ensemble, step_micro, transition_rates)
from cprdyn.model import strategy_rate

PAPER = ModelParams()


class TestTransitionRates:
    def test_no_cooperators_is_absorbing_for_pairwise(self):
        up, down = transition_rates(UpdateRule.REPLICATOR, 0, 1.0, PAPER)
        assert up == 0.0 and down == 0.0

    def test_all_cooperators_is_absorbing_for_pairwise(self):
        up, down = transition_rates(UpdateRule.MORAN, PAPER.N, 0.5, PAPER)
        assert up == 0.0 and down == 0.0

    def test_linear_rule_from_zero_cooperators(self):
        # x=0, so t+ = (1-x) p_dc = 1 - p = 1 - (x + R) = 0.6
        up, down = transition_rates(UpdateRule.LINEAR, 0, 0.4, PAPER)
        assert up == pytest.approx(0.6)
        assert down == 0.0

    def test_replicator_half_and_half(self):
        # x=0.5, R=1, w=-1: p_dc = 1/2 - (w/2) R = 1, so t+ = 0.25, t- = 0
        up, down = transition_rates(UpdateRule.REPLICATOR, PAPER.N // 2, 1.0, PAPER)
        assert up == pytest.approx(0.25)
        assert down == pytest.approx(0.0, abs=1e-15)

    def test_net_rate_matches_mean_field(self):
        for rule in UpdateRule:
            for n_c in (10, 37, 80):
                x = n_c / PAPER.N
                up, down = transition_rates(rule, n_c, 0.6, PAPER)
                assert up - down == pytest.approx(
                    strategy_rate(rule, 0.6, x, PAPER), abs=1e-12), rule


class TestStepMicro:
    def test_resource_euler_uses_pre_update_composition(self):
        s = MicroState(n_c=PAPER.N, R=0.5, tau=0)
        rng = np.random.default_rng(0)
        out = step_micro(s, UpdateRule.REPLICATOR, PAPER, rng)
        # all-cooperator state is absorbing in x; R moves by dt * dR/dt
        dt = 1.0 / PAPER.N
        expected = 0.5 + dt * PAPER.T * (0.5 * 0.5 - 0.5 * PAPER.ec_hat)
        assert out.n_c == PAPER.N
        assert out.R == pytest.approx(expected, abs=1e-12)
        assert out.tau == 1

    def test_strategy_moves_by_at_most_one(self):
        rng = np.random.default_rng(7)
        s = MicroState(n_c=50, R=0.5, tau=0)
        for _ in range(200):
            nxt = step_micro(s, UpdateRule.FERMI, PAPER, rng)
            assert abs(nxt.n_c - s.n_c) <= 1
            assert 0.0 <= nxt.R <= 1.0
            s = nxt

    def test_state_validation(self):
        with pytest.raises(ValueError):
            MicroState(n_c=-1, R=0.5, tau=0).validate(PAPER)
        with pytest.raises(ValueError):
            MicroState(n_c=PAPER.N + 1, R=0.5, tau=0).validate(PAPER)
        with pytest.raises(ValueError):
            MicroState(n_c=10, R=1.5, tau=0).validate(PAPER)


class TestDrift:
    def test_w_zero_is_driftless(self):
        # neutral imitation: both switch probabilities are 1/2, so the
        # expected change in n_c vanishes for pairwise rules
        p = ModelParams(w=0.0)
        s = SystemState(R=0.5, x=0.4)
        mean, se = one_step_drift(UpdateRule.REPLICATOR, p, s, trials=40000, seed=3)
        assert abs(mean) < 4 * se

    def test_drift_sign_favors_cooperators(self):
        # w<0 makes cooperation advantageous wherever R>0
        s = SystemState(R=0.8, x=0.4)
        mean, se = one_step_drift(UpdateRule.REPLICATOR, PAPER, s, trials=40000, seed=3)
        expected = strategy_rate(UpdateRule.REPLICATOR, 0.8, 0.4, PAPER)
        assert expected > 0
        assert mean == pytest.approx(expected, abs=4 * se)


class TestInitialCooperators:
    @pytest.mark.parametrize("x0,N,expected", [
        (0.5, 100, 50),
        (0.0, 100, 0),
        (1.0, 100, 100),
        (0.305, 10, 3),
        (0.35, 10, 4),  # rounds half up
    ])
    def test_rounding(self, x0, N, expected):
        assert initial_cooperators(x0, N) == expected


class TestEnsemble:
    def test_shapes_and_times(self):
        stats = run_ensemble(UpdateRule.REPLICATOR, PAPER, SystemState(0.8, 0.9),
                             replicas=5, t_end=2.0, seed=1, n_samples=21)
        assert isinstance(stats, EnsembleStats)
        assert stats.sample_times.shape == (21,)
        assert stats.sample_times[0] == 0.0
        assert stats.sample_times[-1] == pytest.approx(2.0)
        for arr in (stats.mean_R, stats.std_R, stats.mean_x, stats.std_x):
            assert arr.shape == (21,)
            assert np.all(np.isfinite(arr))

    def test_seed_reproducibility(self):
        args = (UpdateRule.FERMI, PAPER, SystemState(0.5, 0.5))
        a = run_ensemble(*args, replicas=8, t_end=1.0, seed=42)
        b = run_ensemble(*args, replicas=8, t_end=1.0, seed=42)
        assert np.array_equal(a.mean_R, b.mean_R)
        assert np.array_equal(a.std_x, b.std_x)

    def test_seed_sensitivity(self):
        args = (UpdateRule.FERMI, PAPER, SystemState(0.5, 0.5))
        a = run_ensemble(*args, replicas=8, t_end=1.0, seed=42)
        b = run_ensemble(*args, replicas=8, t_end=1.0, seed=43)
        assert not np.array_equal(a.mean_x, b.mean_x)

    def test_replica_count_does_not_shift_streams(self):
        # replica r draws the same randomness regardless of ensemble size
        args = (UpdateRule.REPLICATOR, PAPER, SystemState(0.5, 0.5))
        small = run_ensemble(*args, replicas=2, t_end=0.5, seed=5)
        big = run_ensemble(*args, replicas=6, t_end=0.5, seed=5)
        # means differ, but the t=0 moments agree exactly
        assert small.mean_R[0] == big.mean_R[0] == 0.5
        assert small.std_x[0] == big.std_x[0] == 0.0

    def test_validation(self):
        s = SystemState(0.5, 0.5)
        with pytest.raises(ValueError):
            run_ensemble(UpdateRule.LINEAR, PAPER, s, replicas=1, t_end=1.0, seed=0)
        with pytest.raises(ValueError):
            run_ensemble(UpdateRule.LINEAR, PAPER, s, replicas=4, t_end=0.0, seed=0)

    def test_extinct_resource_stays_extinct(self):
        s = SystemState(0.0, 0.5)
        stats = run_ensemble(UpdateRule.LINEAR, PAPER, s, replicas=4,
                             t_end=2.0, seed=9)
        assert np.all(stats.mean_R == 0.0)
        assert np.all(stats.std_R == 0.0)
