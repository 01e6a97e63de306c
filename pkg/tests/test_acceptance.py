"""End-to-end acceptance checks for the reference parameter configuration
(T=2, e_C=0.7, e_D=2, w=-1, c=0.5). Each test prints a single PASS/FAIL
line so the suite doubles as a checklist."""

import dataclasses
import subprocess
import sys

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from cprdyn import (GridSpec, IntegratorConfig, ModelParams, Outcome,
                    Stability, SystemState, UpdateRule, analyze,
                    integrate, integrate_to_equilibrium, one_step_drift,
                    run_basin_sweep, run_ensemble)
from cprdyn.model import strategy_rate

PAPER = ModelParams()

PAIRWISE = (UpdateRule.REPLICATOR, UpdateRule.MORAN, UpdateRule.FERMI)
CLOSED_FORM = PAIRWISE + (UpdateRule.LINEAR, UpdateRule.UNIT_STEP)


def check(label, ok):
    print(f"{'PASS' if ok else 'FAIL'}: {label}")
    assert ok, label


def sustainable_report(rule):
    reports = [r for r in analyze(rule, PAPER)
               if r.equilibrium.kind.value != "depleted_line"
               and r.equilibrium.R > 0]
    assert len(reports) == 1
    return reports[0]


def test_sustainable_equilibrium_values():
    ok = True
    for rule in (UpdateRule.REPLICATOR, UpdateRule.MORAN, UpdateRule.FERMI,
                 UpdateRule.UNIT_STEP):
        eq = sustainable_report(rule).equilibrium
        ok &= abs(eq.R - 0.3) <= 1e-9 and abs(eq.x - 1.0) <= 1e-9
    eq = sustainable_report(UpdateRule.LINEAR).equilibrium
    ok &= abs(eq.R - 0.3 / 2.3) <= 1e-9 and abs(eq.x - 2.0 / 2.3) <= 1e-9
    check("sustainable equilibria match closed forms (tol 1e-9)", ok)


def test_stability_classifications():
    ok = True
    for rule in CLOSED_FORM:
        ok &= sustainable_report(rule).stability is Stability.STABLE
    threshold = (2.0 - 1.0) / (2.0 - 0.7)
    ok &= abs(threshold - 0.7692308) <= 1e-7
    for rule in PAIRWISE:
        for x in (0.0, 0.3, 0.6, threshold - 1e-6):
            line = [r for r in analyze(rule, PAPER, line_x=x)
                    if r.equilibrium.kind.value == "depleted_line"]
            ok &= len(line) == 1 and line[0].stability is Stability.NEUTRAL
    for rule in (UpdateRule.LINEAR, UpdateRule.UNIT_STEP):
        depleted = [r for r in analyze(rule, PAPER)
                    if r.equilibrium.R == 0.0]
        ok &= len(depleted) == 1
        ok &= depleted[0].stability is not Stability.STABLE
    check("stability classes: sustainable stable, depleted line neutral below "
          "x=0.769..., resource-rule depleted point non-stable", ok)


def test_pairwise_bistability():
    grid = GridSpec()  # 101x101
    configs = {
        UpdateRule.REPLICATOR: IntegratorConfig(dt=0.05, t_max=600.0),
        UpdateRule.MORAN: IntegratorConfig(dt=0.2, t_max=6000.0),
        UpdateRule.FERMI: IntegratorConfig(dt=0.2, t_max=6000.0),
    }
    ok = True
    for rule, cfg in configs.items():
        bm = run_basin_sweep(rule, PAPER, grid, cfg)
        counts = bm.counts()
        ok &= counts[Outcome.DEPLETED] > 0 and counts[Outcome.SUSTAINABLE] > 0
        sus = bm.mask(Outcome.SUSTAINABLE)
        ok &= bool(np.all(np.abs(bm.final_R[sus] - 0.3) <= 1e-3))
        ok &= bool(np.all(np.abs(bm.final_x[sus] - 1.0) <= 1e-3))
    check("pairwise rules are bi-stable on the 101x101 grid; sustainable "
          "finals within 1e-3 of (0.3, 1)", ok)


def test_resource_rules_guarantee_sustainability():
    grid = GridSpec()
    cfg = IntegratorConfig(dt=0.05, t_max=150.0)
    targets = {
        UpdateRule.LINEAR: (0.3 / 2.3, 2.0 / 2.3),
        UpdateRule.UNIT_STEP: (0.3, 1.0),
    }
    ok = True
    for rule, (r_star, x_star) in targets.items():
        bm = run_basin_sweep(rule, PAPER, grid, cfg)
        counts = bm.counts()
        ok &= counts[Outcome.DEPLETED] == 0 and counts[Outcome.UNRESOLVED] == 0
        ok &= bool(np.all(np.abs(bm.final_R - r_star) <= 1e-3))
        ok &= bool(np.all(np.abs(bm.final_x - x_star) <= 1e-3))
    check("linear and unit-step rules sustain every initial condition "
          "within 1e-3 of their fixed points", ok)


def test_logistic_dichotomy():
    grid = GridSpec()
    cfg = IntegratorConfig(dt=0.05, t_max=150.0)
    ok = True

    low = run_basin_sweep(UpdateRule.LOGISTIC,
                          dataclasses.replace(PAPER, k=0.1), grid, cfg)
    ok &= low.counts()[Outcome.DEPLETED] == grid.n_r * grid.n_x
    # at R=0 the cooperator fraction settles at 1 - sigma(-k c)
    x_dep = 1.0 - expit(0.1 * (0.0 - 0.5))
    ok &= bool(np.all(np.abs(low.final_x - x_dep) <= 0.01))

    high = run_basin_sweep(UpdateRule.LOGISTIC,
                           dataclasses.replace(PAPER, k=10.0), grid, cfg)
    ok &= high.counts()[Outcome.SUSTAINABLE] == grid.n_r * grid.n_x
    # interior fixed point from the scalar consistency equation
    # x = 1 - sigma(k (R(x) - c)) with R(x) = 1 - (2 - 1.3 x)
    x_star = brentq(lambda x: x - (1.0 - expit(10.0 * (1.3 * x - 1.5))),
                    0.7, 1.0, xtol=1e-12)
    r_star = 1.3 * x_star - 1.0
    ok &= bool(np.all(np.abs(high.final_R - r_star) <= 0.01))
    ok &= bool(np.all(np.abs(high.final_x - x_star) <= 0.01))
    check("logistic rule: k=0.1 depletes everywhere (x ~ 0.5125), "
          "k=10 sustains everywhere near (0.223, 0.941)", ok)


def test_integrator_fourth_order():
    p = PAPER
    s0 = SystemState(0.6, 0.4)
    t_end = 2.0

    def endpoint(dt):
        cfg = IntegratorConfig(dt=dt, t_max=t_end, eps_converge=1e-300)
        ep = integrate_to_equilibrium(UpdateRule.REPLICATOR, p, s0, cfg)
        return np.array([ep.state.R, ep.state.x])

    ref = endpoint(0.01 / 100)
    errors = [np.linalg.norm(endpoint(dt) - ref)
              for dt in (0.08, 0.04, 0.02, 0.01)]
    ratios = [errors[i] / errors[i + 1] for i in range(3)]
    ok = all(12.0 <= r <= 20.0 for r in ratios)
    check(f"endpoint error shrinks ~16x per dt halving over 3 halvings "
          f"(ratios {', '.join(f'{r:.1f}' for r in ratios)})", ok)


def test_finite_population_mean_field_limit():
    rule = UpdateRule.REPLICATOR
    s0 = SystemState(0.8, 0.9)
    ok = True

    # ensemble mean tracks the deterministic trajectory at N=1000
    p_big = dataclasses.replace(PAPER, N=1000)
    stats = run_ensemble(rule, p_big, s0, replicas=100, t_end=10.0, seed=0)
    traj = integrate(rule, p_big, s0,
                     IntegratorConfig(dt=1e-3, t_max=10.0, sample_every=10))
    ode_x = np.interp(stats.sample_times, traj.times, traj.x)
    sup = float(np.max(np.abs(stats.mean_x - ode_x)))
    ok &= sup <= 0.05

    # one-step drift reproduces the deterministic rate at probe states
    for probe in (SystemState(0.8, 0.9), SystemState(0.5, 0.5),
                  SystemState(0.3, 0.25)):
        mean, se = one_step_drift(rule, PAPER, probe, trials=200_000, seed=11)
        expected = strategy_rate(rule, probe.R, probe.x, PAPER)
        ok &= abs(mean - expected) <= 4 * se

    # fluctuations scale like 1/sqrt(N)
    ratios = []
    for N, seed in ((100, 1), (10_000, 2)):
        pN = dataclasses.replace(PAPER, N=N)
        st = run_ensemble(rule, pN, s0, replicas=100, t_end=2.0, seed=seed)
        ratios.append(st.std_x[-1])
    ratio = ratios[0] / ratios[1]
    ok &= 5.0 <= ratio <= 20.0
    check(f"finite-N ensemble matches mean field (sup err {sup:.3f}), drift "
          f"within 4 SE, std ratio N=100/N=10000 = {ratio:.1f}", ok)


def test_repeated_runs_are_byte_identical(tmp_path):
    def run(argv, sub):
        out = tmp_path / sub
        subprocess.run([sys.executable, "-m", "cprdyn.cli"] + argv
                       + ["--output", str(out)], check=True,
                       capture_output=True)
        return out

    sweep_args = ["sweep", "--rule", "replicator", "--grid", "9x9",
                  "--dt", "0.05", "--t-max", "100"]
    ens_args = ["ensemble", "--rule", "fermi", "--r0", "0.8", "--x0", "0.9",
                "--replicas", "20", "--seed", "123", "--t-end", "2"]
    ok = True
    a = run(sweep_args, "s1") / "sweep.csv"
    b = run(sweep_args, "s2") / "sweep.csv"
    ok &= a.read_bytes() == b.read_bytes()
    c = run(ens_args, "e1") / "ensemble.csv"
    d = run(ens_args, "e2") / "ensemble.csv"
    ok &= c.read_bytes() == d.read_bytes()
    check("repeated sweep and ensemble runs produce byte-identical CSVs", ok)
