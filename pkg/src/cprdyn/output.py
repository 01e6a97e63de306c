"""Deterministic file output: CSV/JSON writers and run manifests.

All numbers are written with Python's shortest round-trip decimal formatting
so replayed runs produce byte-identical files. Every write goes through a
temp file followed by an atomic rename.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .equilibria import EquilibriumReport
from .integrator import IntegratorConfig, Trajectory
from .model import ModelParams
from .stochastic import EnsembleStats
from .sweep import BasinMap, GridSpec


def fmt(v) -> str:
    return repr(float(v))


def _atomic_write_text(path: Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: list[str], rows):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_json(path, obj):
    _atomic_write_text(Path(path), json.dumps(obj, indent=2) + "\n")


def params_dict(p: ModelParams) -> dict:
    return dataclasses.asdict(p)


def config_dict(cfg: IntegratorConfig) -> dict:
    return dataclasses.asdict(cfg)


def grid_dict(g: GridSpec) -> dict:
    return dataclasses.asdict(g)


def trajectory_rows(traj: Trajectory):
    for t, r, x in zip(traj.times, traj.R, traj.x):
        yield [fmt(t), fmt(r), fmt(x)]


def write_trajectory_csv(path, traj: Trajectory):
    write_csv(path, ["t", "R", "x"], trajectory_rows(traj))


def sweep_rows(bm: BasinMap):
    for r0, x0, rs, xs, outcome, steps in bm.rows():
        yield [fmt(r0), fmt(x0), fmt(rs), fmt(xs), outcome.value, str(steps)]


def write_sweep_csv(path, bm: BasinMap):
    write_csv(path, ["R0", "x0", "R_star", "x_star", "class", "steps"],
              sweep_rows(bm))


def ensemble_rows(stats: EnsembleStats):
    for i in range(len(stats.sample_times)):
        yield [fmt(stats.sample_times[i]), fmt(stats.mean_R[i]),
               fmt(stats.std_R[i]), fmt(stats.mean_x[i]), fmt(stats.std_x[i])]


def write_ensemble_csv(path, stats: EnsembleStats):
    write_csv(path, ["t", "mean_R", "std_R", "mean_x", "std_x"],
              ensemble_rows(stats))


def equilibria_payload(rule, p: ModelParams,
                       reports: list[EquilibriumReport]) -> dict:
    entries = []
    for rep in reports:
        eig = np.asarray(rep.eigenvalues)
        entries.append({
            "kind": rep.equilibrium.kind.value,
            "R": rep.eval_state.R,
            "x": rep.eval_state.x,
            "x_free": rep.equilibrium.x is None,
            "det": rep.det,
            "trace": rep.trace,
            "eigenvalues": [[float(e.real), float(e.imag)] for e in eig],
            "stability": rep.stability.value,
        })
    return {"rule": rule.value, "params": params_dict(p), "equilibria": entries}


def write_manifest(path, manifest: dict):
    write_json(path, manifest)
