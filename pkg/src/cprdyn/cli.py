"""Command-line front end.

Subcommands: simulate (one trajectory), equilibria (stability report),
sweep (basin map), ensemble (stochastic), rules (list update rules).
Configuration comes from flags and/or a flat key=value config file; flags
override file values, which override built-in defaults (the reference
parameter configuration). Every run writes its outputs plus a manifest that
replays the run bit-identically.

Exit codes: 0 success, 1 validation error, 2 numerical error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .equilibria import analyze
from .integrator import IntegrationError, IntegratorConfig, integrate
from .model import ModelParams, SystemState, UpdateRule, rule_from_name
from .output import (config_dict, equilibria_payload, grid_dict, params_dict,
                     write_ensemble_csv, write_json, write_manifest,
                     write_sweep_csv, write_trajectory_csv)
from .stochastic import run_ensemble
from .sweep import GridSpec, run_basin_sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

PARAM_KEYS = ("T", "ec_hat", "ed_hat", "w", "c", "k", "N")
FLOAT_KEYS = {"T", "ec_hat", "ed_hat", "w", "c", "k", "r0", "x0", "dt",
              "t_max", "t_end"}
INT_KEYS = {"N", "replicas", "seed", "sample_every"}


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep exit codes disjoint
        raise ValidationFailure(message)


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--rule", choices=[r.value for r in UpdateRule],
                     required=False)
    for key in ("T", "ec-hat", "ed-hat", "w", "c", "k"):
        sub.add_argument(f"--{key}", type=float, default=None)
    sub.add_argument("--N", type=int, default=None)
    sub.add_argument("--config", type=str, default=None,
                     help="flat key=value config file; flags override it")
    sub.add_argument("--output", type=str, default=None, help="output directory")
    sub.add_argument("--format", choices=["csv", "json"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cprdyn", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = subs.add_parser("simulate", help="integrate one trajectory")
    _add_common(sim)
    sim.add_argument("--r0", type=float, default=None)
    sim.add_argument("--x0", type=float, default=None)
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--t-max", type=float, default=None)
    sim.add_argument("--sample-every", type=int, default=None)

    eq = subs.add_parser("equilibria", help="stationary points and stability")
    _add_common(eq)

    sw = subs.add_parser("sweep", help="basin-of-attraction grid sweep")
    _add_common(sw)
    sw.add_argument("--grid", type=str, default=None, help="grid size, e.g. 101x101")
    sw.add_argument("--dt", type=float, default=None)
    sw.add_argument("--t-max", type=float, default=None)

    en = subs.add_parser("ensemble", help="finite-N stochastic ensemble")
    _add_common(en)
    en.add_argument("--r0", type=float, default=None)
    en.add_argument("--x0", type=float, default=None)
    en.add_argument("--replicas", type=int, default=None)
    en.add_argument("--seed", type=int, default=None)
    en.add_argument("--t-end", type=float, default=None)

    subs.add_parser("rules", help="list the update rules")
    return parser


def read_config_file(path: str) -> dict:
    """Flat key=value text; keys mirror flag names (dashes or underscores)."""
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationFailure(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key in FLOAT_KEYS:
            values[key] = float(value)
        elif key in INT_KEYS:
            values[key] = int(value)
        elif key in ("rule", "grid", "output", "format"):
            values[key] = value
        else:
            raise ValidationFailure(f"{path}:{lineno}: unknown config key {key!r}")
    return values


def merge_settings(args: argparse.Namespace) -> dict:
    """Flag > config-file > default precedence; returns the effective settings."""
    settings = {}
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            settings[key] = value
    return settings


def parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValidationFailure(f"--grid expects RxC (e.g. 101x101), got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ValidationFailure(f"--grid expects integers, got {text!r}") from None


def build_params(settings: dict) -> ModelParams:
    kwargs = {k: settings[k] for k in PARAM_KEYS if k in settings}
    return ModelParams(**kwargs)


def build_integrator_config(settings: dict) -> IntegratorConfig:
    kwargs = {}
    for key in ("dt", "t_max", "sample_every"):
        if key in settings:
            kwargs[key] = settings[key]
    return IntegratorConfig(**kwargs)


def _require_rule(settings: dict) -> UpdateRule:
    if "rule" not in settings:
        raise ValidationFailure("--rule is required for this command")
    return rule_from_name(settings["rule"])


def _manifest(command: str, settings: dict, rule, p, outputs: list[str],
              t0: float, **extra) -> dict:
    m = {
        "tool_version": __version__,
        "command": command,
        "rule": rule.value if rule is not None else None,
        "params": params_dict(p) if p is not None else None,
    }
    m.update(extra)
    m["seed"] = settings.get("seed")
    m["outputs"] = outputs
    m["wall_time_s"] = time.perf_counter() - t0
    return m


def _write_rows_json(path, header, rows):
    def native(v):
        try:
            return float(v)
        except (TypeError, ValueError):
            return str(v)

    write_json(path, {"header": header,
                      "rows": [[native(v) for v in r] for r in rows]})


def run(args: argparse.Namespace) -> int:
    command = args.command
    if command == "rules":
        for r in UpdateRule:
            print(r.value)
        return EXIT_OK

    t0 = time.perf_counter()
    settings = merge_settings(args)
    rule = _require_rule(settings)
    try:
        p = build_params(settings)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None

    outdir = Path(settings.get("output", "."))
    outdir.mkdir(parents=True, exist_ok=True)
    out_format = settings.get("format", "csv")

    if command == "simulate":
        cfg = build_integrator_config(settings)
        s0 = SystemState(R=settings.get("r0", 0.5), x=settings.get("x0", 0.5))
        traj = integrate(rule, p, s0, cfg)
        data_path = outdir / f"simulate.{out_format}"
        if out_format == "csv":
            write_trajectory_csv(data_path, traj)
        else:
            from .output import trajectory_rows
            _write_rows_json(data_path, ["t", "R", "x"],
                             trajectory_rows(traj))
        manifest = _manifest(command, settings, rule, p, [data_path.name], t0,
                             integrator=config_dict(cfg),
                             initial_state={"R": s0.R, "x": s0.x},
                             terminal=traj.terminal.value)
        write_manifest(outdir / "simulate.manifest.json", manifest)
        print(f"wrote {data_path}")
        return EXIT_OK

    if command == "equilibria":
        reports = analyze(rule, p)
        payload = equilibria_payload(rule, p, reports)
        data_path = outdir / "equilibria.json"
        write_json(data_path, payload)
        manifest = _manifest(command, settings, rule, p, [data_path.name], t0)
        write_manifest(outdir / "equilibria.manifest.json", manifest)
        print(f"wrote {data_path}")
        return EXIT_OK

    if command == "sweep":
        cfg = build_integrator_config(settings)
        grid_kwargs = {}
        if "grid" in settings:
            n_r, n_x = parse_grid(settings["grid"])
            grid_kwargs = {"n_r": n_r, "n_x": n_x}
        try:
            grid = GridSpec(**grid_kwargs)
        except ValueError as exc:
            raise ValidationFailure(str(exc)) from None
        bm = run_basin_sweep(rule, p, grid, cfg)
        data_path = outdir / f"sweep.{out_format}"
        if out_format == "csv":
            write_sweep_csv(data_path, bm)
        else:
            from .output import sweep_rows
            _write_rows_json(data_path,
                             ["R0", "x0", "R_star", "x_star", "class", "steps"],
                             sweep_rows(bm))
        manifest = _manifest(command, settings, rule, p, [data_path.name], t0,
                             integrator=config_dict(cfg), grid=grid_dict(grid))
        write_manifest(outdir / "sweep.manifest.json", manifest)
        counts = bm.counts()
        print(f"wrote {data_path} "
              f"({', '.join(f'{k.value}={v}' for k, v in counts.items())})")
        return EXIT_OK

    if command == "ensemble":
        s0 = SystemState(R=settings.get("r0", 0.5), x=settings.get("x0", 0.5))
        replicas = settings.get("replicas", 100)
        seed = settings.get("seed", 0)
        t_end = settings.get("t_end", 10.0)
        try:
            stats = run_ensemble(rule, p, s0, replicas=replicas, t_end=t_end,
                                 seed=seed)
        except ValueError as exc:
            raise ValidationFailure(str(exc)) from None
        data_path = outdir / f"ensemble.{out_format}"
        if out_format == "csv":
            write_ensemble_csv(data_path, stats)
        else:
            from .output import ensemble_rows
            _write_rows_json(data_path,
                             ["t", "mean_R", "std_R", "mean_x", "std_x"],
                             ensemble_rows(stats))
        settings.setdefault("seed", seed)
        manifest = _manifest(command, settings, rule, p, [data_path.name], t0,
                             ensemble={"replicas": replicas, "seed": seed,
                                       "t_end": t_end,
                                       "initial_state": {"R": s0.R, "x": s0.x}})
        write_manifest(outdir / "ensemble.manifest.json", manifest)
        print(f"wrote {data_path}")
        return EXIT_OK

    raise ValidationFailure(f"unknown command {command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return run(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        # DomainError and parameter rejections surface as validation failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IntegrationError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
