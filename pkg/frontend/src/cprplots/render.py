"""Render figures from the simulation toolkit's CSV outputs.

The inputs are plain files, not library objects:

- sweep CSV     header ``R0,x0,R_star,x_star,class,steps`` — one row per grid
  cell, row-major with R0 as the outer (slow) index;
- trajectory CSV header ``t,R,x``;
- ensemble CSV  header ``t,mean_R,std_R,mean_x,std_x``.

Each renderer returns a RenderResult carrying the arrays it plotted, so
callers (and tests) can inspect the data without decoding the image.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SWEEP_HEADER = ["R0", "x0", "R_star", "x_star", "class", "steps"]
TRAJECTORY_HEADER = ["t", "R", "x"]
ENSEMBLE_HEADER = ["t", "mean_R", "std_R", "mean_x", "std_x"]

CLASS_CODES = {"depleted": 0, "sustainable": 1, "unresolved": 2}
CLASS_COLORS = {"depleted": "#8c2d04", "sustainable": "#1a7837",
                "unresolved": "#bdbdbd"}

KINDS = ("basin-r", "basin-x", "class-map", "timeseries", "ensemble-band")


class SchemaError(ValueError):
    """The input file does not match the expected column layout."""


class DimensionError(ValueError):
    """The sweep rows do not form a complete rectangular grid."""


@dataclass
class RenderResult:
    kind: str
    out_path: str
    # grid renders: the (n_r, n_x) value grid and axis coordinates
    grid: np.ndarray | None = None
    r_values: np.ndarray | None = None
    x_values: np.ndarray | None = None
    # class-map renders: integer codes per CLASS_CODES and the classes seen
    class_grid: np.ndarray | None = None
    classes_present: tuple = ()
    # line renders: the column arrays that were drawn
    columns: dict = field(default_factory=dict)


def _read_csv(path, expected_header):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    if rows[0] != expected_header:
        raise SchemaError(f"{path}: expected columns {expected_header}, "
                          f"got {rows[0]}")
    return rows[1:]


def _float_column(path, rows, index, name):
    try:
        return np.array([float(r[index]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"{path}: bad value in column {name!r}: {exc}") from None


@dataclass
class SweepTable:
    r_values: np.ndarray   # sorted unique R0, length n_r
    x_values: np.ndarray   # sorted unique x0, length n_x
    r_star: np.ndarray     # (n_r, n_x)
    x_star: np.ndarray     # (n_r, n_x)
    classes: np.ndarray    # (n_r, n_x) of class-name strings


def read_sweep(path) -> SweepTable:
    rows = _read_csv(path, SWEEP_HEADER)
    r0 = _float_column(path, rows, 0, "R0")
    x0 = _float_column(path, rows, 1, "x0")
    r_star = _float_column(path, rows, 2, "R_star")
    x_star = _float_column(path, rows, 3, "x_star")
    classes = np.array([r[4] for r in rows])
    bad = sorted(set(classes) - set(CLASS_CODES))
    if bad:
        raise SchemaError(f"{path}: unknown class label(s) {bad} in column 'class'")

    r_values = np.unique(r0)
    x_values = np.unique(x0)
    n_r, n_x = len(r_values), len(x_values)
    if n_r * n_x != len(rows):
        raise DimensionError(
            f"{path}: {len(rows)} rows do not fill a {n_r}x{n_x} grid "
            f"({n_r * n_x} cells)")
    # the writer emits row-major with R0 as the slow index; verify rather
    # than assume, so hand-edited files fail loudly
    expect_r = np.repeat(r_values, n_x)
    expect_x = np.tile(x_values, n_r)
    if not (np.array_equal(r0, expect_r) and np.array_equal(x0, expect_x)):
        raise DimensionError(f"{path}: rows are not row-major over the "
                             f"{n_r}x{n_x} (R0, x0) grid")
    shape = (n_r, n_x)
    return SweepTable(r_values, x_values, r_star.reshape(shape),
                      x_star.reshape(shape), classes.reshape(shape))


def _heatmap(table: SweepTable, values, label, out_path, kind) -> RenderResult:
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    extent = (table.x_values[0], table.x_values[-1],
              table.r_values[0], table.r_values[-1])
    im = ax.imshow(values, origin="lower", aspect="auto", extent=extent,
                   vmin=0.0, vmax=1.0, cmap="viridis")
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("initial cooperator fraction $x_0$")
    ax.set_ylabel("initial resource $R_0$")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(kind=kind, out_path=str(out_path), grid=values,
                        r_values=table.r_values, x_values=table.x_values)


def render_basin_r(in_path, out_path) -> RenderResult:
    table = read_sweep(in_path)
    return _heatmap(table, table.r_star, "final resource $R^*$",
                    out_path, "basin-r")


def render_basin_x(in_path, out_path) -> RenderResult:
    table = read_sweep(in_path)
    return _heatmap(table, table.x_star, "final cooperator fraction $x^*$",
                    out_path, "basin-x")


def render_class_map(in_path, out_path) -> RenderResult:
    table = read_sweep(in_path)
    codes = np.vectorize(CLASS_CODES.get)(table.classes)
    present = tuple(sorted(set(table.classes.ravel()),
                           key=CLASS_CODES.get))
    cmap = matplotlib.colors.ListedColormap(
        [CLASS_COLORS[name] for name in CLASS_CODES])
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    extent = (table.x_values[0], table.x_values[-1],
              table.r_values[0], table.r_values[-1])
    ax.imshow(codes, origin="lower", aspect="auto", extent=extent,
              cmap=cmap, vmin=-0.5, vmax=len(CLASS_CODES) - 0.5)
    handles = [plt.Rectangle((0, 0), 1, 1, color=CLASS_COLORS[name])
               for name in present]
    ax.legend(handles, present, loc="upper left", fontsize=8)
    ax.set_xlabel("initial cooperator fraction $x_0$")
    ax.set_ylabel("initial resource $R_0$")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(kind="class-map", out_path=str(out_path),
                        class_grid=codes, classes_present=present,
                        r_values=table.r_values, x_values=table.x_values)


def render_timeseries(in_path, out_path) -> RenderResult:
    rows = _read_csv(in_path, TRAJECTORY_HEADER)
    t = _float_column(in_path, rows, 0, "t")
    R = _float_column(in_path, rows, 1, "R")
    x = _float_column(in_path, rows, 2, "x")
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    ax.plot(t, R, label="resource $R$")
    ax.plot(t, x, label="cooperator fraction $x$")
    ax.set_xlabel("time")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(kind="timeseries", out_path=str(out_path),
                        columns={"t": t, "R": R, "x": x})


def render_ensemble_band(in_path, out_path) -> RenderResult:
    rows = _read_csv(in_path, ENSEMBLE_HEADER)
    cols = {name: _float_column(in_path, rows, i, name)
            for i, name in enumerate(ENSEMBLE_HEADER)}
    t = cols["t"]
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    for mean_key, std_key, label in (("mean_R", "std_R", "resource $R$"),
                                     ("mean_x", "std_x", "cooperator fraction $x$")):
        m, s = cols[mean_key], cols[std_key]
        line, = ax.plot(t, m, label=label)
        ax.fill_between(t, m - s, m + s, color=line.get_color(), alpha=0.25)
    ax.set_xlabel("time")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(kind="ensemble-band", out_path=str(out_path),
                        columns=cols)


_RENDERERS = {
    "basin-r": render_basin_r,
    "basin-x": render_basin_x,
    "class-map": render_class_map,
    "timeseries": render_timeseries,
    "ensemble-band": render_ensemble_band,
}


def render(kind: str, in_path, out_path) -> RenderResult:
    try:
        fn = _RENDERERS[kind]
    except KeyError:
        raise ValueError(f"unknown kind {kind!r}; choose from {KINDS}") from None
    return fn(in_path, out_path)
