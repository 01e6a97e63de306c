"""Figure rendering for resource/strategy co-evolution CSV outputs."""

from .render import (CLASS_CODES, KINDS, DimensionError, RenderResult,
                     SchemaError, SweepTable, read_sweep, render,
                     render_basin_r, render_basin_x, render_class_map,
                     render_ensemble_band, render_timeseries)

__version__ = "0.1.0"

__all__ = [
    "CLASS_CODES", "KINDS", "DimensionError", "RenderResult", "SchemaError",
    "SweepTable", "read_sweep", "render", "render_basin_r", "render_basin_x",
    "render_class_map", "render_ensemble_band", "render_timeseries",
    "__version__",
]
