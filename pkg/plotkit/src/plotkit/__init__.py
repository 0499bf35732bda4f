"""Publication-style figures from simulation CSV artifacts."""

from .figures import (
    DPI,
    EPS_FLOOR,
    KINDS,
    FigureJob,
    SchemaError,
    endpoint_distance,
    equilibria_points,
    error_series,
    field_blocks,
    floor_log,
    load_table,
    lyapunov_series,
    phase_series,
    probe_index,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "DPI",
    "EPS_FLOOR",
    "KINDS",
    "FigureJob",
    "SchemaError",
    "endpoint_distance",
    "equilibria_points",
    "error_series",
    "field_blocks",
    "floor_log",
    "load_table",
    "lyapunov_series",
    "phase_series",
    "probe_index",
    "render",
    "__version__",
]
