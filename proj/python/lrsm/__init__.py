"""Low-rank Schwarz solver for the 1D slab radiative transfer equation."""

from ._core import (
    AdjointMismatch,
    AlignmentError,
    CacheError,
    Config,
    ConfigError,
    InvalidArgument,
    NonConvergence,
    StaleMapError,
    cache_summary,
    cmd_homog_check,
    cmd_offline,
    cmd_rank_sweep,
    cmd_reference,
    cmd_run,
    cmd_spectrum,
    global_solve,
    homogenized_sigma,
    map_spectrum,
    quadrature,
    reference,
    rsvd,
    sigma,
)

__all__ = [
    "AdjointMismatch",
    "AlignmentError",
    "CacheError",
    "Config",
    "ConfigError",
    "InvalidArgument",
    "NonConvergence",
    "StaleMapError",
    "cache_summary",
    "cmd_homog_check",
    "cmd_offline",
    "cmd_rank_sweep",
    "cmd_reference",
    "cmd_run",
    "cmd_spectrum",
    "global_solve",
    "homogenized_sigma",
    "map_spectrum",
    "quadrature",
    "reference",
    "rsvd",
    "sigma",
]
