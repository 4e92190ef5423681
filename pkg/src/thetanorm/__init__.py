"""Exact sup-norm computation for the alternated product of circle orientation cocycles."""

from .cocycle import (
    Configuration,
    bilinear_max,
    build_sign_matrix,
    or3,
    regular_configuration,
    theta_direct,
    theta_reduced,
)
from .ordercomb import (
    canonicalize_cyclic,
    enumerate_weak_orders,
    enumerate_x_patterns,
    reduced_perm_table,
)
from .search import NormReport, class_table, eval_regular, max_for_x_pattern, norm

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "NormReport",
    "bilinear_max",
    "build_sign_matrix",
    "canonicalize_cyclic",
    "class_table",
    "enumerate_weak_orders",
    "enumerate_x_patterns",
    "eval_regular",
    "max_for_x_pattern",
    "norm",
    "or3",
    "reduced_perm_table",
    "regular_configuration",
    "theta_direct",
    "theta_reduced",
]
