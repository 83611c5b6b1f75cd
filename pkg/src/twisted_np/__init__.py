"""Twisted arithmetic and Hodge polygons of x^d + lambda x with exact checks."""

from .errors import Finding, InvalidInputError, PrecisionError
from .polygon import (
    NewtonPolygon,
    TwistContext,
    arith_polygon,
    arith_slope,
    arith_value,
    compare_polygons,
    hodge_polygon,
    level_slopes,
    lower_hull,
    make_context,
)

__all__ = [
    "Finding",
    "InvalidInputError",
    "NewtonPolygon",
    "PrecisionError",
    "TwistContext",
    "arith_polygon",
    "arith_slope",
    "arith_value",
    "compare_polygons",
    "hodge_polygon",
    "level_slopes",
    "lower_hull",
    "make_context",
]
__version__ = "0.1.0"
