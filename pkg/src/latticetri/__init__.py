"""Exact counting and optimization of lattice points in right triangles."""

__version__ = "0.1.0"

from .exactnum import SurdValue, isqrt, parse_scalar, surd_floor, surd_sign  # noqa: F401
from .counting import (  # noqa: F401
    AreaParam,
    DeficitPoint,
    FloatSlope,
    Slope,
    SurdSqrt,
    count_lattice_points,
    deficit,
    deficit_curve,
    irrational_limit_coefficient,
    rational_coefficient,
)
