"""Exact differential-polynomial algebra on jet spaces."""

from .calculus import (
    DiffOperator,
    MultiVariableError,
    NotExactError,
    antiderivative,
    concomitant,
    density_normal_form,
    euler,
    fields_of,
    format_operator,
    frechet,
    is_exact,
    jet_order,
    max_order,
    pairing,
    total_derivative,
)
from .coeffs import I, GaussQ, coerce
from .poly import (
    ChartVar,
    IndepVar,
    JetCoord,
    Naming,
    Param,
    Poly,
    ShiftCoord,
    chart_p,
    chart_q,
    const,
    format_poly,
    indep,
    jet,
    jet_coord,
    param,
    shifted,
)

__all__ = [
    "ChartVar", "DiffOperator", "GaussQ", "I", "IndepVar", "JetCoord", "MultiVariableError",
    "Naming", "NotExactError", "Param", "Poly", "ShiftCoord", "antiderivative", "chart_p",
    "chart_q", "coerce", "concomitant", "const", "density_normal_form", "euler", "fields_of",
    "format_operator", "format_poly", "frechet", "indep", "is_exact", "jet", "jet_coord",
    "jet_order", "max_order", "pairing", "param", "shifted", "total_derivative",
]
