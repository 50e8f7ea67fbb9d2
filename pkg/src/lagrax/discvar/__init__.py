"""Discrete (lattice) variational reduction."""

from .lattice import (
    DegenerateDiscreteLagrangian,
    DiscreteOneForm,
    DiscreteSystem,
    alpha_form,
    check_nondegenerate,
    decomposition_residual,
    differential,
    discrete_euler,
    discrete_hamilton_equations,
    discrete_momenta,
    discrete_order,
    offsets,
    p_n,
    shift,
    u,
)

__all__ = [
    "DegenerateDiscreteLagrangian", "DiscreteOneForm", "DiscreteSystem", "alpha_form",
    "check_nondegenerate", "decomposition_residual", "differential", "discrete_euler",
    "discrete_hamilton_equations", "discrete_momenta", "discrete_order", "offsets", "p_n",
    "shift", "u",
]
