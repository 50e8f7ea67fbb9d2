"""Continuous variational reduction to finite-dimensional Hamiltonian systems."""

from .hamiltonian import (
    NonFiniteStateError,
    ReducedSystem,
    Trajectory,
    bind_parameters,
    chart_pairs,
    hamilton_equations,
    integrate_reduced,
    poisson_bracket,
)
from .reduction import (
    CanonicalChart,
    ChartUnavailable,
    DegenerateLagrangianError,
    HamiltonianX,
    InternalConsistencyError,
    LagrangianDensity,
    MomentumSet,
    assemble_lagrangian,
    hamiltonian_x,
    momenta,
    p_var,
    q_var,
    recurrence_residuals,
    symmetry_hamiltonian,
)

__all__ = [
    "CanonicalChart", "ChartUnavailable", "DegenerateLagrangianError", "HamiltonianX",
    "InternalConsistencyError", "LagrangianDensity", "MomentumSet", "NonFiniteStateError",
    "ReducedSystem", "Trajectory", "assemble_lagrangian", "bind_parameters", "chart_pairs",
    "hamilton_equations", "hamiltonian_x", "integrate_reduced", "momenta", "p_var",
    "poisson_bracket", "q_var", "recurrence_residuals", "symmetry_hamiltonian",
]
