"""Zero-curvature verification for lambda-dependent Lax pairs."""

from .curvature import (
    LAMBDA,
    CurvatureReport,
    FlowRules,
    InconsistentRulesError,
    MissingRuleError,
    Residual,
    SpectralMatrix,
    curvature,
    graded_residuals,
    lam,
    prolong,
)
from .ds import (
    CORRECTIONS,
    FIELD_NAMES,
    VAR_NAMES,
    DSData,
    constraint_probe,
    ds_constraints,
    ds_instantiate,
    ds_rules_t,
    ds_rules_y,
    ds_verify,
    mutation_suite,
    perturb_u_t,
    printed_matrices,
    run_mutations,
)

__all__ = [
    "CORRECTIONS", "CurvatureReport", "DSData", "FIELD_NAMES", "FlowRules",
    "InconsistentRulesError", "LAMBDA", "MissingRuleError", "Residual", "SpectralMatrix",
    "VAR_NAMES", "constraint_probe", "curvature", "ds_constraints", "ds_instantiate",
    "ds_rules_t", "ds_rules_y", "ds_verify", "graded_residuals", "lam", "mutation_suite",
    "perturb_u_t", "printed_matrices", "prolong", "run_mutations",
]
