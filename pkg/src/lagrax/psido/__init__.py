"""Matrix pseudo-differential operator algebra and hierarchy flows."""

from .hierarchy import (
    Gradient,
    RootError,
    SourceFlow,
    SourceTriple,
    backlund_chain,
    backlund_extend,
    lax_rhs,
    multiplication_part,
    negate_flow,
    power,
    rank_one,
    root,
    source_flow,
    theta_apply,
)
from .operator import (
    PsiDO,
    TraceDensity,
    TruncationError,
    adjoint,
    apply,
    commutator,
    compose,
    default_depth,
    format_psido,
    gbinom,
    r_bracket,
    r_map,
    residue,
    split_minus,
    split_plus,
    trace_density,
)

__all__ = [
    "Gradient", "PsiDO", "RootError", "SourceFlow", "SourceTriple", "TraceDensity",
    "TruncationError", "adjoint", "apply", "backlund_chain", "backlund_extend", "commutator",
    "compose", "default_depth", "format_psido", "gbinom", "lax_rhs", "multiplication_part",
    "negate_flow", "power", "r_bracket", "r_map", "rank_one", "residue", "root",
    "source_flow", "split_minus", "split_plus", "theta_apply", "trace_density",
]
