"""Davey-Stewartson triple linearization and its certification.

Field indices: ``u=0, ub=1, f1=2, f2=3, g1=4, g2=5`` where ``g`` stands for
the adjoint sources ``f*``; independent variables ``x=0, y=1, t=2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..jetalg import I, Poly, jet
from ..jetalg import total_derivative as D
from .curvature import (
    CurvatureReport,
    FlowRules,
    Residual,
    SpectralMatrix,
    curvature,
    graded_residuals,
    lam,
)

FIELD_NAMES = ("u", "ub", "f1", "f2", "g1", "g2")
VAR_NAMES = ("x", "y", "t")
X, Y, T = 0, 1, 2
U_, UB, F1, F2, G1, G2 = range(6)


def _f(i: int, *orders) -> Poly:
    return jet(i, *orders)


def _y(i: int) -> Poly:
    return jet(i, 0, 1)


@dataclass(frozen=True)
class DSData:
    U: SpectralMatrix
    V: SpectralMatrix
    W: SpectralMatrix
    rules_y: FlowRules
    rules_t: FlowRules
    corrections: tuple = field(default=())


def ds_rules_y() -> FlowRules:
    u, ub, f1, f2, g1, g2 = (_f(i) for i in range(6))
    return FlowRules(
        {
            (U_, Y): -2 * f1 * g2,
            (UB, Y): -2 * g1 * f2,
            (F1, Y): _f(F1, 1) - u * f2,
            (G1, Y): _f(G1, 1) - ub * g2,
            (F2, Y): -_f(F2, 1) + ub * f1,
            (G2, Y): -_f(G2, 1) + u * g1,
        }
    )


def ds_rules_t() -> FlowRules:
    u, ub, f1, f2, g1, g2 = (_f(i) for i in range(6))
    s = f1 * g1 + f2 * g2
    return FlowRules(
        {
            (U_, T): I * (_f(U_, 1, 1) + 2 * u * s),
            (UB, T): -I * (_f(UB, 1, 1) + 2 * ub * s),
            (F1, T): I * (_f(F1, 2) + (2 * f1 * g1 - u * ub) * f1 - _f(U_, 1) * f2),
            (G1, T): -I * (_f(G1, 2) + (2 * f1 * g1 - u * ub) * g1 - _f(UB, 1) * g2),
            (F2, T): I * (_f(F2, 2) - (2 * f2 * g2 + u * ub) * f2 - _f(UB, 1) * f1),
            (G2, T): -I * (_f(G2, 2) - (2 * f2 * g2 + u * ub) * g2 - _f(U_, 1) * g1),
        }
    )


def ds_constraints() -> list:
    """The non-evolutionary side relations linking y- and x-derivatives of densities."""
    u, ub, f1, f2, g1, g2 = (_f(i) for i in range(6))
    a, b, uu = f1 * g1, f2 * g2, u * ub
    c1 = D(a, Y) - D(a, X) - D(uu, Y) / 2
    c2 = D(b, X) + D(b, Y) + D(uu, Y) / 2
    return [("C1", c1), ("C2", c2)]


def printed_matrices():
    """The three matrices exactly as displayed alongside the DS relations."""
    L = lam()
    u, ub, f1, f2, g1, g2 = (_f(i) for i in range(6))
    U = SpectralMatrix([[L, u, -f1], [ub, -L, f2], [g1, g2, 0]])
    V = SpectralMatrix([[L, 0, -f1], [0, L, -f2], [g1, g2, 0]])
    W = SpectralMatrix(
        [
            [I * (L**2 + f1 * g1), I * (_y(U_) / 2), I * (-L * f1 - _y(F1))],
            [I * (-_y(UB) / 2), I * (L**2 - f2 * g2), I * (-L * f2 - _y(F1))],
            [I * (L * g1 + _y(G1)), I * (L * g2 + _y(G2)), Poly()],
        ]
    )
    return U, V, W


CORRECTIONS = (
    "V(3,2): f2* -> -f2*",
    "W(2,3): -lam f2 - d f1/dy -> -lam f2 - d f2/dy",
    "W(3,1): lam f1* + d f1*/dy -> lam f1* - d f1*/dy",
    "W(3,2): lam f2* + d f2*/dy -> -lam f2* + d f2*/dy",
    "W(3,3): 0 -> -(f1 f1* - f2 f2*)",
)


def ds_instantiate(printed: bool = False) -> DSData:
    """Lax data for DS; ``printed=True`` returns the uncorrected display."""
    U, V, W = printed_matrices()
    if not printed:
        L = lam()
        u, ub, f1, f2, g1, g2 = (_f(i) for i in range(6))
        V = V.replace(2, 1, -g2)
        W = (
            W.replace(1, 2, I * (-L * f2 - _y(F2)))
            .replace(2, 0, I * (L * g1 - _y(G1)))
            .replace(2, 1, I * (-L * g2 + _y(G2)))
            .replace(2, 2, I * (-(f1 * g1 - f2 * g2)))
        )
    return DSData(U, V, W, ds_rules_y(), ds_rules_t(), () if printed else CORRECTIONS)


def ds_verify(data: DSData | None = None) -> CurvatureReport:
    """Certify both zero-curvature pairs and the constraint consistency.

    * ``U_y - V_x + [U, V]`` under the y-rules;
    * ``U_t - W_x + [U, W]`` under the t-rules together with the y-rules
      (``W`` and ``u_t`` carry y-derivatives);
    * the side relations reduce to zero under the y-rules.
    """
    data = data or ds_instantiate()
    report = CurvatureReport()
    ry = data.rules_y
    both = data.rules_t.merged(data.rules_y)
    Mxy = curvature(data.U, data.V, X, Y, ry, FIELD_NAMES)
    report.residuals += graded_residuals(Mxy, "x-y")
    Mxt = curvature(data.U, data.W, X, T, both, FIELD_NAMES)
    report.residuals += graded_residuals(Mxt, "x-t")
    for name, c in ds_constraints():
        r = ry.reduce(c)
        if r:
            report.residuals.append(Residual(f"constraint {name}", 0, 0, 0, r))
    report.notes = list(data.corrections)
    return report


def constraint_probe(data: DSData | None = None) -> list:
    """Residuals of the t-pair when only the t-rules are available.

    Without the y-rules the diagonal entries are exactly the side relations;
    the result pairs each surviving diagonal entry with its identification.
    """
    data = data or ds_instantiate()
    M = curvature(data.U, data.W, X, T, data.rules_t, FIELD_NAMES)
    (_, c1), (_, c2) = ds_constraints()
    expect = {0: I * c1, 1: I * c2, 2: -I * (c1 + c2)}
    names = {0: "i*C1", 1: "i*C2", 2: "-i*(C1+C2)"}
    out = []
    for k in range(3):
        e = M.entries[k][k]
        out.append((k + 1, names[k] if e == expect[k] else None, e))
    return out


@dataclass(frozen=True)
class Mutation:
    name: str
    apply: Callable


def _rule_mutation(which: str, key, fn, tag: str) -> Mutation:
    def run(d: DSData) -> DSData:
        rules = d.rules_y if which == "y" else d.rules_t
        new = rules.with_rule(*key, fn(rules[key]))
        return DSData(d.U, d.V, d.W, new if which == "y" else d.rules_y, new if which == "t" else d.rules_t)

    f, _ = key
    return Mutation(f"d{FIELD_NAMES[f]}/d{which}: {tag}", run)


def _matrix_mutation(which: str, i: int, j: int, fn) -> Mutation:
    def run(d: DSData) -> DSData:
        mats = {"U": d.U, "V": d.V, "W": d.W}
        mats[which] = mats[which].replace(i, j, fn(mats[which][i, j]))
        return DSData(mats["U"], mats["V"], mats["W"], d.rules_y, d.rules_t)

    return Mutation(f"{which}({i + 1},{j + 1})", run)


def _flip_term(index: int):
    """Negate the ``index``-th term (graded order) of a polynomial."""

    def fn(p: Poly) -> Poly:
        terms = p.terms()
        mono, c = terms[index % len(terms)]
        return p - 2 * Poly({mono: c})

    return fn


def mutation_suite() -> list:
    """Single-sign edits of the rules and matrices; each must be detected."""
    muts = []
    for key in sorted(ds_rules_y().rules):
        muts.append(_rule_mutation("y", key, _flip_term(0), "flip first term"))
    for key in sorted(ds_rules_t().rules):
        muts.append(_rule_mutation("t", key, _flip_term(0), "flip first term"))
        muts.append(_rule_mutation("t", key, _flip_term(-1), "flip last term"))
    for which, i, j in [("U", 0, 1), ("U", 1, 2), ("U", 2, 0), ("V", 0, 2), ("V", 2, 1),
                        ("W", 0, 1), ("W", 1, 2), ("W", 2, 0), ("W", 2, 2)]:
        muts.append(_matrix_mutation(which, i, j, _flip_term(-1)))
    return muts


def run_mutations(data: DSData | None = None) -> list:
    """``(mutation name, detected)`` for every entry of :func:`mutation_suite`."""
    base = data or ds_instantiate()
    out = []
    for m in mutation_suite():
        rep = ds_verify(m.apply(base))
        out.append((m.name, not rep.ok))
    return out


def perturb_u_t(data: DSData | None = None) -> DSData:
    d = data or ds_instantiate()
    rt = d.rules_t.with_rule(U_, T, d.rules_t[(U_, T)] + _f(U_))
    return DSData(d.U, d.V, d.W, d.rules_y, rt)


__all__ = [
    "CORRECTIONS",
    "DSData",
    "FIELD_NAMES",
    "Mutation",
    "VAR_NAMES",
    "constraint_probe",
    "ds_constraints",
    "ds_instantiate",
    "ds_rules_t",
    "ds_rules_y",
    "ds_verify",
    "mutation_suite",
    "perturb_u_t",
    "printed_matrices",
    "run_mutations",
]
