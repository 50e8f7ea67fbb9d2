"""Zero-curvature checks for lambda-dependent linear problems in several variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..jetalg import JetCoord, Param, Poly, total_derivative
from ..jetalg import matrix as mx
from ..jetalg.poly import jet_coord

LAMBDA = Param("lam")
_IN_PROGRESS = object()


def lam() -> Poly:
    return Poly.var(LAMBDA)


class MissingRuleError(KeyError):
    def __init__(self, field: int, var: int, name: str | None = None):
        self.field = field
        self.var = var
        label = name if name is not None else f"field {field}"
        super().__init__(f"no rule for the derivative of {label} along variable {var}")

    def __str__(self):
        return self.args[0]


class InconsistentRulesError(ValueError):
    def __init__(self, mismatches: list):
        self.mismatches = mismatches
        desc = "; ".join(f"field {f}, vars ({a},{b}): {r}" for f, a, b, r in mismatches)
        super().__init__(f"cross-derivative closure fails: {desc}")


class SpectralMatrix:
    """Square matrix whose entries are polynomials in ``lam`` over jet polynomials."""

    __slots__ = ("entries",)

    def __init__(self, rows):
        self.entries = mx.as_matrix(rows)
        if any(len(r) != len(self.entries) for r in self.entries):
            raise ValueError("spectral matrix must be square")

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> Poly:
        i, j = ij
        return self.entries[i][j]

    def replace(self, i: int, j: int, value: Poly) -> "SpectralMatrix":
        rows = [list(r) for r in self.entries]
        rows[i][j] = value
        return SpectralMatrix(rows)

    def lam_degree(self) -> int:
        return max((max(e.collect(LAMBDA)) for r in self.entries for e in r if e), default=0)

    def __eq__(self, other):
        if not isinstance(other, SpectralMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def __repr__(self):
        return "SpectralMatrix(" + "; ".join(", ".join(str(e) for e in r) for r in self.entries) + ")"


class FlowRules:
    """Evolution rules ``d u_field / d var = rhs``, prolonged by commuting total derivatives.

    ``rules`` maps ``(field, var)`` to a right-hand side. A jet with a
    positive count in some ruled variable is replaced by the corresponding
    total derivative of the rule; when several ruled variables apply, the
    highest variable index is eliminated first.
    """

    def __init__(self, rules: Mapping | None = None):
        self.rules = {(int(f), int(v)): r for (f, v), r in (rules or {}).items()}
        self._cache: dict = {}

    def __len__(self):
        return len(self.rules)

    def __contains__(self, key):
        return key in self.rules

    def __getitem__(self, key) -> Poly:
        return self.rules[key]

    def merged(self, other: "FlowRules") -> "FlowRules":
        out = dict(self.rules)
        out.update(other.rules)
        return FlowRules(out)

    def with_rule(self, field: int, var: int, rhs: Poly) -> "FlowRules":
        out = dict(self.rules)
        out[(field, var)] = rhs
        return FlowRules(out)

    def flow_vars(self) -> set:
        return {v for _, v in self.rules}

    def _choose(self, j: JetCoord):
        cands = [v for v, k in enumerate(j.orders) if k > 0 and (j.field, v) in self.rules]
        return max(cands) if cands else None

    def jet_rule(self, j: JetCoord) -> Poly | None:
        """Fully reduced replacement for a jet coordinate, or ``None`` if it is free."""
        if j in self._cache:
            hit = self._cache[j]
            if hit is _IN_PROGRESS:
                raise InconsistentRulesError([(j.field, None, None, "rule depends on its own jet")])
            return hit
        v = self._choose(j)
        if v is None:
            self._cache[j] = None
            return None
        self._cache[j] = _IN_PROGRESS
        orders = list(j.orders)
        orders[v] -= 1
        expr = self.reduce(self.rules[(j.field, v)])
        for w, k in enumerate(orders):
            for _ in range(k):
                expr = self.reduce(total_derivative(expr, w))
        self._cache[j] = expr
        return expr

    def reduce(self, expr: Poly) -> Poly:
        sub = {}
        for j in expr.jets():
            r = self.jet_rule(j)
            if r is not None:
                sub[j] = r
        return expr.subs(sub) if sub else expr

    def derivative(self, expr: Poly, var: int) -> Poly:
        return self.reduce(total_derivative(self.reduce(expr), var))

    def cross_check(self) -> list:
        """``(field, a, b, residual)`` for every pair of ruled variables that fails to commute."""
        out = []
        vars_by_field: dict = {}
        for f, v in self.rules:
            vars_by_field.setdefault(f, []).append(v)
        for f, vs in sorted(vars_by_field.items()):
            vs = sorted(vs)
            for i, a in enumerate(vs):
                for b in vs[i + 1:]:
                    lhs = self.derivative(self.rules[(f, a)], b)
                    rhs = self.derivative(self.rules[(f, b)], a)
                    if lhs != rhs:
                        out.append((f, a, b, lhs - rhs))
        return out


def prolong(rules: FlowRules | Mapping, check: bool = True) -> FlowRules:
    """Prepare rules for use on arbitrary jets; raises on cross-derivative inconsistency."""
    r = rules if isinstance(rules, FlowRules) else FlowRules(rules)
    r = FlowRules(r.rules)
    if check:
        bad = r.cross_check()
        if bad:
            raise InconsistentRulesError(bad)
    return r


def _field_names(names):
    return (lambda f: names[f] if names and f < len(names) else None)


def curvature(
    U: SpectralMatrix,
    W: SpectralMatrix,
    base_var: int,
    flow_var: int,
    rules: FlowRules | Mapping,
    names=None,
) -> SpectralMatrix:
    """``D_flow U - D_base W + [U, W]`` with flow derivatives eliminated by ``rules``."""
    rules = rules if isinstance(rules, FlowRules) else FlowRules(rules)
    if U.size != W.size:
        raise ValueError("U and W must have the same size")
    name = _field_names(names)

    def dflow(e: Poly) -> Poly:
        d = total_derivative(e, flow_var)
        out = rules.reduce(d)
        for j in out.jets():
            if len(j.orders) > flow_var and j.orders[flow_var] > 0:
                raise MissingRuleError(j.field, flow_var, name(j.field))
        return out

    if base_var == flow_var:
        dU = mx.mmap(lambda e: total_derivative(e, flow_var), U.entries)
    else:
        dU = mx.mmap(dflow, U.entries)
    dW = mx.mmap(lambda e: total_derivative(e, base_var), W.entries)
    res = mx.madd(mx.msub(dU, dW), mx.commutator(U.entries, W.entries))
    return SpectralMatrix(mx.mmap(rules.reduce, res))


@dataclass(frozen=True)
class Residual:
    pair: str
    row: int
    col: int
    lam_power: int
    value: Poly


def graded_residuals(M: SpectralMatrix, pair: str = "") -> list:
    """Nonzero residual pieces per entry and per power of ``lam`` (1-based indices)."""
    out = []
    for i, r in enumerate(M.entries):
        for j, e in enumerate(r):
            if not e:
                continue
            for k, c in sorted(e.collect(LAMBDA).items()):
                if c:
                    out.append(Residual(pair, i + 1, j + 1, k, c))
    return out


@dataclass
class CurvatureReport:
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.residuals


__all__ = [
    "CurvatureReport",
    "FlowRules",
    "InconsistentRulesError",
    "LAMBDA",
    "MissingRuleError",
    "Residual",
    "SpectralMatrix",
    "curvature",
    "graded_residuals",
    "jet_coord",
    "lam",
    "prolong",
]
