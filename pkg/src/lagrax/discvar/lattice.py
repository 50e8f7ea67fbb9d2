"""Variational calculus for lattice densities ``L_n = L(u_n, ..., u_{n+N+1})``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..jetalg import ChartVar, Param, Poly, ShiftCoord
from ..jetalg.matrix import det


class DegenerateDiscreteLagrangian(ValueError):
    pass


def _check_discrete(p: Poly) -> None:
    bad = [v for v in p.variables() if type(v) not in (ShiftCoord, ChartVar, Param)]
    if bad:
        raise TypeError(f"discrete densities may only use lattice values, found {bad}")


def u(field: int = 0, shift: int = 0) -> Poly:
    return Poly.var(ShiftCoord(field, shift))


def shift(p: Poly, s: int) -> Poly:
    """Lattice shift: every ``u_{n+k}`` becomes ``u_{n+k+s}``."""
    if s == 0:
        return p

    def move(v):
        if type(v) is ShiftCoord:
            return ShiftCoord(v.field, v.shift + s)
        if type(v) is ChartVar:
            return ChartVar(v.kind, v.field, v.index + s)
        return v

    return p.map_vars(move)


def offsets(p: Poly, field: int | None = None) -> list:
    return sorted(
        {v.shift for v in p.variables() if type(v) is ShiftCoord and (field is None or v.field == field)}
    )


def fields_of(p: Poly) -> list:
    return sorted({v.field for v in p.variables() if type(v) is ShiftCoord})


def discrete_euler(L: Poly, field: int = 0) -> Poly:
    """``grad L_n = sum_k dL_{n-k}/du_n``."""
    _check_discrete(L)
    target = ShiftCoord(field, 0)
    out = Poly()
    for k in offsets(L, field):
        out = out + shift(L, -k).diff(target)
    return out


class DiscreteOneForm:
    """Finite formal sum ``sum <c_{i,k}, du_{i,n+k}>``; keys are :class:`ShiftCoord`."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping | None = None):
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    def __add__(self, other: "DiscreteOneForm") -> "DiscreteOneForm":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Poly()) + v
        return DiscreteOneForm(out)

    def __neg__(self):
        return DiscreteOneForm({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, DiscreteOneForm):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, key) -> Poly:
        return self.coeffs.get(key, Poly())

    def shift(self, s: int) -> "DiscreteOneForm":
        return DiscreteOneForm(
            {ShiftCoord(k.field, k.shift + s): shift(v, s) for k, v in self.coeffs.items()}
        )

    def delta_minus_one(self) -> "DiscreteOneForm":
        """``(Delta - 1)`` acting on both coefficients and differentials."""
        return self.shift(1) - self

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: (kv[0].field, kv[0].shift))

    def __repr__(self):
        body = " + ".join(f"<{v}, du{k.field}[n{k.shift:+d}]>" for k, v in self.items())
        return f"DiscreteOneForm({body or 0})"


def differential(L: Poly) -> DiscreteOneForm:
    _check_discrete(L)
    return DiscreteOneForm(
        {v: L.diff(v) for v in L.variables() if type(v) is ShiftCoord}
    )


def alpha_form(L: Poly) -> DiscreteOneForm:
    """The one-form with ``dL_n = <grad L_n, du_n> + (Delta - 1) alpha``.

    Writing ``a_k(n) = dL_n/du_{n+k}``, each forward offset ``k > 0``
    contributes ``sum_{s<k} Delta^s [a_k(n-k) du_n]`` and each backward
    offset contributes the mirror sum with opposite sign.
    """
    _check_discrete(L)
    out = DiscreteOneForm()
    for f in fields_of(L):
        for k in offsets(L, f):
            if k == 0:
                continue
            a = L.diff(ShiftCoord(f, k))
            if k > 0:
                base = DiscreteOneForm({ShiftCoord(f, 0): shift(a, -k)})
                for s in range(k):
                    out = out + base.shift(s)
            else:
                base = DiscreteOneForm({ShiftCoord(f, k): a})
                for s in range(-k):
                    out = out - base.shift(s)
    return out


def decomposition_residual(L: Poly) -> DiscreteOneForm:
    """``dL_n - <grad L_n, du_n> - (Delta - 1) alpha``; zero by construction."""
    grad = DiscreteOneForm({ShiftCoord(f, 0): discrete_euler(L, f) for f in fields_of(L)})
    return differential(L) - grad - alpha_form(L).delta_minus_one()


def discrete_order(L: Poly) -> int:
    offs = offsets(L)
    if not offs:
        return 0
    if offs[0] < 0:
        raise ValueError("discrete density must use offsets n, n+1, ...; shift it first")
    return offs[-1]


def check_nondegenerate(L: Poly, arity: int | None = None) -> None:
    """Mixed Hessian ``d^2 L / du_n du_{n+N+1}`` must have nonzero determinant."""
    top = discrete_order(L)
    fs = fields_of(L)
    m = (max(fs) + 1 if fs else 0) if arity is None else arity
    H = tuple(
        tuple(L.diff(ShiftCoord(i, 0)).diff(ShiftCoord(j, top)) for j in range(m)) for i in range(m)
    )
    if top == 0 or not det(H):
        raise DegenerateDiscreteLagrangian(
            f"mixed Hessian between u_n and u_(n+{top}) is identically singular"
        )


def discrete_momenta(L: Poly, arity: int | None = None, check: bool = False) -> tuple:
    """``p[j][i]``, the coefficient of ``du_{i,n+j}`` in the alpha form, ``j = 0..N``.

    Equivalently ``p_{n+j} = sum_{k=j+1}^{N+1} dL_{n+j-k}/du_{n+j}``.
    """
    if check:
        check_nondegenerate(L, arity)
    top = discrete_order(L)
    fs = fields_of(L)
    m = (max(fs) + 1 if fs else 1) if arity is None else arity
    alpha = alpha_form(L)
    return tuple(tuple(alpha[ShiftCoord(i, j)] for i in range(m)) for j in range(max(top, 1)))


def p_n(field: int = 0, j: int = 0) -> Poly:
    return Poly.var(ChartVar("p", field, j))


@dataclass(frozen=True)
class DiscreteSystem:
    """``du_{n+j}/dt = dh/dp_{n+j}``, ``dp_{n+j}/dt = -dh/du_{n+j}``."""

    hamiltonian: Poly
    pairs: tuple
    du: tuple
    dp: tuple


def discrete_hamilton_equations(h: Poly) -> DiscreteSystem:
    pairs = sorted(
        {(v.field, v.shift) for v in h.variables() if type(v) is ShiftCoord}
        | {(v.field, v.index) for v in h.variables() if type(v) is ChartVar}
    )
    du = tuple(h.diff(ChartVar("p", f, j)) for f, j in pairs)
    dp = tuple(-h.diff(ShiftCoord(f, j)) for f, j in pairs)
    return DiscreteSystem(h, tuple(pairs), du, dp)


__all__ = [
    "DegenerateDiscreteLagrangian",
    "DiscreteOneForm",
    "DiscreteSystem",
    "alpha_form",
    "check_nondegenerate",
    "decomposition_residual",
    "differential",
    "discrete_euler",
    "discrete_hamilton_equations",
    "discrete_momenta",
    "discrete_order",
    "offsets",
    "p_n",
    "shift",
    "u",
]
