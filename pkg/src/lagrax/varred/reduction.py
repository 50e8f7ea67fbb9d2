"""Momenta, Hamiltonians and canonical charts for higher-order Lagrangian densities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..jetalg import (
    ChartVar,
    Poly,
    antiderivative,
    euler,
    jet,
    jet_coord,
    jet_order,
    max_order,
    pairing,
    total_derivative,
)
from ..jetalg.calculus import _check_single
from ..jetalg.matrix import det, scalar_inverse


class DegenerateLagrangianError(ValueError):
    pass


class InternalConsistencyError(AssertionError):
    """A built-in identity check failed; carries the nonzero residuals."""

    def __init__(self, message: str, residuals):
        self.residuals = residuals
        super().__init__(f"{message}: {residuals}")


def _u(field: int, k: int) -> Poly:
    return jet(field, k)


class LagrangianDensity:
    """A density ``L[u]`` in one independent variable with nondegenerate top jets.

    ``order`` is the highest jet order ``N + 1`` present; every field must
    enter at that order with a Hessian block whose determinant is not
    identically zero.
    """

    __slots__ = ("density", "arity", "order", "hessian")

    def __init__(self, density: Poly, arity: int | None = None):
        _check_single(density)
        fields = {v.field for v in density.jets()}
        if not fields:
            raise DegenerateLagrangianError("density does not depend on any field")
        m = max(fields) + 1 if arity is None else arity
        if max(fields) >= m:
            raise ValueError(f"density uses field {max(fields)} but arity is {m}")
        top = max_order(density)
        H = tuple(
            tuple(density.diff(jet_coord(i, (top,))).diff(jet_coord(j, (top,))) for j in range(m))
            for i in range(m)
        )
        if not det(H):
            raise DegenerateLagrangianError(
                f"Hessian with respect to order-{top} jets has identically zero determinant: "
                + "; ".join(", ".join(str(e) for e in row) for row in H)
            )
        self.density = density
        self.arity = m
        self.order = top
        self.hessian = H

    @property
    def N(self) -> int:
        return self.order - 1

    def __repr__(self):
        return f"LagrangianDensity({self.density}, arity={self.arity})"


@dataclass(frozen=True)
class MomentumSet:
    """``p[j][i]`` is the momentum conjugate to ``u_i^(j)``, ``j = 0..N``."""

    p: tuple

    def __len__(self):
        return len(self.p)

    def __getitem__(self, j):
        return self.p[j]


def momenta(L: LagrangianDensity) -> MomentumSet:
    """``p_j = sum_k (-D)^k dL/du^(j+k+1)``, re-checked against the recurrence."""
    N, m, dens = L.N, L.arity, L.density
    ps = []
    for j in range(N + 1):
        vec = []
        for i in range(m):
            acc = Poly()
            for k in range(N - j + 1):
                t = total_derivative(dens.diff(jet_coord(i, (j + k + 1,))), 0, k)
                acc = acc + (t if k % 2 == 0 else -t)
            vec.append(acc)
        ps.append(tuple(vec))
    out = MomentumSet(tuple(ps))
    res = recurrence_residuals(L, out)
    if any(r for row in res for r in row):
        raise InternalConsistencyError("momentum recurrence violated", res)
    return out


def recurrence_residuals(L: LagrangianDensity, P: MomentumSet) -> list:
    """``D p_j + p_{j-1} - dL/du^(j)`` for ``j = 1..N+1`` (``p_{N+1} = 0``)."""
    N, m = L.N, L.arity
    zero = tuple(Poly() for _ in range(m))
    get = lambda j: P[j] if 0 <= j <= N else zero  # noqa: E731
    out = []
    for j in range(1, N + 2):
        out.append(
            [
                total_derivative(get(j)[i]) + get(j - 1)[i] - L.density.diff(jet_coord(i, (j,)))
                for i in range(m)
            ]
        )
    return out


# -- canonical chart -------------------------------------------------------

def q_var(field: int, j: int) -> Poly:
    return Poly.var(ChartVar("q", field, j))


def p_var(field: int, j: int) -> Poly:
    return Poly.var(ChartVar("p", field, j))


class ChartUnavailable(ValueError):
    pass


class CanonicalChart:
    """Coordinates ``q_{i,j} = u_i^(j)`` and momenta ``p_{i,j}`` for ``j = 0..N``.

    Holds the Legendre data needed to rewrite jet expressions: jets up to
    order ``2N+1`` are solved from the momenta, higher ones from the Euler
    equation (on-shell reduction).
    """

    def __init__(self, L: LagrangianDensity, P: MomentumSet | None = None):
        self.L = L
        self.P = P if P is not None else momenta(L)
        N, m = L.N, L.arity
        self.pairs = [(i, j) for i in range(m) for j in range(N + 1)]
        H = L.hessian
        if any(e.variables() for row in H for e in row):
            raise ChartUnavailable(
                "top-order momentum is not affine in the top jets (Hessian depends on the jets)"
            )
        Hinv = scalar_inverse(H)
        sub: dict = {}
        for i in range(m):
            for j in range(N + 1):
                sub[jet_coord(i, (j,))] = q_var(i, j)
        self._jet_rules: dict = {}
        for j in range(N + 1):
            K = N + 1 + j
            sign = -1 if j % 2 else 1
            rests = []
            for i in range(m):
                expr = self.P[N - j][i]
                rest = expr
                for k in range(m):
                    c = expr.diff(jet_coord(k, (K,)))
                    if c != sign * H[i][k]:
                        raise ChartUnavailable(f"momentum p_{N - j} is not affine in order-{K} jets")
                    rest = rest - c * _u(k, K)
                if max_order(rest) >= K:
                    raise ChartUnavailable(f"momentum p_{N - j} is not affine in order-{K} jets")
                rests.append(rest.subs(sub))
            for i in range(m):
                val = Poly()
                for k in range(m):
                    if Hinv[i][k]:
                        val = val + (p_var(k, N - j) - rests[k]) * (sign * Hinv[i][k])
                sub[jet_coord(i, (K,))] = val
                self._jet_rules[jet_coord(i, (K,))] = val
        self._sub = sub
        self._onshell: dict = {}

    @property
    def dimension(self) -> int:
        return 2 * len(self.pairs)

    def to_chart(self, expr: Poly, onshell: bool = False) -> Poly:
        """Rewrite ``expr`` in chart variables.

        Without ``onshell`` only jets of order ``<= 2N+1`` are admissible;
        with it, higher jets are eliminated with the Euler equation and its
        total derivatives.
        """
        limit = 2 * self.L.N + 1
        high = [v for v in expr.jets() if jet_order(v) > limit]
        if high and not onshell:
            raise ChartUnavailable(f"expression involves jets above order {limit}; use onshell=True")
        if high:
            expr = self.onshell_reduce(expr)
        out = expr.subs(self._sub)
        if out.jets():
            raise ChartUnavailable(f"jets {sorted(out.jets())} remain after chart substitution")
        return out

    def _euler_rules(self) -> dict:
        if "base" not in self._onshell:
            L, m, N = self.L, self.L.arity, self.L.N
            top = 2 * N + 2
            E = [euler(L.density, i) for i in range(m)]
            sign = -1 if (N + 1) % 2 else 1
            Hinv = scalar_inverse(L.hessian)
            rests = []
            for i in range(m):
                rest = E[i]
                for k in range(m):
                    c = E[i].diff(jet_coord(k, (top,)))
                    if c != sign * L.hessian[i][k]:
                        raise ChartUnavailable("Euler equation is not affine in its top jets")
                    rest = rest - c * _u(k, top)
                rests.append(rest)
            base = {}
            for i in range(m):
                val = Poly()
                for k in range(m):
                    if Hinv[i][k]:
                        val = val - rests[k] * (sign * Hinv[i][k])
                base[jet_coord(i, (top,))] = val
            self._onshell["base"] = base
            self._onshell["levels"] = {top: base}
        return self._onshell

    def onshell_rule(self, order: int) -> dict:
        """Jets of the given order expressed through jets of order ``<= 2N+1``."""
        data = self._euler_rules()
        levels = data["levels"]
        top = 2 * self.L.N + 2
        k = max(levels)
        while k < order:
            prev = levels[k]
            nxt = {}
            for v, val in prev.items():
                d = total_derivative(val).subs(data["base"])
                nxt[jet_coord(v.field, (k + 1,))] = d
            levels[k + 1] = nxt
            k += 1
        return levels[order] if order >= top else {}

    def onshell_reduce(self, expr: Poly) -> Poly:
        limit = 2 * self.L.N + 1
        orders = sorted({jet_order(v) for v in expr.jets() if jet_order(v) > limit}, reverse=True)
        for k in orders:
            expr = expr.subs(self.onshell_rule(k))
        return expr


@dataclass(frozen=True)
class HamiltonianX:
    jet_form: Poly
    chart_form: Poly | None
    unavailable_reason: str | None = None


def hamiltonian_x(L: LagrangianDensity, P: MomentumSet | None = None) -> HamiltonianX:
    """``h = sum_j <p_j, u^(j+1)> - L`` in jet form and, when invertible, chart form."""
    P = P if P is not None else momenta(L)
    h = -L.density
    for j in range(L.N + 1):
        h = h + pairing(P[j], [_u(i, j + 1) for i in range(L.arity)])
    residual = total_derivative(h) + pairing(
        [euler(L.density, i) for i in range(L.arity)], [_u(i, 1) for i in range(L.arity)]
    )
    if residual:
        raise InternalConsistencyError("Dx h + <E(L), u_x> != 0", residual)
    try:
        chart = CanonicalChart(L, P).to_chart(h)
        reason = None
    except ChartUnavailable as exc:
        chart, reason = None, str(exc)
    return HamiltonianX(h, chart, reason)


def symmetry_hamiltonian(L: LagrangianDensity, K: Sequence[Poly]) -> Poly:
    """``h`` with ``Dx h = -<E(L), K>``; raises ``NotExactError`` otherwise."""
    if len(K) != L.arity:
        raise ValueError("symmetry needs one component per field")
    pair = pairing([euler(L.density, i) for i in range(L.arity)], K)
    return -antiderivative(pair)


def assemble_lagrangian(densities: Sequence[Poly], c: Sequence, N: int) -> LagrangianDensity:
    """``-gamma_{N+1} + sum_{j<=N} c_j gamma_j`` from an ordered list of densities."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if len(c) != N + 1:
        raise ValueError(f"expected {N + 1} coefficients c_0..c_N, got {len(c)}")
    if len(densities) < N + 2:
        raise ValueError(f"need densities gamma_0..gamma_{N + 1}, got {len(densities)}")
    gammas = list(densities[: N + 2])
    orders = [max_order(g) for g in gammas]
    for j in range(N + 1):
        if orders[j] > orders[j + 1]:
            raise ValueError(
                f"densities must be ordered by differential order: gamma_{j} has order "
                f"{orders[j]} > {orders[j + 1]}"
            )
    L = -gammas[N + 1]
    for cj, g in zip(c, gammas):
        L = L + g * cj
    return LagrangianDensity(L)


__all__ = [
    "CanonicalChart",
    "ChartUnavailable",
    "DegenerateLagrangianError",
    "HamiltonianX",
    "InternalConsistencyError",
    "LagrangianDensity",
    "MomentumSet",
    "assemble_lagrangian",
    "hamiltonian_x",
    "momenta",
    "p_var",
    "q_var",
    "recurrence_residuals",
    "symmetry_hamiltonian",
]
