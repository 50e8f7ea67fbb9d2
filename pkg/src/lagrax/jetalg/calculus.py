"""Total derivatives, variational derivatives and linear differential operators."""

from __future__ import annotations

from math import comb
from typing import Sequence

from .poly import IndepVar, JetCoord, Poly, jet_coord


class NotExactError(ValueError):
    """Raised when a density is not a total derivative.

    ``residual`` maps field indices to the nonzero Euler images.
    """

    def __init__(self, residual: dict):
        self.residual = residual
        shown = ", ".join(f"field {f}: {r}" for f, r in sorted(residual.items()))
        super().__init__(f"density is not exact; Euler residual {shown}")


class MultiVariableError(ValueError):
    pass


def _raise(v: JetCoord, var: int) -> JetCoord:
    orders = list(v.orders) + [0] * (var + 1 - len(v.orders))
    orders[var] += 1
    return JetCoord(v.field, tuple(orders))


def total_derivative(p: Poly, var: int = 0, times: int = 1) -> Poly:
    """``D_var`` applied ``times`` times; shift, chart and parameter symbols are constants."""
    for _ in range(times):
        out = Poly()
        for v in p.variables():
            t = type(v)
            if t is JetCoord:
                out = out + p.diff(v) * Poly.var(_raise(v, var))
            elif t is IndepVar and v.index == var:
                out = out + p.diff(v)
        p = out
    return p


def jet_order(v: JetCoord) -> int:
    return v.orders[0] if v.orders else 0


def _check_single(p: Poly) -> None:
    for v in p.variables():
        if (type(v) is JetCoord and len(v.orders) > 1) or (type(v) is IndepVar and v.index > 0):
            raise MultiVariableError("operation is defined for a single independent variable x")


def max_order(p: Poly, field: int | None = None) -> int:
    """Highest x-derivative order present (``-1`` when no jet appears)."""
    return max(
        (jet_order(v) for v in p.jets() if field is None or v.field == field),
        default=-1,
    )


def fields_of(p: Poly) -> set:
    return {v.field for v in p.jets()}


def euler(L: Poly, field: int = 0) -> Poly:
    """Variational derivative ``sum_k (-D)^k dL/du^(k)`` for one field."""
    _check_single(L)
    out = Poly()
    for k in range(max_order(L, field) + 1):
        part = L.diff(jet_coord(field, (k,)))
        if part:
            term = total_derivative(part, 0, k)
            out = out + (term if k % 2 == 0 else -term)
    return out


def is_exact(p: Poly) -> bool:
    _check_single(p)
    return all(not euler(p, f) for f in fields_of(p))


def _integrate_x(p: Poly) -> Poly:
    x = IndepVar(0)
    out = Poly()
    for k, c in p.collect(x).items():
        out = out + c * Poly.var(x, k + 1) / (k + 1)
    return out


def antiderivative(p: Poly) -> Poly:
    """Return ``q`` with ``D_x q = p`` and no constant term.

    Peels off the highest jet order at each step: an exact density is
    affine in its top jets, and the coefficient field is a gradient in the
    next-lower jets, so it integrates by the polynomial homotopy formula.
    """
    _check_single(p)
    residual = {f: e for f in sorted(fields_of(p)) if (e := euler(p, f))}
    if residual:
        raise NotExactError(residual)
    q = Poly()
    while True:
        K = max_order(p)
        if K <= 0:
            break
        piece = Poly()
        for f in fields_of(p):
            top = jet_coord(f, (K,))
            a = p.diff(top)
            if not a:
                continue
            w = Poly.var(jet_coord(f, (K - 1,)))
            for mono, c in a._terms.items():
                d = sum(e for v, e in mono if type(v) is JetCoord and jet_order(v) == K - 1)
                piece = piece + Poly._raw({mono: c}) * w / (d + 1)
        if not piece:
            raise AssertionError("exact density without top-order linear part")
        q = q + piece
        p = p - total_derivative(piece)
    if p.jets():
        raise AssertionError(f"exactness check passed but order-0 remainder {p} persists")
    return q + _integrate_x(p)


def density_normal_form(p: Poly) -> Poly:
    """Representative of ``p`` modulo total derivatives (single field).

    Terms linear in their highest derivative are integrated by parts until
    none remain; pure polynomials in ``x`` are exact and drop out.
    """
    _check_single(p)
    for _ in range(10000):
        target = None
        for mono, c in p.terms():
            jets = [(v, e) for v, e in mono if type(v) is JetCoord]
            if not jets:
                target = (mono, c, None)
                break
            K = max(jet_order(v) for v, _ in jets)
            tops = [(v, e) for v, e in jets if jet_order(v) == K]
            if K >= 1 and len(tops) == 1 and tops[0][1] == 1:
                target = (mono, c, tops[0][0])
                break
        if target is None:
            return p
        mono, c, top = target
        term = Poly._raw({mono: c})
        if top is None:
            p = p - total_derivative(_integrate_x(term))
            continue
        below = jet_coord(top.field, (jet_order(top) - 1,))
        # term = u^(K) * sum_a N_a * (u^(K-1))**a with N_a free of u^(K-1)
        a = term.diff(top).collect(below)
        primitive = Poly()
        for k, n_k in a.items():
            primitive = primitive + n_k * Poly.var(below, k + 1) / (k + 1)
        p = p - total_derivative(primitive)
    raise RuntimeError("density normal form did not terminate")


def pairing(a: Sequence[Poly], b: Sequence[Poly]) -> Poly:
    if len(a) != len(b):
        raise ValueError("pairing needs vectors of equal length")
    out = Poly()
    for ai, bi in zip(a, b):
        out = out + ai * bi
    return out


class DiffOperator:
    """Matrix of finite sums ``sum_k c_k D^k`` in the single variable x.

    ``entries[i][j]`` is a tuple ``(c_0, c_1, ...)`` of coefficients.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = []
        width = None
        for row in entries:
            r = []
            for e in row:
                if isinstance(e, Poly):
                    e = (e,)
                e = [c if isinstance(c, Poly) else Poly.const(c) for c in e]
                while e and not e[-1]:
                    e.pop()
                r.append(tuple(e))
            if width is None:
                width = len(r)
            elif len(r) != width:
                raise ValueError("ragged operator matrix")
            rows.append(tuple(r))
        self.entries = tuple(rows)

    @classmethod
    def scalar(cls, *coeffs) -> "DiffOperator":
        """``DiffOperator.scalar(c0, c1, ...)`` is ``c0 + c1 D + ...``."""
        return cls([[coeffs]])

    @classmethod
    def identity(cls, n: int) -> "DiffOperator":
        return cls([[(Poly.const(1),) if i == j else () for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple:
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    @property
    def order(self) -> int:
        return max((len(e) - 1 for row in self.entries for e in row), default=-1)

    def coeff(self, i: int, j: int, k: int) -> Poly:
        e = self.entries[i][j]
        return e[k] if k < len(e) else Poly()

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return DiffOperator(
            [[_add_seq(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def __neg__(self):
        return DiffOperator([[tuple(-c for c in e) for e in row] for row in self.entries])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return self.compose(other)
        return DiffOperator([[tuple(c * other for c in e) for e in row] for row in self.entries])

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        n, m = self.shape
        m2, r = other.shape
        if m != m2:
            raise ValueError("shape mismatch in composition")
        out = []
        for i in range(n):
            row = []
            for j in range(r):
                acc: list = []
                for l in range(m):
                    acc = _add_seq(acc, _compose_scalar(self.entries[i][l], other.entries[l][j]))
                row.append(tuple(acc))
            out.append(row)
        return DiffOperator(out)

    def apply(self, vec: Sequence[Poly]) -> list:
        n, m = self.shape
        if len(vec) != m:
            raise ValueError("vector length does not match operator width")
        out = []
        for i in range(n):
            acc = Poly()
            for j in range(m):
                for k, c in enumerate(self.entries[i][j]):
                    if c:
                        acc = acc + c * total_derivative(vec[j], 0, k)
            out.append(acc)
        return out

    def adjoint(self) -> "DiffOperator":
        """Formal adjoint: ``(c D^k)^* = (-D)^k c`` with transposition."""
        n, m = self.shape
        out = [[() for _ in range(n)] for _ in range(m)]
        for i in range(n):
            for j in range(m):
                acc: list = []
                for k, c in enumerate(self.entries[i][j]):
                    sign = -1 if k % 2 else 1
                    for l in range(k + 1):
                        term = [Poly()] * (k - l) + [total_derivative(c, 0, l) * (sign * comb(k, l))]
                        acc = _add_seq(acc, term)
                out[j][i] = tuple(acc)
        return DiffOperator(out)

    def __repr__(self):
        return f"DiffOperator({format_operator(self)})"


def _add_seq(a, b) -> list:
    n = max(len(a), len(b))
    return [
        (a[k] if k < len(a) else Poly()) + (b[k] if k < len(b) else Poly()) for k in range(n)
    ]


def _compose_scalar(a, b) -> list:
    # (a_i D^i)(b_j D^j) = sum_l C(i,l) a_i b_j^(l) D^(i+j-l)
    out: list = []
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if not bj:
                continue
            d = bj
            for l in range(i + 1):
                term = [Poly()] * (i + j - l) + [ai * d * comb(i, l)]
                out = _add_seq(out, term)
                d = total_derivative(d)
    return out


def format_operator(A: DiffOperator) -> str:
    def entry(e):
        parts = []
        for k, c in enumerate(e):
            if c:
                parts.append(f"({c})*D^{k}" if k else f"({c})")
        return " + ".join(parts) or "0"

    return "[" + "; ".join(", ".join(entry(e) for e in row) for row in A.entries) + "]"


def frechet(K: Sequence[Poly]) -> DiffOperator:
    """Linearization: entry ``(i, j)`` is ``sum_k dK_i/du_j^(k) D^k``."""
    m = len(K)
    for Ki in K:
        _check_single(Ki)
    rows = []
    for Ki in K:
        row = []
        for j in range(m):
            row.append(tuple(Ki.diff(jet_coord(j, (k,))) for k in range(max_order(Ki, j) + 1)))
        rows.append(row)
    return DiffOperator(rows)


def concomitant(A: DiffOperator, a: Sequence[Poly], b: Sequence[Poly]) -> Poly:
    """Bilinear ``H[a, b]`` with ``D_x H = <A* a, b> - <a, A b>``."""
    lhs = pairing(A.adjoint().apply(a), b) - pairing(a, A.apply(b))
    try:
        return antiderivative(lhs)
    except NotExactError as exc:  # pragma: no cover - impossible for genuine operators
        raise AssertionError(f"concomitant density not exact: {exc}") from exc


__all__ = [
    "DiffOperator",
    "MultiVariableError",
    "NotExactError",
    "antiderivative",
    "concomitant",
    "density_normal_form",
    "euler",
    "fields_of",
    "format_operator",
    "frechet",
    "is_exact",
    "jet_order",
    "max_order",
    "pairing",
    "total_derivative",
]
