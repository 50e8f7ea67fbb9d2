"""Powers, roots, Lax flows and the source (Baecklund) extension."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..jetalg import Poly
from ..jetalg import matrix as mx
from .operator import (
    PsiDO,
    TruncationError,
    _compose,
    adjoint,
    apply,
    commutator,
    compose,
    default_depth,
    split_plus,
)


class RootError(ValueError):
    pass


def power(a: PsiDO, n: int, depth: int | None = None) -> PsiDO:
    if n < 0:
        raise ValueError("power needs n >= 0")
    depth = default_depth() if depth is None else depth
    if n == 0:
        return PsiDO.identity(a.size)
    out = a
    for _ in range(n - 1):
        out = compose(out, a, depth)
    return out


def root(a: PsiDO, m: int, depth: int | None = None) -> PsiDO:
    """The ``m``-th root ``xi^k + c_1 xi^(k-1) + ...`` of ``a`` (order ``mk``).

    Coefficients are fixed one order at a time: the ``xi^(mk-j)`` coefficient
    of ``r^m`` is ``m c_j`` plus terms in ``c_1..c_{j-1}``. Enough are kept
    that ``power(root(a, m, d), m)`` agrees with ``a`` through ``xi^-d``.
    """
    depth = default_depth() if depth is None else depth
    if m < 1:
        raise RootError("root index must be >= 1")
    top = a.degree
    if top is None or top % m or top // m < 1:
        raise RootError(f"leading order {top} is not a positive multiple of {m}")
    if a.coeffs[top] != mx.identity(a.size):
        raise RootError("leading coefficient must be the identity matrix")
    k = top // m
    J = m * k + depth
    if a.low is not None:
        J = min(J, top - a.low)
    r = PsiDO.xi(k, a.size)
    inv_m = Fraction(1, m)
    for j in range(1, J + 1):
        target = top - j
        partial = r
        for s in range(2, m + 1):
            # r^s must reach far enough down to feed order ``target`` of r^m
            partial = _compose(partial, r, target - (m - s) * k)
        c = mx.mscale(mx.msub(a.coeffs.get(target, mx.zeros(a.size)), partial.coeffs.get(target, mx.zeros(a.size))), inv_m)
        coeffs = dict(r.coeffs)
        coeffs[k - j] = c
        r = PsiDO(coeffs, a.size)
    return PsiDO(r.coeffs, a.size, k - J)


def lax_rhs(l: PsiDO, generator: PsiDO, depth: int | None = None) -> PsiDO:
    """``[generator_+, l]``; fails if ``generator`` is not known down to order 0."""
    if not generator.trusted(0):
        raise TruncationError(
            f"generator is only trusted down to order {generator.low}; its differential part is unresolved"
        )
    return commutator(split_plus(generator), l, depth)


def multiplication_part(a: PsiDO):
    """The coefficient matrix of an operator that must be of order <= 0 with no tail."""
    bad = [k for k in a.coeffs if k != 0]
    if bad:
        raise TruncationError(f"operator has nonzero orders {sorted(bad)}; not a multiplication operator")
    return a.coeff(0)


def rank_one(f: Sequence[Poly], g: Sequence[Poly], depth: int | None = None) -> PsiDO:
    """``f xi^-1 (x) g``: entry ``(i, j)`` is ``f_i o xi^-1 o g_j``, normal ordered."""
    depth = default_depth() if depth is None else depth
    n = len(f)
    if len(g) != n:
        raise ValueError("f and f* must have equal length")
    if all(not x for x in f) or all(not x for x in g):
        return PsiDO.zero(n)
    G = PsiDO({0: tuple(tuple(g[j] if i == 0 else Poly() for j in range(n)) for i in range(n))}, n)
    # xi^-1 o (row vector g) then left-multiply by the column f
    inner = _compose(PsiDO.xi(-1, n), G, -depth)
    coeffs = {}
    for k, m in inner.coeffs.items():
        row = m[0]
        coeffs[k] = tuple(tuple(f[i] * row[j] for j in range(n)) for i in range(n))
    return PsiDO(coeffs, n, inner.low)


def backlund_extend(l_tilde: PsiDO, f: Sequence[Poly], fstar: Sequence[Poly], depth: int | None = None) -> PsiDO:
    """``l_tilde + f xi^-1 (x) f*``."""
    if len(f) != l_tilde.size or len(fstar) != l_tilde.size:
        raise ValueError("source vectors must match the operator size")
    return l_tilde + rank_one(f, fstar, depth)


@dataclass(frozen=True)
class SourceTriple:
    """A point ``(l_hat, f, f*)`` of the source-extended phase space."""

    l_hat: PsiDO
    f: tuple
    fstar: tuple

    def __post_init__(self):
        n = self.l_hat.size
        if len(self.f) != n or len(self.fstar) != n:
            raise ValueError("source vectors must match the operator size")

    @classmethod
    def extend(cls, l_tilde: PsiDO, f, fstar, depth: int | None = None) -> "SourceTriple":
        return cls(backlund_extend(l_tilde, f, fstar, depth), tuple(f), tuple(fstar))

    def l_tilde(self, depth: int | None = None) -> PsiDO:
        return self.l_hat - rank_one(self.f, self.fstar, depth)


@dataclass(frozen=True)
class SourceFlow:
    dl: PsiDO
    df: tuple
    dfstar: tuple


def source_flow(t: SourceTriple, n: int, depth: int | None = None) -> SourceFlow:
    """``(dl/dtau_n, df/dtau_n, df*/dtau_n) = ([G_+, l], G_+ f, -(G_+)^* f*)`` with ``G = l^n``."""
    if n < 1:
        raise ValueError("flow index n must be >= 1")
    depth = default_depth() if depth is None else depth
    G = power(t.l_hat, n, depth)
    if not G.trusted(0):
        raise TruncationError("depth too small to resolve the differential part of l^n")
    Gp = split_plus(G)
    dl = commutator(Gp, t.l_hat, depth)
    df = tuple(apply(Gp, list(t.f)))
    dfs = tuple(-x for x in apply(adjoint(Gp, depth), list(t.fstar)))
    return SourceFlow(dl, df, dfs)


@dataclass(frozen=True)
class Gradient:
    """Components ``(d gamma / d l, d gamma / d f, d gamma / d f*)``."""

    dl: PsiDO
    df: tuple
    dfstar: tuple


def theta_apply(grad: Gradient, state: SourceTriple, depth: int | None = None) -> SourceFlow:
    """The extended Poisson operator applied to a gradient.

    ``l``-component: ``[l, G_+] - [l, G]_+ - f xi^-1 (x) g_f + g_f* xi^-1 (x) f*``;
    ``f``-component: ``g_f* - G_+ f``; ``f*``-component: ``-g_f + (G_+)^* f*``.
    The induced flow is the negative of this tangent vector.
    """
    depth = default_depth() if depth is None else depth
    l, f, fs = state.l_hat, list(state.f), list(state.fstar)
    G = grad.dl
    if not G.trusted(0):
        raise TruncationError("gradient not resolved down to order 0")
    Gp = split_plus(G)
    dl = (
        commutator(l, Gp, depth)
        - split_plus(commutator(l, G, depth))
        - rank_one(f, list(grad.df), depth)
        + rank_one(list(grad.dfstar), fs, depth)
    )
    Gpf = apply(Gp, f)
    Gps = apply(adjoint(Gp, depth), fs)
    df = tuple(a - b for a, b in zip(grad.dfstar, Gpf))
    dfs = tuple(-a + b for a, b in zip(grad.df, Gps))
    return SourceFlow(dl, df, dfs)


def negate_flow(v: SourceFlow) -> SourceFlow:
    return SourceFlow(-v.dl, tuple(-x for x in v.df), tuple(-x for x in v.dfstar))


def backlund_chain(t: SourceTriple, n: int, depth: int | None = None) -> tuple:
    """Chain-rule derivative of ``l_tilde + f xi^-1 (x) f*`` along the source flow.

    Returns ``(chain, direct)`` where ``direct = [l_+^n, l]``. The ``l_tilde``
    flow is ``[G_+, l_tilde] - [G, l_tilde]_+``, which stays differential.
    """
    depth = default_depth() if depth is None else depth
    flow = source_flow(t, n, depth)
    G = power(t.l_hat, n, depth)
    lt = t.l_tilde(depth)
    dlt = commutator(split_plus(G), lt, depth) - split_plus(commutator(G, lt, depth))
    chain = dlt + rank_one(list(flow.df), list(t.fstar), depth) + rank_one(list(t.f), list(flow.dfstar), depth)
    return chain, flow.dl


__all__ = [
    "Gradient",
    "RootError",
    "SourceFlow",
    "SourceTriple",
    "backlund_chain",
    "backlund_extend",
    "lax_rhs",
    "multiplication_part",
    "negate_flow",
    "power",
    "rank_one",
    "root",
    "source_flow",
    "theta_apply",
]
