"""Matrix pseudo-differential operators ``sum_j a_j xi^j`` with a truncation contract.

Every operator records ``low``: the lowest order whose coefficient is known
exactly. ``low is None`` means the operator is exact (a finite sum with
nothing discarded). Arithmetic propagates ``low`` so that equality and
downstream extraction only ever look at trustworthy orders.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Mapping, Sequence

from ..jetalg import Poly, is_exact, total_derivative
from ..jetalg import matrix as mx


class TruncationError(ValueError):
    """The requested order lies below the trustworthy range of an operator."""


def default_depth() -> int:
    raw = os.environ.get("LAGRAX_DEPTH", "4")
    try:
        d = int(raw)
    except ValueError as exc:
        raise ValueError(f"LAGRAX_DEPTH must be an integer, got {raw!r}") from exc
    if d < 0:
        raise ValueError("LAGRAX_DEPTH must be nonnegative")
    return d


def gbinom(i: int, a: int) -> Fraction:
    """Generalized binomial coefficient ``C(i, a)`` valid for negative ``i``."""
    out = Fraction(1)
    for t in range(a):
        out = out * (i - t) / (t + 1)
    return out


def _max_low(*lows):
    vals = [x for x in lows if x is not None]
    return max(vals) if vals else None


class PsiDO:
    """Immutable matrix pseudo-differential operator.

    ``coeffs`` maps integer orders to square matrices of polynomials in the
    jets of a single variable x.
    """

    __slots__ = ("coeffs", "size", "low")

    def __init__(self, coeffs: Mapping[int, Sequence] | None = None, size: int = 1, low: int | None = None):
        clean = {}
        for k, m in (coeffs or {}).items():
            if low is not None and k < low:
                continue
            if isinstance(m, Poly) or not isinstance(m, (tuple, list)):
                if size != 1:
                    raise ValueError("scalar coefficient given for a matrix operator")
                m = ((m,),)
            m = mx.as_matrix(m)
            if len(m) != size or any(len(r) != size for r in m):
                raise ValueError(f"coefficient of order {k} is not {size}x{size}")
            if not mx.is_zero(m):
                clean[int(k)] = m
        self.coeffs = clean
        self.size = size
        self.low = low

    # -- constructors ------------------------------------------------------
    @classmethod
    def xi(cls, k: int = 1, size: int = 1) -> "PsiDO":
        return cls({k: mx.identity(size)}, size)

    @classmethod
    def identity(cls, size: int = 1) -> "PsiDO":
        return cls.xi(0, size)

    @classmethod
    def zero(cls, size: int = 1) -> "PsiDO":
        return cls({}, size)

    @classmethod
    def mult(cls, m) -> "PsiDO":
        """Multiplication operator by a polynomial or a matrix of polynomials."""
        if isinstance(m, Poly) or not isinstance(m, (tuple, list)):
            return cls({0: m}, 1)
        return cls({0: m}, len(m))

    # -- inspection --------------------------------------------------------
    @property
    def degree(self) -> int | None:
        return max(self.coeffs) if self.coeffs else None

    @property
    def depth(self) -> int | None:
        return None if self.low is None else -self.low

    @property
    def is_exact(self) -> bool:
        return self.low is None

    @property
    def min_order(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def coeff(self, k: int):
        if self.low is not None and k < self.low:
            raise TruncationError(f"order {k} is below the trusted order {self.low}")
        return self.coeffs.get(k, mx.zeros(self.size))

    def trusted(self, k: int) -> bool:
        return self.low is None or k >= self.low

    def orders(self) -> list:
        return sorted(self.coeffs, reverse=True)

    def truncate(self, low: int) -> "PsiDO":
        return PsiDO(self.coeffs, self.size, _max_low(self.low, low))

    def map_coeffs(self, fn) -> "PsiDO":
        return PsiDO({k: mx.mmap(fn, m) for k, m in self.coeffs.items()}, self.size, self.low)

    # -- linear structure --------------------------------------------------
    def _check(self, other: "PsiDO"):
        if not isinstance(other, PsiDO):
            raise TypeError("expected a PsiDO")
        if other.size != self.size:
            raise ValueError("matrix size mismatch")

    def __add__(self, other):
        if isinstance(other, Poly):
            other = PsiDO.mult(other) if self.size == 1 else NotImplemented
        if other is NotImplemented:
            return other
        self._check(other)
        out = dict(self.coeffs)
        for k, m in other.coeffs.items():
            out[k] = mx.madd(out[k], m) if k in out else m
        return PsiDO(out, self.size, _max_low(self.low, other.low))

    def __neg__(self):
        return PsiDO({k: mx.mneg(m) for k, m in self.coeffs.items()}, self.size, self.low)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PsiDO":
        return PsiDO({k: mx.mscale(m, c) for k, m in self.coeffs.items()}, self.size, self.low)

    def __mul__(self, other):
        if isinstance(other, PsiDO):
            return NotImplemented
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        """Equality on the orders trusted by both operands."""
        if not isinstance(other, PsiDO):
            return NotImplemented
        if other.size != self.size:
            return False
        low = _max_low(self.low, other.low)
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            if low is not None and k < low:
                continue
            if self.coeffs.get(k, mx.zeros(self.size)) != other.coeffs.get(k, mx.zeros(self.size)):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        return f"PsiDO({format_psido(self)})"


def format_psido(a: PsiDO, naming=None) -> str:
    from ..jetalg.poly import DEFAULT_NAMING, format_poly

    naming = naming or DEFAULT_NAMING
    parts = []
    for k in a.orders():
        m = a.coeffs[k]
        if a.size == 1:
            c = f"({format_poly(m[0][0], naming)})"
        else:
            c = "[" + "; ".join(", ".join(format_poly(e, naming) for e in r) for r in m) + "]"
        parts.append(c if k == 0 else f"{c}*xi^{k}")
    body = " + ".join(parts) or "0"
    if a.low is not None:
        body += f" + O(xi^{a.low - 1})"
    return body


# -- composition -------------------------------------------------------------

def _derivatives(m, cache: dict, key, alpha: int):
    lst = cache.setdefault(key, [m])
    while len(lst) <= alpha:
        lst.append(mx.mmap(total_derivative, lst[-1]))
    return lst[alpha]


def _compose(a: PsiDO, b: PsiDO, lowest: int) -> PsiDO:
    """Product keeping only orders ``>= lowest``; sets ``low`` per the contract."""
    a._check(b)
    if not a.coeffs or not b.coeffs:
        low = _max_low(
            a.low + (b.degree if b.degree is not None else 0) if a.low is not None else None,
            b.low + (a.degree if a.degree is not None else 0) if b.low is not None else None,
        )
        return PsiDO({}, a.size, low)
    da, db = a.degree, b.degree
    infinite = any(i < 0 for i in a.coeffs)
    candidates = []
    if a.low is not None:
        candidates.append(a.low + db)
    if b.low is not None:
        candidates.append(b.low + da)
    # with a differential left factor the product is finite, lowest order min(b)
    if infinite or candidates or min(b.coeffs) < lowest:
        candidates.append(lowest)
    low = max(candidates) if candidates else None
    bound = low if low is not None else -(10**9)
    out: dict = {}
    cache: dict = {}
    for i, ai in a.coeffs.items():
        for j, bj in b.coeffs.items():
            alpha_max = i + j - bound
            if i >= 0:
                alpha_max = min(alpha_max, i)
            for alpha in range(alpha_max + 1):
                c = gbinom(i, alpha)
                if not c:
                    continue
                d = _derivatives(bj, cache, j, alpha)
                term = mx.mscale(mx.mmul(ai, d), c)
                k = i + j - alpha
                out[k] = mx.madd(out[k], term) if k in out else term
    return PsiDO(out, a.size, low)


def compose(a: PsiDO, b: PsiDO, depth: int | None = None) -> PsiDO:
    """``a o b = sum_alpha C(i, alpha) a_i (D^alpha b_j) xi^(i+j-alpha)``, cut below ``-depth``."""
    depth = default_depth() if depth is None else depth
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return _compose(a, b, -depth)


def commutator(a: PsiDO, b: PsiDO, depth: int | None = None) -> PsiDO:
    return compose(a, b, depth) - compose(b, a, depth)


# -- residue, trace, splitting ------------------------------------------------

def residue(a: PsiDO):
    if not a.trusted(-1):
        raise TruncationError("residue needs the order -1 coefficient (depth >= 1)")
    return a.coeff(-1)


class TraceDensity:
    """A density considered modulo total x-derivatives."""

    __slots__ = ("density",)

    def __init__(self, density: Poly):
        self.density = density

    def __eq__(self, other):
        if isinstance(other, TraceDensity):
            other = other.density
        if isinstance(other, Poly) or isinstance(other, (int, Fraction)):
            return is_exact(self.density - other)
        return NotImplemented

    __hash__ = None

    def is_trivial(self) -> bool:
        return is_exact(self.density)

    def __repr__(self):
        return f"TraceDensity({self.density})"


def trace_density(a: PsiDO) -> TraceDensity:
    return TraceDensity(mx.trace(residue(a)))


def split_plus(a: PsiDO) -> PsiDO:
    low = a.low if a.low is not None and a.low > 0 else None
    return PsiDO({k: m for k, m in a.coeffs.items() if k >= 0}, a.size, low)


def split_minus(a: PsiDO) -> PsiDO:
    return PsiDO({k: m for k, m in a.coeffs.items() if k < 0}, a.size, a.low)


def r_map(a: PsiDO) -> PsiDO:
    return (split_plus(a) - split_minus(a)).scale(Fraction(1, 2))


def r_bracket(a: PsiDO, b: PsiDO, depth: int | None = None) -> PsiDO:
    return commutator(r_map(a), b, depth) + commutator(a, r_map(b), depth)


def adjoint(a: PsiDO, depth: int | None = None) -> PsiDO:
    """``(sum a_j xi^j)^* = sum (-xi)^j o a_j^T``, normal ordered."""
    depth = default_depth() if depth is None else depth
    out = PsiDO.zero(a.size)
    for j, m in a.coeffs.items():
        xi_j = PsiDO.xi(j, a.size).scale(-1 if j % 2 else 1)
        out = out + _compose(xi_j, PsiDO({0: mx.transpose(m)}, a.size), -depth)
    if a.low is not None:
        out = out.truncate(a.low)
    return out


def apply(a: PsiDO, vec: Sequence[Poly]) -> list:
    """Act with a differential operator on a column of polynomials."""
    if a.min_order is not None and a.min_order < 0:
        raise ValueError("only differential operators (orders >= 0) act on functions")
    if a.low is not None and a.low > 0:
        raise TruncationError("operator is not known down to order 0")
    if len(vec) != a.size:
        raise ValueError("vector length does not match operator size")
    out = [Poly() for _ in range(a.size)]
    for k, m in a.coeffs.items():
        dv = [total_derivative(v, 0, k) for v in vec]
        for i in range(a.size):
            for j in range(a.size):
                if m[i][j] and dv[j]:
                    out[i] = out[i] + m[i][j] * dv[j]
    return out


__all__ = [
    "PsiDO",
    "TraceDensity",
    "TruncationError",
    "adjoint",
    "apply",
    "commutator",
    "compose",
    "default_depth",
    "format_psido",
    "gbinom",
    "r_bracket",
    "r_map",
    "residue",
    "split_minus",
    "split_plus",
    "trace_density",
]
