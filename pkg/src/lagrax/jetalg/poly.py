"""Exact sparse polynomials over jet, lattice-shift and chart coordinates.

A single :class:`Poly` type serves every module: differential polynomials
(variables are :class:`JetCoord` plus explicit :class:`IndepVar`), discrete
densities (:class:`ShiftCoord`), reduced phase-space functions
(:class:`ChartVar`) and spectral-parameter dependence (:class:`Param`).
Total derivatives treat shift, chart and parameter variables as constants.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

from .coeffs import GaussQ, coeff_str, coerce, is_scalar


class JetCoord(NamedTuple):
    """``D^orders u_field``; one derivative count per independent variable."""

    field: int
    orders: tuple


class IndepVar(NamedTuple):
    index: int


class ShiftCoord(NamedTuple):
    """``u_{field, n+shift}`` on the lattice."""

    field: int
    shift: int


class ChartVar(NamedTuple):
    """Canonical coordinate ``q`` or momentum ``p`` of a reduced chart."""

    kind: str
    field: int
    index: int


class Param(NamedTuple):
    name: str


@lru_cache(maxsize=None)
def var_key(v) -> tuple:
    t = type(v)
    if t is JetCoord:
        return (0, v.field, sum(v.orders), v.orders)
    if t is ShiftCoord:
        return (1, v.field, v.shift)
    if t is ChartVar:
        return (2, v.field, v.index, v.kind)
    if t is Param:
        return (3, v.name)
    if t is IndepVar:
        return (4, v.index)
    raise TypeError(f"not a polynomial variable: {v!r}")


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))


def _mono_sort_key(mono: tuple) -> tuple:
    return (sum(e for _, e in mono), tuple((var_key(v), e) for v, e in mono))


class Poly:
    """Immutable polynomial with exact (Gaussian) rational coefficients.

    Stored as a mapping from monomials to nonzero coefficients; a monomial
    is a tuple of ``(variable, exponent)`` pairs sorted by :func:`var_key`.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = coerce(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        c = coerce(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, v, power: int = 1) -> "Poly":
        var_key(v)
        if power == 0:
            return cls.const(1)
        return cls._raw({((v, power),): Fraction(1)})

    # -- basic protocol -------------------------------------------------
    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        if is_scalar(other):
            return self == Poly.const(other)
        return NotImplemented

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _lift(other):
        if isinstance(other, Poly):
            return other
        if is_scalar(other):
            return Poly.const(other)
        return None

    def __add__(self, other):
        o = Poly._lift(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        out = dict(self._terms)
        for m, c in o._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = coerce(s)
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = Poly._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = Poly._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if is_scalar(other):
            c = coerce(other)
            if not c:
                return Poly()
            return Poly._raw({m: coerce(v * c) for m, v in self._terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw({m: coerce(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not is_scalar(other):
            return NotImplemented
        return self * (Fraction(1) / coerce(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- inspection --------------------------------------------------------
    def terms(self) -> list:
        """``(monomial, coefficient)`` pairs in graded-lex order."""
        return sorted(self._terms.items(), key=lambda mc: _mono_sort_key(mc[0]))

    def variables(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def jets(self) -> set:
        return {v for v in self.variables() if type(v) is JetCoord}

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self):
        return self._terms.get((), Fraction(0))

    def coefficients(self) -> list:
        return [c for _, c in self.terms()]

    def diff(self, v) -> "Poly":
        """Partial derivative with respect to the variable ``v``."""
        out: dict = {}
        for mono, c in self._terms.items():
            for i, (w, e) in enumerate(mono):
                if w == v:
                    rest = mono[:i] + (((w, e - 1),) if e > 1 else ()) + mono[i + 1:]
                    out[rest] = out.get(rest, 0) + c * e
                    break
        return Poly(out)

    def collect(self, v) -> dict:
        """Split as ``sum_k coeff_k * v**k``; returns ``{k: coeff_k}``."""
        out: dict = {}
        for mono, c in self._terms.items():
            k = 0
            rest = mono
            for i, (w, e) in enumerate(mono):
                if w == v:
                    k = e
                    rest = mono[:i] + mono[i + 1:]
                    break
            out.setdefault(k, {})[rest] = c
        return {k: Poly._raw(t) for k, t in out.items()}

    def coeff(self, v, power: int) -> "Poly":
        return self.collect(v).get(power, Poly())

    # -- transformation ----------------------------------------------------
    def subs(self, mapping: Mapping) -> "Poly":
        """Simultaneous substitution of variables by polynomials or scalars."""
        if not mapping:
            return self
        cache: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in cache:
                r = mapping[v]
                cache[key] = (r if isinstance(r, Poly) else Poly.const(r)) ** e
            return cache[key]

        out = Poly()
        acc: dict = {}
        for mono, c in self._terms.items():
            kept = []
            factor = None
            for v, e in mono:
                if v in mapping:
                    f = power(v, e)
                    factor = f if factor is None else factor * f
                else:
                    kept.append((v, e))
            if factor is None:
                acc[mono] = acc.get(mono, 0) + c
            else:
                out = out + Poly._raw({tuple(kept): c}) * factor
        return out + Poly(acc)

    def map_vars(self, fn: Callable) -> "Poly":
        """Rename variables with an injective map ``fn``."""
        out = {}
        for mono, c in self._terms.items():
            m = tuple(sorted(((fn(v), e) for v, e in mono), key=lambda ve: var_key(ve[0])))
            out[m] = c
        return Poly._raw(out)

    def map_coeffs(self, fn: Callable) -> "Poly":
        return Poly({m: fn(c) for m, c in self._terms.items()})

    def conjugate(self) -> "Poly":
        return self.map_coeffs(lambda c: c.conjugate() if isinstance(c, GaussQ) else c)

    # -- numerics ----------------------------------------------------------
    def evaluate(self, values: Mapping):
        total = 0
        for mono, c in self._terms.items():
            t = complex(c) if isinstance(c, GaussQ) else float(c)
            for v, e in mono:
                t *= values[v] ** e
            total += t
        return total

    def compile(self, order: Iterable) -> Callable:
        """Return ``f(x)`` evaluating the polynomial at the point ``x``.

        ``x`` is indexed by position in ``order``; coefficients must be real.
        """
        index = {v: i for i, v in enumerate(order)}
        compiled = []
        for mono, c in self._terms.items():
            if isinstance(c, GaussQ):
                raise ValueError("complex coefficients cannot be compiled to a real vector field")
            compiled.append((float(c), tuple((index[v], e) for v, e in mono)))

        def f(x):
            total = 0.0
            for c, factors in compiled:
                t = c
                for i, e in factors:
                    t *= x[i] ** e
                total += t
            return total

        return f

    # -- display -----------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)})"


class Naming:
    """Display names for fields and independent variables."""

    def __init__(self, fields: Iterable[str] = (), variables: Iterable[str] = ("x", "y", "t")):
        self.fields = tuple(fields)
        self.variables = tuple(variables)

    def field(self, i: int) -> str:
        if i < len(self.fields):
            return self.fields[i]
        return "u" if i == 0 and not self.fields else f"u{i}"

    def variable(self, i: int) -> str:
        return self.variables[i] if i < len(self.variables) else f"x{i}"

    def var(self, v) -> str:
        t = type(v)
        if t is JetCoord:
            name = self.field(v.field)
            suffix = "".join(self.variable(i) * k for i, k in enumerate(v.orders))
            return f"{name}_{suffix}" if suffix else name
        if t is IndepVar:
            return self.variable(v.index)
        if t is ShiftCoord:
            name = self.field(v.field)
            if v.shift == 0:
                return f"{name}[n]"
            return f"{name}[n{v.shift:+d}]"
        if t is ChartVar:
            return f"{v.kind}{v.field}_{v.index}"
        if t is Param:
            return v.name
        raise TypeError(v)


DEFAULT_NAMING = Naming()


def format_poly(p: Poly, naming: Naming = DEFAULT_NAMING) -> str:
    if not p:
        return "0"
    pieces = []
    for mono, c in p.terms():
        factors = [naming.var(v) + (f"^{e}" if e > 1 else "") for v, e in mono]
        body = "*".join(factors)
        if not body:
            pieces.append(coeff_str(c))
        elif c == 1:
            pieces.append(body)
        elif c == -1:
            pieces.append("-" + body)
        else:
            pieces.append(f"{coeff_str(c)}*{body}")
    out = " + ".join(pieces)
    return out.replace("+ -", "- ")


# -- constructors ----------------------------------------------------------

def jet_coord(field: int, orders=()) -> JetCoord:
    """Canonical :class:`JetCoord`; trailing zero orders are dropped."""
    orders = tuple(int(o) for o in orders)
    if any(o < 0 for o in orders) or field < 0:
        raise ValueError("jet orders and field index must be nonnegative")
    while orders and orders[-1] == 0:
        orders = orders[:-1]
    return JetCoord(field, orders)


def jet(field: int, *orders: int) -> Poly:
    """Jet coordinate ``D^orders u_field``; ``jet(0, 2)`` is ``u_xx``."""
    return Poly.var(jet_coord(field, orders))


def indep(index: int = 0) -> Poly:
    return Poly.var(IndepVar(index))


def shifted(field: int, shift: int = 0) -> Poly:
    return Poly.var(ShiftCoord(field, shift))


def chart_q(index: int = 0, field: int = 0) -> Poly:
    return Poly.var(ChartVar("q", field, index))


def chart_p(index: int = 0, field: int = 0) -> Poly:
    return Poly.var(ChartVar("p", field, index))


def param(name: str) -> Poly:
    return Poly.var(Param(name))


def const(c) -> Poly:
    return Poly.const(c)
