"""Independent sympy translations used as test oracles."""

import sympy as sp

from lagrax.jetalg import ChartVar, GaussQ, IndepVar, JetCoord, Param, Poly, ShiftCoord

X = sp.Symbol("x")
_FUNCS = {}


def field_fn(i):
    if i not in _FUNCS:
        _FUNCS[i] = sp.Function(f"u{i}")(X)
    return _FUNCS[i]


def to_sympy(p: Poly):
    out = sp.Integer(0)
    for mono, c in p.terms():
        term = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator) if isinstance(c, GaussQ) else sp.Rational(c.numerator, c.denominator)
        for v, e in mono:
            if type(v) is JetCoord:
                k = v.orders[0] if v.orders else 0
                base = field_fn(v.field).diff(X, k) if k else field_fn(v.field)
            elif type(v) is IndepVar:
                base = X
            elif type(v) is ShiftCoord:
                base = sp.Symbol(f"u{v.field}_{v.shift}")
            elif type(v) is ChartVar:
                base = sp.Symbol(f"{v.kind}{v.field}_{v.index}")
            elif type(v) is Param:
                base = sp.Symbol(v.name)
            term = term * base**e
        out = out + term
    return sp.expand(out)


def sym_euler(expr, field=0, max_order=8):
    """Euler operator sum_k (-d/dx)^k dL/du^(k) computed with sympy derivatives."""
    f = field_fn(field)
    out = sp.diff(expr, f)
    for k in range(1, max_order + 1):
        out += (-1) ** k * sp.diff(sp.diff(expr, f.diff(X, k)), X, k)
    return sp.expand(out)
