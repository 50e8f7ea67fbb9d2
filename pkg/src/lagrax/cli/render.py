"""Serialization of results: canonical JSON payloads, plain text and LaTeX."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from ..jetalg import ChartVar, GaussQ, IndepVar, JetCoord, Naming, Param, Poly, ShiftCoord, format_poly
from .grammar import Declarations, to_prefix


def naming_for(decl: Declarations) -> Naming:
    return Naming(decl.fields, decl.variables)


def expr_payload(p: Poly, decl: Declarations) -> dict:
    return {"prefix": to_prefix(p, decl), "text": format_poly(p, naming_for(decl))}


def matrix_payload(m, decl: Declarations) -> list:
    return [[to_prefix(e, decl) for e in row] for row in m]


def psido_payload(a, decl: Declarations) -> dict:
    return {
        "size": a.size,
        "trusted_down_to": a.low,
        "terms": [{"order": k, "matrix": matrix_payload(a.coeffs[k], decl)} for k in a.orders()],
    }


def input_digest(inputs: list) -> str:
    """sha256 over ``(label, bytes)`` pairs in the given order."""
    h = hashlib.sha256()
    for label, data in inputs:
        h.update(label.encode())
        h.update(b"\0")
        h.update(data if isinstance(data, bytes) else str(data).encode())
        h.update(b"\0")
    return h.hexdigest()


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- LaTeX ----------------------------------------------------------------------

def _latex_q(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return f"{sign}\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"


def _latex_coeff(c) -> str:
    if isinstance(c, GaussQ):
        if c.re == 0:
            return "i" if c.im == 1 else "-i" if c.im == -1 else f"{_latex_q(c.im)}i"
        im = _latex_q(abs(c.im))
        return f"\\left({_latex_q(c.re)} {'+' if c.im > 0 else '-'} {'' if abs(c.im) == 1 else im}i\\right)"
    return _latex_q(Fraction(c))


def latex_var(v, naming: Naming) -> str:
    t = type(v)
    if t is JetCoord:
        name = naming.field(v.field)
        if not v.orders:
            return name
        if len(naming.variables) == 1:
            return f"{name}^{{({v.orders[0]})}}"
        sub = "".join(naming.variable(i) * k for i, k in enumerate(v.orders))
        return f"{name}_{{{sub}}}"
    if t is IndepVar:
        return naming.variable(v.index)
    if t is ShiftCoord:
        idx = "n" if v.shift == 0 else f"n{v.shift:+d}"
        return f"{naming.field(v.field)}_{{{idx}}}"
    if t is ChartVar:
        if len(naming.fields) <= 1:
            return f"{v.kind}_{{{v.index}}}"
        return f"{v.kind}_{{{v.field},{v.index}}}"
    if t is Param:
        return "\\lambda" if v.name == "lam" else v.name
    raise TypeError(v)


def to_latex(p: Poly, naming: Naming) -> str:
    if not p:
        return "0"
    out = ""
    for mono, c in p.terms():
        factors = []
        for v, e in mono:
            s = latex_var(v, naming)
            if e > 1:
                s = f"\\left({s}\\right)^{{{e}}}" if "^" in s else f"{s}^{{{e}}}"
            factors.append(s)
        body = " ".join(factors)
        coeff = _latex_coeff(c)
        if not body:
            piece = coeff
        elif c == 1:
            piece = body
        elif c == -1:
            piece = "-" + body
        else:
            piece = f"{coeff} {body}"
        if out and not piece.startswith("-"):
            out += " + "
        elif out:
            out += " - "
            piece = piece[1:]
        out += piece
    return out


__all__ = [
    "dumps",
    "expr_payload",
    "input_digest",
    "latex_var",
    "matrix_payload",
    "naming_for",
    "psido_payload",
    "to_latex",
]
