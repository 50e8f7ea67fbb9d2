"""Small dense matrices of polynomials, stored as tuples of tuples."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coeffs import coerce
from .poly import Poly

Matrix = tuple


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    out = tuple(tuple(e if isinstance(e, Poly) else Poly.const(e) for e in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def zeros(n: int, m: int | None = None) -> Matrix:
    return tuple(tuple(Poly() for _ in range(n if m is None else m)) for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(tuple(Poly.const(1 if i == j else 0) for j in range(n)) for i in range(n))


def madd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mneg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in r) for r in a)


def msub(a: Matrix, b: Matrix) -> Matrix:
    return madd(a, mneg(b))


def mscale(a: Matrix, c) -> Matrix:
    return tuple(tuple(x * c for x in r) for r in a)


def mmul(a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise ValueError("shape mismatch in matrix product")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        r = []
        for j in range(cols):
            acc = Poly()
            for k, x in enumerate(row):
                if x:
                    y = b[k][j]
                    if y:
                        acc = acc + x * y
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return msub(mmul(a, b), mmul(b, a))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else a


def trace(a: Matrix) -> Poly:
    out = Poly()
    for i, r in enumerate(a):
        out = out + r[i]
    return out


def mmap(fn, a: Matrix) -> Matrix:
    return tuple(tuple(fn(x) for x in r) for r in a)


def is_zero(a: Matrix) -> bool:
    return all(not x for r in a for x in r)


def det(a: Matrix) -> Poly:
    """Determinant by cofactor expansion (intended for small sizes)."""
    n = len(a)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return a[0][0]
    out = Poly()
    for j in range(n):
        if not a[0][j]:
            continue
        minor = tuple(tuple(r[k] for k in range(n) if k != j) for r in a[1:])
        term = a[0][j] * det(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out


def scalar_inverse(a: Sequence[Sequence]) -> list:
    """Inverse of a constant matrix by Gauss-Jordan elimination.

    Entries may be scalars or constant polynomials; raises ``ZeroDivisionError``
    for singular input.
    """
    n = len(a)
    m = [
        [coerce(x.constant_term() if isinstance(x, Poly) else x) for x in row]
        + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(a)
    ]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [coerce(x * inv) for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [coerce(x - f * y) for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]
