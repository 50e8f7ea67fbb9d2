"""Exact coefficient field: rationals, optionally extended by the imaginary unit."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class GaussQ:
    """Gaussian rational ``re + im*i`` with exact parts.

    Instances with ``im == 0`` are never kept around: arithmetic results pass
    through :func:`coerce`, which collapses them to :class:`Fraction`.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        return coerce(GaussQ(self.re + p[0], self.im + p[1]))

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        return coerce(GaussQ(self.re - p[0], self.im - p[1]))

    def __rsub__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        return coerce(GaussQ(p[0] - self.re, p[1] - self.im))

    def __mul__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return coerce(GaussQ(a * c - b * d, a * d + b * c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussQ(c / den, -d / den)

    def __rtruediv__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        return GaussQ(*p) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** -n)
        out = Fraction(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        p = _parts(other)
        if p is None:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if self.re == 0:
            return f"{_frac_str(self.im)}i" if self.im not in (1, -1) else ("i" if self.im == 1 else "-i")
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        im = "i" if mag == 1 else f"{_frac_str(mag)}i"
        return f"({_frac_str(self.re)}{sign}{im})"


I = GaussQ(0, 1)


def _parts(other):
    if isinstance(other, GaussQ):
        return other.re, other.im
    if isinstance(other, Rational) and not isinstance(other, bool):
        return Fraction(other), Fraction(0)
    return None


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coerce(c):
    """Normalize a scalar to ``Fraction`` or a genuinely complex ``GaussQ``."""
    if isinstance(c, GaussQ):
        return c.re if c.im == 0 else c
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, Rational):
        return Fraction(c)
    raise TypeError(f"inexact or unsupported coefficient {c!r}; use int, Fraction or GaussQ")


def is_scalar(c) -> bool:
    return isinstance(c, (GaussQ, Rational)) and not isinstance(c, bool)


def coeff_str(c) -> str:
    return _frac_str(c) if isinstance(c, Fraction) else str(c)
