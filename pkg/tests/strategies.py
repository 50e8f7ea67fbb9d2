"""Hypothesis strategies and seeded generators for random test objects."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from lagrax.discvar import u as site
from lagrax.jetalg import JetCoord, Poly, jet
from lagrax.psido import PsiDO

small_q = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


def _monomial(factors):
    out = Poly.const(1)
    for f in factors:
        out = out * f
    return out


@st.composite
def jet_polys(draw, fields=1, max_order=3, max_degree=3, max_terms=4):
    """Random differential polynomials in one independent variable."""
    atoms = [jet(f, k) for f in range(fields) for k in range(max_order + 1)]
    p = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(0, max_degree))
        mono = _monomial([draw(st.sampled_from(atoms)) for _ in range(deg)])
        p = p + mono * draw(small_q)
    return p


def random_jet_poly(rng: random.Random, fields=1, max_order=3, max_degree=3, terms=4) -> Poly:
    atoms = [jet(f, k) for f in range(fields) for k in range(max_order + 1)]
    p = Poly()
    for _ in range(terms):
        deg = rng.randint(1, max_degree)
        mono = _monomial([rng.choice(atoms) for _ in range(deg)])
        p = p + mono * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return p


def random_lagrangian(rng: random.Random, fields: int, N: int, max_degree=3) -> Poly:
    """Random density of order N+1 made nondegenerate by a quadratic top-jet term.

    Random monomials quadratic in the top jets alone are dropped, so the
    Hessian is the identity plus nonconstant terms and cannot vanish.
    """
    raw = random_jet_poly(rng, fields, N + 1, max_degree, terms=rng.randint(1, 4))
    L = Poly()
    for mono, c in raw.terms():
        pure_top = all(type(v) is JetCoord and v.orders == (N + 1,) for v, _ in mono)
        if not (pure_top and sum(e for _, e in mono) == 2):
            L = L + Poly({mono: c})
    for f in range(fields):
        L = L + jet(f, N + 1) ** 2 / 2
    return L


def random_discrete(rng: random.Random, N: int, max_degree=3, fields=1) -> Poly:
    atoms = [site(f, k) for f in range(fields) for k in range(N + 2)]
    L = Poly()
    for _ in range(rng.randint(1, 4)):
        deg = rng.randint(1, max_degree)
        L = L + _monomial([rng.choice(atoms) for _ in range(deg)]) * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    # dominant coupling so random terms cannot cancel the mixed Hessian
    for f in range(fields):
        L = L + 17 * site(f, 0) * site(f, N + 1)
    return L


def random_psido(rng: random.Random, size=2, top=1, bottom=-2, fields=2, max_order=1) -> PsiDO:
    coeffs = {}
    for k in range(bottom, top + 1):
        coeffs[k] = tuple(
            tuple(random_jet_poly(rng, fields, max_order, 2, terms=rng.randint(0, 2)) for _ in range(size))
            for _ in range(size)
        )
    return PsiDO(coeffs, size)
