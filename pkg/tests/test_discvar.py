import random

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from lagrax.discvar import (
    DegenerateDiscreteLagrangian,
    alpha_form,
    check_nondegenerate,
    decomposition_residual,
    differential,
    discrete_euler,
    discrete_hamilton_equations,
    discrete_momenta,
    p_n,
    shift,
)
from lagrax.discvar import u as site
from lagrax.jetalg import Poly, ShiftCoord, jet
from oracles import to_sympy
from strategies import random_discrete

u0, u1, u2, um = site(0, 0), site(0, 1), site(0, 2), site(0, -1)


@st.composite
def lattice_polys(draw, width=3, fields=1):
    atoms = [site(f, k) for f in range(fields) for k in range(width)]
    p = Poly()
    for _ in range(draw(st.integers(0, 4))):
        mono = Poly.const(draw(st.integers(-3, 3)))
        for _ in range(draw(st.integers(1, 3))):
            mono = mono * draw(st.sampled_from(atoms))
        p = p + mono
    return p


def test_shift_examples():
    # [TRIVIAL]
    assert shift(u0, 1) == u1
    assert shift(u0 * u1, 1) == u1 * u2


@given(lattice_polys(fields=2), st.integers(-3, 3))
def test_shift_is_invertible_homomorphism(p, s):
    # [DERIVED] shift is a ring automorphism
    assert shift(shift(p, s), -s) == p
    assert shift(p * p, s) == shift(p, s) * shift(p, s)


def test_discrete_euler_examples():
    # [DERIVED] hand computation
    L = (u1 - u0) ** 2 / 2
    assert discrete_euler(L) == (u0 - um) - (u1 - u0)
    assert discrete_euler(u0) == Poly.const(1)
    assert discrete_euler(u1 - u0) == Poly()


def _sym_grad(L: Poly, width: int):
    # sum_k dL_{n-k}/du_n with explicit symbols for each site
    sites = {k: sp.Symbol(f"u0_{k}") for k in range(-width, width + 1)}
    expr = to_sympy(L)
    total = 0
    for k in range(width + 1):
        moved = expr.subs({sites[j]: sp.Symbol(f"tmp_{j - k}") for j in range(0, width + 1)}, simultaneous=True)
        moved = moved.subs({sp.Symbol(f"tmp_{j}"): sites[j] for j in range(-width, width + 1)})
        total += sp.diff(moved, sites[0])
    return sp.expand(total)


@given(lattice_polys())
def test_discrete_euler_matches_independent_sum(L):
    # [DERIVED] sympy sum over shifted partials
    assert sp.expand(to_sympy(discrete_euler(L)) - _sym_grad(L, 2)) == 0


def test_alpha_examples():
    # [DERIVED] hand computation
    assert not alpha_form(u0)
    a = alpha_form((u1 - u0) ** 2 / 2)
    assert dict(a.items()) == {ShiftCoord(0, 0): u0 - um}
    assert dict(alpha_form(u0 * u1).items()) == {ShiftCoord(0, 0): um}


@given(lattice_polys(width=4, fields=2))
def test_decomposition_residual_vanishes(L):
    # [PAPER] discrete decomposition
    assert not decomposition_residual(L)


def test_differential_lists_partials():
    # [TRIVIAL]
    d = differential(u0**2 * u1)
    assert d[ShiftCoord(0, 0)] == 2 * u0 * u1
    assert d[ShiftCoord(0, 1)] == u0**2


def test_momenta():
    # [DERIVED] coefficients of alpha by hand
    L = (u1 - u0) ** 2 / 2
    # the du_n coefficient of the alpha form
    assert discrete_momenta(L) == ((u0 - um,),)
    assert discrete_momenta(L + u0**2 / 2) == ((u0 - um,),)
    assert discrete_momenta(u0) == ((Poly(),),)


def test_momenta_second_order():
    # [DERIVED] coefficients of alpha by hand
    L = u0 * u2 + u1**3
    P = discrete_momenta(L, check=True)
    assert len(P) == 2
    a = alpha_form(L)
    assert P[0][0] == a[ShiftCoord(0, 0)] and P[1][0] == a[ShiftCoord(0, 1)]


def test_nondegeneracy():
    # [DERIVED] mixed Hessian by hand
    check_nondegenerate((u1 - u0) ** 2)
    with pytest.raises(DegenerateDiscreteLagrangian):
        check_nondegenerate(u0**2)
    with pytest.raises(DegenerateDiscreteLagrangian):
        check_nondegenerate(u0**2 + u1**2)
    with pytest.raises(DegenerateDiscreteLagrangian):
        discrete_momenta(u0 * u0, check=True)


def test_rejects_jets():
    # [TRIVIAL]
    with pytest.raises(TypeError):
        discrete_euler(jet(0) + u0)


def test_discrete_hamilton_equations():
    # [DERIVED] canonical equations by hand
    s = discrete_hamilton_equations(p_n(0, 0) ** 2 / 2)
    assert (s.du, s.dp) == ((p_n(0, 0),), (Poly(),))
    s = discrete_hamilton_equations(p_n(0, 0) * u0)
    assert (s.du, s.dp) == ((u0,), (-p_n(0, 0),))
    h = p_n(0, 0) ** 2 / 2 + p_n(0, 1) ** 2 / 2 + (u1 - u0) ** 2 / 2
    s = discrete_hamilton_equations(h)
    assert s.pairs == ((0, 0), (0, 1))
    assert s.du == (p_n(0, 0), p_n(0, 1))
    assert s.dp == (u1 - u0, u0 - u1)


@pytest.mark.parametrize("seed", range(10))
def test_random_nondegenerate_densities(seed):
    # [PAPER] discrete decomposition
    rng = random.Random(seed)
    N = rng.randint(0, 2)
    L = random_discrete(rng, N)
    assert not decomposition_residual(L)
    check_nondegenerate(L)
    assert len(discrete_momenta(L)) == N + 1
