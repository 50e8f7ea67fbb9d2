import random
from fractions import Fraction

import pytest

from lagrax.jetalg import Poly, jet, total_derivative
from lagrax.jetalg import matrix as mx
from lagrax.psido import (
    Gradient,
    PsiDO,
    RootError,
    SourceTriple,
    TraceDensity,
    TruncationError,
    adjoint,
    apply,
    backlund_chain,
    backlund_extend,
    commutator,
    compose,
    lax_rhs,
    multiplication_part,
    negate_flow,
    power,
    r_bracket,
    r_map,
    rank_one,
    residue,
    root,
    source_flow,
    split_minus,
    split_plus,
    theta_apply,
    trace_density,
)
from lagrax.zerocurv import ds_rules_y
from strategies import random_jet_poly, random_psido

u, u1, u2, u3 = jet(0), jet(0, 1), jet(0, 2), jet(0, 3)
v, v1 = jet(1), jet(1, 1)
Z = Poly()
xi = PsiDO.xi


def scalar(coeffs, low=None):
    return PsiDO(coeffs, 1, low)


# -- composition ---------------------------------------------------------------

def test_compose_examples():
    # [DERIVED] Leibniz composition rule by hand
    assert compose(xi(1), PsiDO.mult(u)) == scalar({1: u, 0: u1})
    inv = compose(xi(-1), PsiDO.mult(u), 3)
    assert inv == scalar({-1: u, -2: -u1, -3: u2})
    assert inv.low == -3
    assert compose(scalar({1: u}), scalar({1: v})) == scalar({2: u * v, 1: u * v1})


def test_inverse_expansion_composes_back():
    # [DERIVED] xi o xi^-1 = 1
    inv = compose(xi(-1), PsiDO.mult(u), 5)
    back = compose(xi(1), inv, 5)
    assert back.low == -4
    assert back == PsiDO.mult(u)


@pytest.mark.parametrize("seed", range(8))
def test_differential_composition_matches_sequential_action(seed):
    # [DERIVED] action on a test function
    rng = random.Random(seed)
    a = random_psido(rng, 2, 2, 0)
    b = random_psido(rng, 2, 2, 0)
    w = [random_jet_poly(rng, 2, 1, 2), random_jet_poly(rng, 2, 1, 2)]
    ab = compose(a, b)
    assert ab.is_exact
    assert apply(ab, w) == apply(a, apply(b, w))


@pytest.mark.parametrize("seed", range(6))
def test_associativity_on_trusted_orders(seed):
    # [DERIVED] associativity
    rng = random.Random(seed)
    a, b, c = (random_psido(rng) for _ in range(3))
    lhs = compose(compose(a, b, 4), c, 4)
    rhs = compose(a, compose(b, c, 4), 4)
    assert lhs == rhs
    assert lhs.low is not None


def test_truncated_orders_are_not_readable():
    # [TRIVIAL]
    inv = compose(xi(-1), PsiDO.mult(u), 2)
    assert inv.trusted(-2) and not inv.trusted(-3)
    with pytest.raises(TruncationError):
        inv.coeff(-3)


def test_default_depth_from_environment(monkeypatch):
    # [TRIVIAL]
    monkeypatch.setenv("LAGRAX_DEPTH", "2")
    assert compose(xi(-1), PsiDO.mult(u)).low == -2
    monkeypatch.setenv("LAGRAX_DEPTH", "oops")
    with pytest.raises(ValueError):
        compose(xi(-1), PsiDO.mult(u))


def test_size_mismatch():
    # [TRIVIAL]
    with pytest.raises(ValueError):
        compose(PsiDO.identity(1), PsiDO.identity(2))


# -- residue and trace ---------------------------------------------------------

def test_residue_examples():
    # [DERIVED] hand computation
    assert residue(xi(-1)) == ((Poly.const(1),),)
    assert trace_density(xi(-1)) == Poly.const(1)
    assert residue(scalar({2: 1, 0: u})) == ((Z,),)
    assert residue(compose(xi(-1), PsiDO.mult(u), 3)) == ((u,),)


def test_trace_density_equality_modulo_exact_terms():
    # [DERIVED] exact terms
    assert TraceDensity(u**2 + total_derivative(u * u1)) == TraceDensity(u**2)
    assert TraceDensity(u**2) != TraceDensity(u**3)


@pytest.mark.parametrize("seed", range(8))
def test_trace_of_commutator_is_exact(seed):
    # [PAPER] trace ad-invariance
    rng = random.Random(seed)
    a, b = random_psido(rng), random_psido(rng)
    assert trace_density(commutator(a, b, 4)).is_trivial()


def test_residue_needs_depth():
    # [TRIVIAL]
    with pytest.raises(TruncationError):
        residue(compose(xi(-2), PsiDO.mult(u), 0))


# -- splitting -----------------------------------------------------------------

def test_split_examples():
    # [TRIVIAL]
    a = scalar({1: 1, -1: u})
    assert split_plus(a) == xi(1)
    assert split_minus(a) == scalar({-1: u})
    assert r_map(xi(1)) == xi(1).scale(Fraction(1, 2))
    assert r_map(scalar({-1: u})) == scalar({-1: -u / 2})


def test_r_bracket_against_definition():
    # [DERIVED] bracket written out from projections
    a, b = xi(1), scalar({-1: u})
    expected = commutator(xi(1).scale(Fraction(1, 2)), b, 4) + commutator(a, b.scale(Fraction(-1, 2)), 4)
    assert r_bracket(a, b, 4) == expected


# -- adjoint ---------------------------------------------------------------------

def test_adjoint_examples():
    # [DERIVED] integration by parts
    assert adjoint(xi(1)) == xi(1).scale(-1)
    m = ((u, v), (Z, u1))
    assert adjoint(PsiDO.mult(m)) == PsiDO.mult(mx.transpose(m))
    assert adjoint(scalar({1: u})) == scalar({1: -u, 0: -u1})


@pytest.mark.parametrize("seed", range(6))
def test_adjoint_is_antihomomorphism(seed):
    # [DERIVED] (ab)* = b* a*
    rng = random.Random(seed)
    a, b = random_psido(rng), random_psido(rng)
    assert adjoint(adjoint(a, 6), 6) == a
    assert adjoint(compose(a, b, 6), 6) == compose(adjoint(b, 6), adjoint(a, 6), 6)


# -- powers and roots --------------------------------------------------------------

def test_root_of_schroedinger_operator():
    # [DERIVED] square root coefficients by hand
    L = scalar({2: 1, 0: u})
    r = root(L, 2, 3)
    assert r.coeff(1) == ((Poly.const(1),),)
    assert r.coeff(0) == ((Z,),)
    assert r.coeff(-1) == ((u / 2,),)
    assert r.coeff(-2) == ((-u1 / 4,),)
    assert power(r, 2, 3) == L


def test_power_zero_and_root_property():
    # [PAPER] root property
    L = scalar({2: 1, 0: u})
    assert power(L, 0) == PsiDO.identity()
    r = root(L, 2, 6)
    sq = power(r, 2, 6)
    assert sq.low is not None and sq.low <= -6
    assert sq == L


def test_cube_root_of_third_order_operator():
    # [DERIVED] root property
    L = scalar({3: 1, 1: u, 0: v})
    r = root(L, 3, 4)
    assert power(r, 3, 4) == L


def test_root_errors():
    # [TRIVIAL]
    with pytest.raises(RootError):
        root(scalar({3: 1, 0: u}), 2)
    with pytest.raises(RootError):
        root(scalar({2: 2, 0: u}), 2)


def test_lax_examples():
    # [PAPER] KdV flow
    L = scalar({2: 1, 0: u})
    assert lax_rhs(L, L) == PsiDO.zero()
    assert lax_rhs(L, PsiDO.zero()) == PsiDO.zero()
    flow = lax_rhs(L, power(root(L, 2, 4), 3, 4), 4)
    assert multiplication_part(flow) == ((u3 / 4 + Fraction(3, 2) * u * u1,),)


def test_lax_rejects_unresolved_generator():
    # [TRIVIAL]
    L = scalar({2: 1, 0: u})
    g = power(root(L, 2, 0), 3, 0)
    assert not g.trusted(0)
    with pytest.raises(TruncationError):
        lax_rhs(L, g)


# -- source extension -------------------------------------------------------------

f1, f2, g1, g2 = jet(2), jet(3), jet(4), jet(5)


def test_rank_one_scalar():
    # [DERIVED] f xi^-1 f expanded by hand
    f = jet(1)
    r = rank_one([f], [f], 3)
    assert r.coeff(-1) == ((f**2,),)
    assert r.coeff(-2) == ((-f * jet(1, 1),),)
    assert rank_one([Z], [f]) == PsiDO.zero()
    lt = scalar({2: 1, 0: u})
    assert backlund_extend(lt, [Z], [f]) == lt


def test_extended_two_by_two_operator():
    # [DERIVED] entrywise composition
    lt = PsiDO({1: ((1, 0), (0, -1)), 0: ((Z, u), (v, Z))}, 2)
    lh = backlund_extend(lt, [f1, f2], [g1, g2], 3)
    assert lh.coeff(1) == ((Poly.const(1), Z), (Z, Poly.const(-1)))
    assert lh.coeff(0) == ((Z, u), (v, Z))
    assert lh.coeff(-1) == ((f1 * g1, f1 * g2), (f2 * g1, f2 * g2))
    for i, fi in enumerate([f1, f2]):
        for j, gj in enumerate([g1, g2]):
            entry = compose(compose(PsiDO.mult(fi), xi(-1), 3), PsiDO.mult(gj), 3)
            assert lh.coeff(-2)[i][j] == entry.coeff(-2)[0][0]


def _ds_triple(depth=4):
    lt = PsiDO({1: ((1, 0), (0, -1)), 0: ((Z, -u), (v, Z))}, 2)
    return SourceTriple.extend(lt, [f1, f2], [g1, g2], depth)


def test_first_source_flow_reproduces_y_rules():
    # [PAPER] Davey-Stewartson y-flow
    R = ds_rules_y().rules
    fl = source_flow(_ds_triple(), 1, 4)
    assert list(fl.df) == [R[(2, 1)], R[(3, 1)]]
    assert list(fl.dfstar) == [R[(4, 1)], R[(5, 1)]]
    # l carries -u in its (1,2) slot
    assert -fl.dl.coeff(0)[0][1] == R[(0, 1)]
    assert fl.dl.coeff(0)[1][0] == R[(1, 1)]


def test_source_free_flow_is_lax_flow():
    # [DERIVED] sources off
    L = scalar({2: 1, 0: u})
    t = SourceTriple.extend(L, [Z], [Z], 4)
    fl = source_flow(t, 1, 4)
    assert fl.dl == commutator(split_plus(L), L, 4)
    assert fl.df == (Z,) and fl.dfstar == (Z,)


def test_diagonal_constant_operator_flows_linearly():
    # [DERIVED] hand computation
    lt = PsiDO({1: ((1, 0), (0, -1))}, 2)
    fl = source_flow(SourceTriple.extend(lt, [f1, f2], [g1, g2], 4), 1, 4)
    assert fl.df == (jet(2, 1), -jet(3, 1))
    assert fl.dfstar == (jet(4, 1), -jet(5, 1))


@pytest.mark.parametrize("n", [1, 2])
def test_chain_rule_matches_direct_flow(n):
    # [PAPER] source extension
    chain, direct = backlund_chain(_ds_triple(), n, 4)
    assert chain == direct


def test_theta_casimir_gradient_gives_source_flow():
    # [PAPER] Casimir flow
    t = _ds_triple()
    fl = source_flow(t, 1, 4)
    v = negate_flow(theta_apply(Gradient(t.l_hat, (Z, Z), (Z, Z)), t, 4))
    assert (v.dl, v.df, v.dfstar) == (fl.dl, fl.df, fl.dfstar)


def test_theta_on_simple_gradients():
    # [DERIVED] hand computation
    t = _ds_triple()
    zero = negate_flow(theta_apply(Gradient(PsiDO.zero(2), (Z, Z), (Z, Z)), t, 4))
    assert zero.dl == PsiDO.zero(2) and zero.df == (Z, Z) and zero.dfstar == (Z, Z)
    g = (jet(0, 2), jet(1))
    out = negate_flow(theta_apply(Gradient(PsiDO.zero(2), (Z, Z), g), t, 4))
    assert out.df == tuple(-x for x in g)
