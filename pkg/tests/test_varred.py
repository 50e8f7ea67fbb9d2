import math
import random
from fractions import Fraction

import numpy as np
import pytest

from lagrax.jetalg import NotExactError, Poly, euler, jet, pairing, param, total_derivative
from lagrax.varred import (
    CanonicalChart,
    ChartUnavailable,
    DegenerateLagrangianError,
    LagrangianDensity,
    NonFiniteStateError,
    assemble_lagrangian,
    hamilton_equations,
    hamiltonian_x,
    integrate_reduced,
    momenta,
    p_var,
    poisson_bracket,
    q_var,
    recurrence_residuals,
    symmetry_hamiltonian,
)
from strategies import random_lagrangian

u, u1, u2, u3 = jet(0), jet(0, 1), jet(0, 2), jet(0, 3)
q, p = q_var(0, 0), p_var(0, 0)


# -- Lagrangian densities -------------------------------------------------------

def test_order_and_hessian():
    # [DERIVED] hand computation
    L = LagrangianDensity(u2**2 / 2 + u * u1)
    assert L.order == 2 and L.N == 1
    assert L.hessian == ((Poly.const(1),),)


def test_degenerate_density_is_rejected():
    # [TRIVIAL]
    with pytest.raises(DegenerateLagrangianError, match="Hessian"):
        LagrangianDensity(u * u1)
    with pytest.raises(DegenerateLagrangianError):
        # second field never reaches the top order
        LagrangianDensity(u1**2 + jet(1, 0) * u1, 2)


def test_two_field_hessian_determinant():
    # [DERIVED] hand computation
    v1 = jet(1, 1)
    LagrangianDensity(u1 * v1)  # off-diagonal Hessian, determinant -1
    with pytest.raises(DegenerateLagrangianError):
        LagrangianDensity((u1 + v1) ** 2)


# -- momenta ----------------------------------------------------------------------

def test_momenta_examples():
    # [PAPER] momentum recursion worked out by hand
    assert momenta(LagrangianDensity(u1**2 / 2)).p == ((u1,),)
    P = momenta(LagrangianDensity(u2**2 / 2))
    assert P[1] == (u2,)
    assert P[0] == (-u3,)
    assert momenta(LagrangianDensity(u1**2 / 2 - u**3)).p == ((u1,),)


@pytest.mark.parametrize("seed", range(12))
def test_recurrence_holds_for_random_densities(seed):
    # [PAPER] momentum recurrence
    rng = random.Random(seed)
    m, N = rng.randint(1, 2), rng.randint(0, 2)
    L = LagrangianDensity(random_lagrangian(rng, m, N), m)
    P = momenta(L)
    assert all(not r for row in recurrence_residuals(L, P) for r in row)


# -- Hamiltonians -----------------------------------------------------------------

def test_hamiltonian_examples():
    # [PAPER] stationary KdV Hamiltonian
    H = hamiltonian_x(LagrangianDensity(u1**2 / 2 - u**3))
    assert H.chart_form == p**2 / 2 + q**3
    assert hamiltonian_x(LagrangianDensity(u1**2 / 2)).chart_form == p**2 / 2


def test_chart_unavailable_for_non_affine_momentum():
    # [TRIVIAL]
    H = hamiltonian_x(LagrangianDensity(u1**4 / 4))
    assert H.chart_form is None
    assert "affine" in H.unavailable_reason
    assert H.jet_form == Fraction(3, 4) * u1**4
    with pytest.raises(ChartUnavailable):
        CanonicalChart(LagrangianDensity(u1**4 / 4))


@pytest.mark.parametrize("seed", range(12))
def test_energy_identity_for_random_densities(seed):
    # [PAPER] energy identity
    rng = random.Random(100 + seed)
    m, N = rng.randint(1, 2), rng.randint(0, 2)
    L = LagrangianDensity(random_lagrangian(rng, m, N), m)
    h = hamiltonian_x(L).jet_form
    E = [euler(L.density, i) for i in range(m)]
    assert total_derivative(h) + pairing(E, [jet(i, 1) for i in range(m)]) == Poly()


def test_higher_order_chart():
    # [DERIVED] Ostrogradsky chart by hand
    # N = 1: q_0 = u, q_1 = u', p_1 = u'', p_0 = -u''' + ...
    L = LagrangianDensity(u2**2 / 2 - u**2 * u1**2 / 2)
    H = hamiltonian_x(L)
    chart = CanonicalChart(L)
    assert chart.dimension == 4
    assert H.chart_form.jets() == set()
    # the jet form and chart form agree after substituting u'' = p_1
    assert chart.to_chart(H.jet_form) == H.chart_form


def test_translation_symmetry_reproduces_h_x():
    # [DERIVED] translation is the x-flow
    L = LagrangianDensity(u1**2 / 2 - u**3)
    assert symmetry_hamiltonian(L, [u1]) == hamiltonian_x(L).jet_form


def test_symmetry_hamiltonian_errors():
    # [TRIVIAL]
    L = LagrangianDensity(u1**2 / 2)
    with pytest.raises(NotExactError):
        symmetry_hamiltonian(L, [u2])
    assert symmetry_hamiltonian(L, [Poly()]) == Poly()
    with pytest.raises(ValueError):
        symmetry_hamiltonian(L, [u1, u1])


def test_kdv_symmetry_hamiltonian_commutes_on_chart():
    # [PAPER] commuting flows
    c0, c1 = param("c0"), param("c1")
    L = LagrangianDensity(u1**2 / 2 - u**3 + c1 * u**2 + c0 * u)
    K = u3 / 4 + Fraction(3, 2) * u * u1
    ht = symmetry_hamiltonian(L, [K])
    assert total_derivative(ht) == -euler(L.density) * K
    chart = CanonicalChart(L)
    H = hamiltonian_x(L).chart_form
    assert H == p**2 / 2 + q**3 - c1 * q**2 - c0 * q
    assert poisson_bracket(chart.to_chart(ht, onshell=True), H) == Poly()


def test_onshell_reduction_uses_euler_equation():
    # [DERIVED] substitution by hand
    L = LagrangianDensity(u1**2 / 2 - u**3)
    chart = CanonicalChart(L)
    # on shell u'' = -3u^2
    assert chart.to_chart(u2, onshell=True) == -3 * q**2
    with pytest.raises(ChartUnavailable):
        chart.to_chart(u2)


# -- assembling ------------------------------------------------------------------

def test_assemble_lagrangian():
    # [DERIVED] hand computation
    g0, g1, g2 = u, u**2, u**3 - u1**2 / 2
    c0, c1 = param("c0"), param("c1")
    L = assemble_lagrangian([g0, g1, g2], [c0, c1], 1)
    assert L.density == -g2 + c1 * g1 + c0 * g0
    assert assemble_lagrangian([u1**2 / 2, -(u1**2)], [0], 0).density == u1**2
    with pytest.raises(ValueError):
        assemble_lagrangian([g0, g1, g2], [c0], 1)
    with pytest.raises(ValueError):
        assemble_lagrangian([g2, g1, g0], [0, 0], 1)


# -- Hamilton equations and brackets -------------------------------------------------

def test_hamilton_equation_examples():
    # [DERIVED] canonical equations by hand
    s = hamilton_equations(p**2 / 2 + q**3)
    assert (s.dq, s.dp) == ((p,), (-3 * q**2,))
    s = hamilton_equations(p * q)
    assert (s.dq, s.dp) == ((q,), (-p,))


def test_liouville_divergence_vanishes():
    # [DERIVED] symplectic flows are divergence free
    h = p**3 * q + q_var(0, 1) * p_var(0, 1) ** 2 + q**4 * p_var(0, 1)
    assert hamilton_equations(h).divergence() == Poly()


def test_poisson_bracket_examples():
    # [DERIVED] hand computation
    assert poisson_bracket(q, p) == Poly.const(1)
    h = p**2 / 2 + q**3
    assert poisson_bracket(h, h) == Poly()
    assert poisson_bracket(h, p) == 3 * q**2
    qs = [q_var(i, j) for i in range(2) for j in range(2)]
    ps = [p_var(i, j) for i in range(2) for j in range(2)]
    for a, qa in enumerate(qs):
        for b, pb in enumerate(ps):
            assert poisson_bracket(qa, pb, [(i, j) for i in range(2) for j in range(2)]) == Poly.const(int(a == b))


# -- integration --------------------------------------------------------------------

def test_harmonic_oscillator_conserves_energy():
    # [DERIVED] closed form solution
    traj = integrate_reduced(hamilton_equations(p**2 / 2 + q**2 / 2), [1.0, 0.0], 1e-3, 1000)
    assert abs(traj.energy[-1] - 0.5) <= 1e-9
    assert np.allclose(traj.states[-1], [math.cos(1.0), -math.sin(1.0)], atol=1e-10)


def test_zero_hamiltonian_is_constant():
    # [TRIVIAL]
    sysm = hamilton_equations(Poly(), [(0, 0)])
    traj = integrate_reduced(sysm, [0.3, -0.2], 0.1, 10)
    assert np.all(traj.states == traj.states[0])


def test_cubic_drift_and_convergence():
    # [DERIVED] RK4 is fourth order
    sysm = hamilton_equations(p**2 / 2 + q**3)
    coarse = integrate_reduced(sysm, [0.4, 0.1], 1e-3, 1000)
    fine = integrate_reduced(sysm, [0.4, 0.1], 5e-4, 2000)
    assert coarse.drift <= 1e-8
    assert np.allclose(coarse.states[-1], fine.states[-1], atol=1e-10)


def test_parameters_must_be_bound():
    # [TRIVIAL]
    sysm = hamilton_equations(p**2 / 2 + param("k") * q**2)
    traj = integrate_reduced(sysm, [1.0, 0.0], 1e-2, 5, {"k": Fraction(1, 2)})
    assert traj.states.shape == (6, 2)
    with pytest.raises(Exception):
        integrate_reduced(sysm, [1.0, 0.0], 1e-2, 5)


def test_blow_up_reports_last_valid_step():
    # [TRIVIAL]
    sysm = hamilton_equations(p**2 / 2 - q**4)
    with pytest.raises(NonFiniteStateError) as exc:
        integrate_reduced(sysm, [10.0, 100.0], 0.5, 50)
    assert exc.value.trajectory.states.shape[0] == exc.value.last_valid + 1
    assert np.all(np.isfinite(exc.value.trajectory.states))


def test_bad_integration_arguments():
    # [TRIVIAL]
    sysm = hamilton_equations(p**2 / 2)
    with pytest.raises(ValueError):
        integrate_reduced(sysm, [1.0], 0.1, 3)
    with pytest.raises(ValueError):
        integrate_reduced(sysm, [1.0, 0.0], 0.0, 3)
