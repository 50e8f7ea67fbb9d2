"""Stationary KdV end to end: densities from the operator ``xi^2 + u``, the
reduced Lagrangian, its canonical chart and a numerical conservation run."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..jetalg import Poly, density_normal_form, jet, jet_coord, param
from ..psido import PsiDO, lax_rhs, multiplication_part, power, root, trace_density
from ..varred import (
    CanonicalChart,
    LagrangianDensity,
    Trajectory,
    assemble_lagrangian,
    hamilton_equations,
    hamiltonian_x,
    integrate_reduced,
    momenta,
    poisson_bracket,
    symmetry_hamiltonian,
)


def kdv_operator() -> PsiDO:
    return PsiDO({2: Poly.const(1), 0: jet(0)})


def kdv_densities(count: int = 3, depth: int = 6) -> list:
    """``gamma_k`` from the residue of ``l^((2k+1)/2)``, normalized so ``u^(k+1)`` has coefficient 1."""
    r = root(kdv_operator(), 2, depth + 2 * count)
    out = []
    for k in range(count):
        g = density_normal_form(trace_density(power(r, 2 * k + 1, depth + 2 * count)).density)
        ((_, lead),) = g.coeff(jet_coord(0), k + 1).terms()
        out.append(g / lead)
    return out


def kdv_flow(depth: int = 6) -> Poly:
    """``u_t`` from the Lax equation with generator ``l^(3/2)``."""
    l = kdv_operator()
    return multiplication_part(lax_rhs(l, power(root(l, 2, depth), 3, depth), depth))[0][0]


@dataclass
class KdVDemo:
    densities: list
    lagrangian: LagrangianDensity
    c: tuple
    momenta: tuple
    h_x: Poly
    h_x_chart: Poly
    flow: Poly
    h_t: Poly
    h_t_chart: Poly
    bracket: Poly
    trajectory: Trajectory

    @property
    def drift(self) -> float:
        return self.trajectory.drift


def kdv_demo(
    c0=0,
    c1=-8,
    state=(1.0, 0.0),
    step: float = 1e-3,
    steps: int = 1000,
    depth: int = 6,
) -> KdVDemo:
    """``L_1 = -gamma_2 + c_1 gamma_1 + c_0 gamma_0`` reduced and integrated.

    ``c0``/``c1`` stay symbolic in the exact outputs (as parameters ``c0``,
    ``c1``) and are bound to the given values for the numerical run.
    """
    gammas = kdv_densities(3, depth)
    L = assemble_lagrangian(gammas, [param("c0"), param("c1")], 1)
    P = momenta(L)
    H = hamiltonian_x(L, P)
    K = kdv_flow(depth)
    ht = symmetry_hamiltonian(L, [K])
    chart = CanonicalChart(L, P)
    ht_chart = chart.to_chart(ht, onshell=True)
    bracket = poisson_bracket(ht_chart, H.chart_form)
    system = hamilton_equations(H.chart_form)
    values = {"c0": Fraction(c0), "c1": Fraction(c1)}
    traj = integrate_reduced(system, list(state), step, steps, values)
    return KdVDemo(
        gammas,
        L,
        (Fraction(c0), Fraction(c1)),
        tuple(P.p),
        H.jet_form,
        H.chart_form,
        K,
        ht,
        ht_chart,
        bracket,
        traj,
    )


__all__ = ["KdVDemo", "kdv_demo", "kdv_densities", "kdv_flow", "kdv_operator"]
