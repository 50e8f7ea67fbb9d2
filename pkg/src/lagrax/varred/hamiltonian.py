"""Reduced Hamiltonian systems on a canonical chart and their numerical integration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..jetalg import ChartVar, Param, Poly


def chart_pairs(*polys: Poly) -> list:
    """Sorted ``(field, index)`` pairs of all chart variables appearing."""
    seen = {(v.field, v.index) for p in polys for v in p.variables() if type(v) is ChartVar}
    return sorted(seen)


@dataclass(frozen=True)
class ReducedSystem:
    """``dq/ds = dh/dp``, ``dp/ds = -dh/dq`` over the listed canonical pairs.

    ``dq[k]`` and ``dp[k]`` belong to ``pairs[k]``.
    """

    hamiltonian: Poly
    pairs: tuple
    dq: tuple
    dp: tuple

    @property
    def coordinates(self) -> list:
        """State ordering used by the integrator: all q's, then all p's."""
        return [ChartVar("q", f, j) for f, j in self.pairs] + [ChartVar("p", f, j) for f, j in self.pairs]

    @property
    def rhs(self) -> list:
        return list(self.dq) + list(self.dp)

    def divergence(self) -> Poly:
        out = Poly()
        for (f, j), a, b in zip(self.pairs, self.dq, self.dp):
            out = out + a.diff(ChartVar("q", f, j)) + b.diff(ChartVar("p", f, j))
        return out


def hamilton_equations(h: Poly, pairs: Sequence | None = None) -> ReducedSystem:
    pairs = tuple(sorted(pairs)) if pairs is not None else tuple(chart_pairs(h))
    dq = tuple(h.diff(ChartVar("p", f, j)) for f, j in pairs)
    dp = tuple(-h.diff(ChartVar("q", f, j)) for f, j in pairs)
    return ReducedSystem(h, pairs, dq, dp)


def poisson_bracket(h1: Poly, h2: Poly, pairs: Sequence | None = None) -> Poly:
    """``sum_j dh1/dq_j dh2/dp_j - dh1/dp_j dh2/dq_j``."""
    pairs = pairs if pairs is not None else chart_pairs(h1, h2)
    out = Poly()
    for f, j in pairs:
        q, p = ChartVar("q", f, j), ChartVar("p", f, j)
        out = out + h1.diff(q) * h2.diff(p) - h1.diff(p) * h2.diff(q)
    return out


class NonFiniteStateError(FloatingPointError):
    def __init__(self, last_valid: int, trajectory: "Trajectory"):
        self.last_valid = last_valid
        self.trajectory = trajectory
        super().__init__(f"non-finite state after step {last_valid}")


@dataclass
class Trajectory:
    s: np.ndarray
    states: np.ndarray
    energy: np.ndarray
    coordinates: list = field(default_factory=list)

    @property
    def drift(self) -> float:
        return float(abs(self.energy[-1] - self.energy[0]))


def bind_parameters(h: Poly, params: Mapping[str, object] | None) -> Poly:
    if not params:
        return h
    return h.subs({Param(k): v for k, v in params.items()})


def integrate_reduced(
    system: ReducedSystem,
    state0: Sequence[float],
    step: float,
    n_steps: int,
    params: Mapping[str, object] | None = None,
) -> Trajectory:
    """Classical fixed-step RK4; the Hamiltonian is recorded after every step.

    ``state0`` follows :attr:`ReducedSystem.coordinates`. Symbolic parameters
    must be bound through ``params`` (exact values are substituted first).
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    coords = system.coordinates
    if len(state0) != len(coords):
        raise ValueError(f"state has {len(state0)} entries, chart needs {len(coords)}")
    rhs_polys = [bind_parameters(r, params) for r in system.rhs]
    h_poly = bind_parameters(system.hamiltonian, params)
    rhs = [r.compile(coords) for r in rhs_polys]
    energy_fn = h_poly.compile(coords)

    def f(x):
        return np.array([g(x) for g in rhs], dtype=float)

    states = np.empty((n_steps + 1, len(coords)))
    energy = np.empty(n_steps + 1)
    states[0] = np.asarray(state0, dtype=float)
    energy[0] = energy_fn(states[0])
    x = states[0]
    with np.errstate(all="ignore"):
        _run(f, energy_fn, x, step, n_steps, states, energy, coords)
    return Trajectory(step * np.arange(n_steps + 1), states, energy, coords)


def _run(f, energy_fn, x, step, n_steps, states, energy, coords):
    for n in range(n_steps):
        k1 = f(x)
        k2 = f(x + 0.5 * step * k1)
        k3 = f(x + 0.5 * step * k2)
        k4 = f(x + step * k3)
        x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        e = energy_fn(x)
        if not (np.all(np.isfinite(x)) and np.isfinite(e)):
            partial = Trajectory(
                step * np.arange(n + 1), states[: n + 1].copy(), energy[: n + 1].copy(), coords
            )
            raise NonFiniteStateError(n, partial)
        states[n + 1] = x
        energy[n + 1] = e


__all__ = [
    "NonFiniteStateError",
    "ReducedSystem",
    "Trajectory",
    "bind_parameters",
    "chart_pairs",
    "hamilton_equations",
    "integrate_reduced",
    "poisson_bracket",
]
