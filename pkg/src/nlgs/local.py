"""Classical reaction-diffusion reference solver with the effective
diffusivities D = m2 * d / (2n), the limit object of the scale ladder.

The Laplacian is the standard second-order centered stencil with ghost cells:
edge reflection for zero-flux, zero ghost values for the absorbing variant.
The zero-flux stencil satisfies a discrete Green identity against the face
gradient inner product, which is what makes the weak-form residual consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid, inner_product
from .integrator import (
    DiffusionTerm,
    IntegratorConfig,
    State,
    Trajectory,
    integrate,
)
from .model import ModelParams, reaction_values

NEUMANN_BC = "neumann"
DIRICHLET_BC = "dirichlet"


@dataclass(frozen=True)
class DiscreteLaplacian:
    """2n+1-point Laplacian stencil with a boundary condition and a diffusivity."""

    grid: Grid
    bc: str = NEUMANN_BC
    diffusivity: float = 1.0

    def __post_init__(self):
        if self.bc not in (NEUMANN_BC, DIRICHLET_BC):
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.diffusivity <= 0:
            raise ValueError("diffusivity must be positive")

    @property
    def stiffness(self) -> float:
        """Sup-norm bound of D * Laplacian: 2 D sum_a 2 / h_a^2."""
        return 4.0 * self.diffusivity * sum(1.0 / h**2 for h in self.grid.spacing)


def laplacian_values(L: DiscreteLaplacian, values: np.ndarray) -> np.ndarray:
    """Raw (unit-diffusivity) Laplacian of a value array."""
    mode = "edge" if L.bc == NEUMANN_BC else "constant"
    out = np.zeros_like(values)
    for a in range(L.grid.dim):
        pad = [(0, 0)] * L.grid.dim
        pad[a] = (1, 1)
        padded = np.pad(values, pad, mode=mode)
        lo = [slice(None)] * L.grid.dim
        hi = [slice(None)] * L.grid.dim
        mid = [slice(None)] * L.grid.dim
        lo[a] = slice(0, -2)
        hi[a] = slice(2, None)
        mid[a] = slice(1, -1)
        h = L.grid.spacing[a]
        out += (padded[tuple(hi)] - 2.0 * padded[tuple(mid)] + padded[tuple(lo)]) / (h * h)
    return out


def apply_laplacian(L: DiscreteLaplacian, z: Field) -> Field:
    if z.grid != L.grid:
        raise ValueError("field grid does not match Laplacian grid")
    return Field(grid=z.grid, values=laplacian_values(L, z.values))


def laplacian_term(L: DiscreteLaplacian) -> DiffusionTerm:
    D = L.diffusivity
    return DiffusionTerm(
        apply_fn=lambda v: D * laplacian_values(L, v),
        stiffness=L.stiffness,
        dissipation_fn=lambda f: -2.0 * D * inner_product(f, apply_laplacian(L, f)),
    )


def gradient_inner(a: Field, b: Field) -> float:
    """Face-based gradient inner product sum(grad_h a . grad_h b) * cell measure.

    Exactly the negative of the zero-flux Laplacian quadratic form:
    sum(b * Lap a) * measure = -gradient_inner(a, b).
    """
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    grid = a.grid
    total = 0.0
    for ax in range(grid.dim):
        h = grid.spacing[ax]
        da = np.diff(a.values, axis=ax) / h
        db = np.diff(b.values, axis=ax) / h
        total += float(np.sum(da * db))
    return total * grid.cell_measure


def effective_laplacians(
    grid: Grid, params: ModelParams, m2: float, bc: str = NEUMANN_BC
) -> tuple[DiscreteLaplacian, DiscreteLaplacian]:
    n = grid.dim
    L1 = DiscreteLaplacian(grid=grid, bc=bc, diffusivity=m2 * params.d1 / (2 * n))
    L2 = DiscreteLaplacian(grid=grid, bc=bc, diffusivity=m2 * params.d2 / (2 * n))
    return L1, L2


def integrate_local(
    initial: State,
    params: ModelParams,
    config: IntegratorConfig,
    m2: float,
    bc: str = NEUMANN_BC,
    monitors: tuple[str, ...] = ("positivity", "u_bound"),
) -> Trajectory:
    """Run the classical system with diffusivities m2 * d / (2n)."""
    L1, L2 = effective_laplacians(initial.u.grid, params, m2, bc)
    return integrate(
        initial,
        params,
        laplacian_term(L1),
        laplacian_term(L2),
        config,
        monitors=monitors,
    )


def weak_residual(
    trajectory: Trajectory,
    test_function: Field,
    component: str,
    params: ModelParams,
    m2: float,
    min_snapshots_per_unit_time: float = 8.0,
) -> float:
    """Max over snapshot times of the weak-form defect of the trajectory.

    The defect at time t is
        integral((c(t) - c(0)) theta)
        + D integral_0^t integral(grad c . grad theta)
        - integral_0^t integral(R(u, v) theta),
    with midpoint quadrature in space and the trapezoid rule in time over the
    stored snapshots.
    """
    if component not in ("u", "v"):
        raise ValueError("component must be 'u' or 'v'")
    states = trajectory.states
    if len(states) < 2:
        raise ValueError("trajectory has no time span")
    span = states[-1].t - states[0].t
    if (len(states) - 1) / span < min_snapshots_per_unit_time:
        raise ValueError(
            f"insufficient snapshot density: {(len(states) - 1) / span:g} per unit "
            f"time, need {min_snapshots_per_unit_time:g}"
        )
    grid = states[0].u.grid
    n = grid.dim
    d = params.d1 if component == "u" else params.d2
    D = m2 * d / (2 * n)
    theta = test_function

    def pick(state: State) -> Field:
        return state.u if component == "u" else state.v

    def source(state: State) -> float:
        f1, f2 = reaction_values(state.u.values, state.v.values, params)
        r = f1 if component == "u" else f2
        return float(np.sum(r * theta.values)) * grid.cell_measure

    c0 = pick(states[0])
    grad_terms = [gradient_inner(pick(s), theta) for s in states]
    src_terms = [source(s) for s in states]
    times = [s.t for s in states]

    worst = 0.0
    grad_int = 0.0
    src_int = 0.0
    for k in range(1, len(states)):
        dt = times[k] - times[k - 1]
        grad_int += 0.5 * dt * (grad_terms[k] + grad_terms[k - 1])
        src_int += 0.5 * dt * (src_terms[k] + src_terms[k - 1])
        ck = pick(states[k])
        mass = float(np.sum((ck.values - c0.values) * theta.values)) * grid.cell_measure
        worst = max(worst, abs(mass + D * grad_int - src_int))
    return worst
