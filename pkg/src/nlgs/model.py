"""Reaction terms of the two-species autocatalytic model and its homogeneous
steady states.

The kinetics are F1 = -u v^2 + f (1 - u), F2 = u v^2 - (f + kappa) v.  The
spatially homogeneous steady states are governed by the discriminant
f^2 - 4 f (f + kappa)^2: one state (1, 0) when it is negative, a double
nontrivial state on the boundary, and two nontrivial states when positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field


@dataclass(frozen=True)
class ModelParams:
    """Diffusivities, feed rate, and kill rate; all strictly positive."""

    d1: float
    d2: float
    f: float
    kappa: float

    def __post_init__(self):
        for name in ("d1", "d2", "f", "kappa"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class SteadyStateReport:
    regime: str  # "s1" | "s2" | "s3"
    states: tuple[tuple[float, float], ...]
    discriminant: float

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "states": [list(s) for s in self.states],
            "discriminant": self.discriminant,
        }


def reaction_values(u: np.ndarray, v: np.ndarray, params: ModelParams):
    """Pointwise kinetics on raw arrays (hot path)."""
    uvv = u * v * v
    f1 = -uvv + params.f * (1.0 - u)
    f2 = uvv - (params.f + params.kappa) * v
    return f1, f2


def reaction(u: Field, v: Field, params: ModelParams) -> tuple[Field, Field]:
    if u.grid != v.grid:
        raise ValueError("u and v live on different grids")
    f1, f2 = reaction_values(u.values, v.values, params)
    return Field(grid=u.grid, values=f1), Field(grid=u.grid, values=f2)


def discriminant(params: ModelParams) -> float:
    fk = params.f + params.kappa
    return params.f * params.f - 4.0 * params.f * fk * fk


def steady_states(params: ModelParams) -> SteadyStateReport:
    """Spatially homogeneous steady states and the regime they belong to."""
    disc = discriminant(params)
    f = params.f
    fk = params.f + params.kappa
    if disc < 0:
        return SteadyStateReport(regime="s1", states=((1.0, 0.0),), discriminant=disc)
    if disc == 0:
        return SteadyStateReport(
            regime="s2", states=((1.0, 0.0), (0.5, 2.0 * fk)), discriminant=disc
        )
    root = math.sqrt(disc)
    u_plus = 2.0 * fk * fk / (f + root)
    u_minus = 2.0 * fk * fk / (f - root)
    v_plus = (f + root) / (2.0 * fk)
    v_minus = (f - root) / (2.0 * fk)
    return SteadyStateReport(
        regime="s3",
        states=((1.0, 0.0), (u_plus, v_plus), (u_minus, v_minus)),
        discriminant=disc,
    )


def reaction_jacobian(params: ModelParams, state: tuple[float, float]) -> np.ndarray:
    """Jacobian of the kinetics at a homogeneous state (zero-diffusion ODE)."""
    u, v = state
    f = params.f
    fk = params.f + params.kappa
    return np.array(
        [
            [-v * v - f, -2.0 * u * v],
            [v * v, 2.0 * u * v - fk],
        ]
    )


def classify_stability_homogeneous(
    params: ModelParams, state: tuple[float, float], tol: float = 1e-9
) -> str:
    """Classify a homogeneous steady state via the kinetics Jacobian.

    This is an ODE-level classification (diffusion ignored); the semi-trivial
    state (1, 0) has eigenvalues (-f, -(f + kappa)) and is always stable.
    """
    eigs = np.linalg.eigvals(reaction_jacobian(params, state))
    real = np.real(eigs)
    if np.all(real < -tol):
        return "stable"
    if np.any(real > tol):
        return "unstable"
    return "marginal"


def positivity_shift(params: ModelParams, R: float) -> float:
    """Shift xi(R) = f + max(kappa, R^2) making F(z) + xi(R) z componentwise
    non-negative on 0 <= z with sup-norm at most R."""
    return params.f + max(params.kappa, R * R)
