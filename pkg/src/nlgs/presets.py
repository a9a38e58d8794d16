"""Named initial-data presets for simulation runs.

All presets return non-negative (u, v) pairs.  Amplitude knobs are plain
keyword options so presets can be driven from JSON configs.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, Grid, constant_field
from .model import ModelParams


def _centered_bump(grid: Grid, width_frac: float) -> np.ndarray:
    """Smooth radial bump with maximum exactly 1 at its peak cell."""
    coords = grid.meshgrid()
    r2 = np.zeros(grid.shape)
    for a in range(grid.dim):
        c = 0.5 * grid.extents[a]
        w = width_frac * grid.extents[a]
        r2 = r2 + ((coords[a] - c) / w) ** 2
    bump = np.exp(-r2)
    return bump / np.max(bump)


def semi_trivial(grid: Grid, params: ModelParams) -> tuple[Field, Field]:
    return constant_field(grid, 1.0), constant_field(grid, 0.0)


def perturbed_semi_trivial(
    grid: Grid,
    params: ModelParams,
    v_amplitude: float = 0.5,
    u_dip: float = 0.5,
    width_frac: float = 0.1,
) -> tuple[Field, Field]:
    """u = 1 with a dip, v = localized bump; the classic seeding for patterns."""
    bump = _centered_bump(grid, width_frac)
    u = Field(grid=grid, values=1.0 - u_dip * bump)
    v = Field(grid=grid, values=v_amplitude * bump)
    return u, v


def stabilizing_decay(
    grid: Grid,
    params: ModelParams,
    v_sup_frac: float = 0.5,
    width_frac: float = 0.2,
) -> tuple[Field, Field]:
    """Data inside the stabilizing set: u = 1 and sup v = v_sup_frac * (f + kappa),
    so the exponential decay envelope applies with its largest admissible rate."""
    v_sup = v_sup_frac * (params.f + params.kappa)
    bump = _centered_bump(grid, width_frac)
    return constant_field(grid, 1.0), Field(grid=grid, values=v_sup * bump)


def homogeneous(
    grid: Grid, params: ModelParams, u0: float = 1.0, v0: float = 0.0
) -> tuple[Field, Field]:
    if u0 < 0 or v0 < 0:
        raise ValueError("homogeneous preset requires non-negative values")
    return constant_field(grid, u0), constant_field(grid, v0)


def random_seeded(
    grid: Grid,
    params: ModelParams,
    seed: int = 0,
    u_range: tuple[float, float] = (0.8, 1.2),
    v_range: tuple[float, float] = (0.0, 0.2),
) -> tuple[Field, Field]:
    rng = np.random.default_rng(seed)
    u = rng.uniform(*u_range, size=grid.shape)
    v = rng.uniform(*v_range, size=grid.shape)
    return Field(grid=grid, values=u), Field(grid=grid, values=v)


PRESETS = {
    "semi_trivial": semi_trivial,
    "perturbed_semi_trivial": perturbed_semi_trivial,
    "stabilizing_decay": stabilizing_decay,
    "homogeneous": homogeneous,
    "random_seeded": random_seeded,
}


def make_initial(grid: Grid, params: ModelParams, preset: str, **options) -> tuple[Field, Field]:
    try:
        fn = PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}") from None
    return fn(grid, params, **options)
