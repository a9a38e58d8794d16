"""Integrable interaction kernels and their scaled mollifier family.

A kernel is built from a radial profile phi with compact support.  The scaled
family chi_j(x, y) = j^{n+2} phi(j (x - y)) concentrates at scale 1/j while
its interior row mass grows like j^2 * integral(phi), which is what turns the
nonlocal operator into an effective diffusion as j grows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid

NEUMANN = "neumann_nonlocal"
DIRICHLET = "dirichlet_extension"
BOUNDARY_MODES = (NEUMANN, DIRICHLET)


@dataclass(frozen=True)
class RadialProfile:
    """Non-negative, non-increasing radial profile with compact support.

    ``eval`` maps radius r >= 0 to the profile value; it must vanish for
    r >= radius.
    """

    name: str
    radius: float
    eval: Callable[[np.ndarray], np.ndarray]

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        out = np.asarray(self.eval(np.atleast_1d(r)), dtype=np.float64)
        return out.reshape(r.shape)


def bump_profile(radius: float = 1.0) -> RadialProfile:
    """Smooth bump exp(-1/(1 - (r/radius)^2)) on r < radius, zero outside."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def _eval(r):
        r = np.asarray(r, dtype=np.float64)
        s = r / radius
        out = np.zeros_like(s)
        inside = s < 1.0
        si = s[inside]
        out[inside] = np.exp(-1.0 / (1.0 - si * si))
        return out

    return RadialProfile(name="bump", radius=float(radius), eval=_eval)


def ball_indicator_profile(radius: float = 1.0) -> RadialProfile:
    """Indicator of the ball of given radius; handy for closed-form moments."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def _eval(r):
        r = np.asarray(r, dtype=np.float64)
        return np.where(r < radius, 1.0, 0.0)

    return RadialProfile(name="ball_indicator", radius=float(radius), eval=_eval)


PROFILES = {
    "bump": bump_profile,
    "ball_indicator": ball_indicator_profile,
}


def kernel_moments(profile: RadialProfile, dim: int, resolution: int = 256) -> tuple[float, float]:
    """Midpoint-rule mass and second moment of the profile over its support box.

    Returns (M0, m2) with M0 = integral(phi) and m2 = integral(|x|^2 phi).
    """
    if resolution < 64:
        raise ValueError(f"resolution must be >= 64, got {resolution}")
    R = profile.radius
    h = 2.0 * R / resolution
    x = -R + (np.arange(resolution) + 0.5) * h
    if dim == 1:
        r = np.abs(x)
        cell = h
    elif dim == 2:
        X, Y = np.meshgrid(x, x, indexing="ij")
        r = np.hypot(X, Y)
        cell = h * h
    else:
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    vals = profile(r)
    if not np.all(np.isfinite(vals)):
        raise ValueError("profile evaluated to non-finite values")
    m0 = float(np.sum(vals) * cell)
    m2 = float(np.sum(vals * r * r) * cell)
    if m2 <= 0:
        raise ValueError("second moment of the profile must be positive")
    return m0, m2


@dataclass(frozen=True)
class KernelSpec:
    """Scaled kernel chi_j built from a radial profile, with a boundary mode."""

    profile: RadialProfile
    scale_j: int
    boundary_mode: str = NEUMANN
    diffusivity: float = 1.0

    def __post_init__(self):
        if self.scale_j < 1:
            raise ValueError(f"scale_j must be >= 1, got {self.scale_j}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError(f"unknown boundary mode {self.boundary_mode!r}")
        if self.diffusivity <= 0:
            raise ValueError(f"diffusivity must be positive, got {self.diffusivity}")

    @property
    def support_radius(self) -> float:
        return self.profile.radius / self.scale_j


@dataclass(frozen=True)
class KernelTable:
    """Quadrature weights of chi_j on the grid offset lattice.

    offsets: integer grid shifts within the kernel support, lexicographic order
    weights: chi_j(0, offset * h) * cell_measure, one per offset
    row_mass_interior: sum of all weights (full row mass away from the boundary)
    gamma_inf: uniform row-mass bound; equals row_mass_interior because
        boundary-truncated rows can only lose mass
    m2: second moment of the profile (continuum quadrature)
    """

    spec: KernelSpec
    grid: Grid
    offsets: tuple[tuple[int, ...], ...]
    weights: np.ndarray
    row_mass_interior: float
    gamma_inf: float
    m2: float
    m0: float

    @property
    def stencil(self) -> np.ndarray:
        """Dense weight array indexed by offset, shape (2K+1,)*dim."""
        reach = [max(abs(o[a]) for o in self.offsets) for a in range(self.grid.dim)]
        st = np.zeros(tuple(2 * r + 1 for r in reach))
        for o, w in zip(self.offsets, self.weights):
            idx = tuple(o[a] + reach[a] for a in range(self.grid.dim))
            st[idx] = w
        return st

    def summary(self) -> dict:
        return {
            "profile": self.spec.profile.name,
            "radius": self.spec.profile.radius,
            "j": self.spec.scale_j,
            "M0": self.m0,
            "m2": self.m2,
            "gamma_inf": self.gamma_inf,
            "offset_count": len(self.offsets),
        }


def build_kernel_table(spec: KernelSpec, grid: Grid, moment_resolution: int = 512) -> KernelTable:
    """Tabulate chi_j weights on the grid offset lattice.

    The support must span at least 4 cells per axis, otherwise the midpoint
    quadrature of the kernel is meaningless and an error names the minimum
    admissible grid.
    """
    h = grid.spacing
    hmax = max(h)
    support = spec.support_radius
    if support < 4.0 * hmax:
        need = [math.ceil(4.0 * L * spec.scale_j / spec.profile.radius) for L in grid.extents]
        raise ValueError(
            f"kernel support {support:g} spans fewer than 4 cells (max spacing "
            f"{hmax:g}); need at least {need} cells per axis for j={spec.scale_j}"
        )
    j = spec.scale_j
    n = grid.dim
    scale = float(j) ** (n + 2)
    reach = [int(math.ceil(support / h[a])) for a in range(n)]
    offsets = []
    weights = []
    for o in itertools.product(*(range(-r, r + 1) for r in reach)):
        dist = math.hypot(*(o[a] * h[a] for a in range(n)))
        if dist >= support:
            continue
        w = scale * float(spec.profile(j * dist)) * grid.cell_measure
        offsets.append(o)
        weights.append(w)
    weights = np.array(weights)
    row_mass = float(np.sum(weights))
    m0, m2 = kernel_moments(spec.profile, n, moment_resolution)
    return KernelTable(
        spec=spec,
        grid=grid,
        offsets=tuple(offsets),
        weights=weights,
        row_mass_interior=row_mass,
        gamma_inf=row_mass,
        m2=m2,
        m0=m0,
    )


def table_second_moment(table: KernelTable) -> float:
    """Second moment of the tabulated kernel, sum of weights * |offset*h|^2.

    Matches the profile-level m2 up to quadrature and scale truncation error.
    """
    h = table.grid.spacing
    total = 0.0
    for o, w in zip(table.offsets, table.weights):
        total += w * sum((o[a] * h[a]) ** 2 for a in range(table.grid.dim))
    return total
