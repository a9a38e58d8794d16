"""Uniform cell-centered grids on axis-aligned boxes, and scalar fields on them.

The domain is an axis-aligned box discretized with cell-centered nodes
x_i = (i + 1/2) h per axis.  All integrals elsewhere in the package are
midpoint-rule sums weighted by the cell measure, so the sum of cell measures
recovers the box volume exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered discretization of an axis-aligned box.

    Attributes:
        dim: spatial dimension, 1 or 2
        extents: physical side lengths per axis
        counts: number of cells per axis
    """

    dim: int
    extents: tuple[float, ...]
    counts: tuple[int, ...]

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.extents, self.counts))

    @property
    def cell_measure(self) -> float:
        m = 1.0
        for h in self.spacing:
            m *= h
        return m

    @property
    def volume(self) -> float:
        v = 1.0
        for L in self.extents:
            v *= L
        return v

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def num_cells(self) -> int:
        n = 1
        for c in self.counts:
            n *= c
        return n

    def axis_nodes(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        h = self.spacing[axis]
        return (np.arange(self.counts[axis]) + 0.5) * h

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``counts`` (row-major indexing)."""
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))


def make_grid(dim: int, extents, counts) -> Grid:
    """Build a cell-centered grid on the box prod([0, extents[a]])."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    extents = tuple(float(L) for L in extents)
    counts = tuple(int(n) for n in counts)
    if len(extents) != dim or len(counts) != dim:
        raise ValueError("extents and counts must have one entry per axis")
    if any(L <= 0 for L in extents):
        raise ValueError(f"extents must be positive, got {extents}")
    if any(n < 2 for n in counts):
        raise ValueError(f"counts must be >= 2, got {counts}")
    return Grid(dim=dim, extents=extents, counts=counts)


@dataclass(frozen=True)
class Field:
    """Scalar grid function, one value per cell, row-major storage."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def field_from_values(grid: Grid, values) -> Field:
    return Field(grid=grid, values=np.asarray(values, dtype=np.float64))


def constant_field(grid: Grid, value: float) -> Field:
    return Field(grid=grid, values=np.full(grid.shape, float(value)))


def field_from_function(grid: Grid, fn) -> Field:
    """Sample ``fn(*coords)`` at the cell centers."""
    coords = grid.meshgrid()
    return Field(grid=grid, values=np.asarray(fn(*coords), dtype=np.float64))


def norm(field: Field, kind: str) -> float:
    """Sup, L1, or L2 norm with midpoint quadrature over the box."""
    v = field.values
    m = field.grid.cell_measure
    if kind == "sup":
        return float(np.max(np.abs(v)))
    if kind == "L1":
        return float(np.sum(np.abs(v)) * m)
    if kind == "L2":
        return float(np.sqrt(np.sum(v * v) * m))
    raise ValueError(f"unknown norm kind {kind!r}")


def inner_product(a: Field, b: Field) -> float:
    """Midpoint quadrature of the product of two fields on one grid."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return float(np.sum(a.values * b.values) * a.grid.cell_measure)


def save_field(path, field: Field, time: float = 0.0, name: str = "field") -> None:
    """Write a snapshot: one-line JSON header, then raw little-endian float64."""
    header = {
        "dim": field.grid.dim,
        "extents": list(field.grid.extents),
        "counts": list(field.grid.counts),
        "time": time,
        "name": name,
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode("utf-8"))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def load_field(path) -> tuple[Field, dict]:
    """Read a snapshot written by :func:`save_field`."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        raw = fh.read()
    grid = make_grid(header["dim"], header["extents"], header["counts"])
    values = np.frombuffer(raw, dtype="<f8").reshape(grid.shape)
    return Field(grid=grid, values=values), header
