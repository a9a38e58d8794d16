import numpy as np
import pytest

from nlgs.grid import Field, constant_field, inner_product, make_grid, norm
from nlgs.kernels import DIRICHLET, NEUMANN, KernelSpec, build_kernel_table, bump_profile
from nlgs.operator import (
    apply,
    apply_dense,
    apply_values,
    dissipation,
    dissipation_fast,
    dissipation_identity_gap,
    interior_mask,
    make_operator,
    operator_norm_estimate,
    seminorm_lambda,
)


def _op(counts=(32, 32), j=4, mode=NEUMANN, extents=(1.0, 1.0)):
    grid = make_grid(len(counts), extents, counts)
    table = build_kernel_table(
        KernelSpec(profile=bump_profile(1.0), scale_j=j, boundary_mode=mode), grid
    )
    return make_operator(table)


def test_constants_are_annihilated_zero_flux():
    op = _op()
    out = apply(op, constant_field(op.grid, 3.5))
    assert np.max(np.abs(out.values)) < 1e-12
    # the unit constant hits the row-mass cache path and is exactly zero
    assert np.max(np.abs(apply(op, constant_field(op.grid, 1.0)).values)) == 0.0


def test_zero_extension_absorbs_near_boundary():
    op = _op(mode=DIRICHLET)
    out = apply(op, constant_field(op.grid, 1.0)).values
    # strictly negative where the support sticks out of the box, zero inside
    assert out[0, 0] < 0.0
    mask = interior_mask(op.grid, op.table.spec.support_radius)
    assert np.max(np.abs(out[mask])) < 1e-12


def test_dense_matches_fast_in_one_dimension():
    op = _op(counts=(64,), extents=(1.0,), j=4)
    rng = np.random.default_rng(5)
    z = Field(grid=op.grid, values=rng.standard_normal(op.grid.shape))
    fast = apply_values(op, z.values)
    dense = apply_dense(op, z).values
    assert np.max(np.abs(fast - dense)) < 1e-12 * np.max(np.abs(dense))


def test_sup_norm_bound():
    op = _op(j=8)
    bound = operator_norm_estimate(op)
    assert bound <= 2.0 * op.table.gamma_inf * (1.0 + 1e-12)
    rng = np.random.default_rng(6)
    z = Field(grid=op.grid, values=rng.uniform(-1.0, 1.0, size=op.grid.shape))
    assert norm(apply(op, z), "sup") <= bound * norm(z, "sup") * (1.0 + 1e-12)


def test_operator_is_self_adjoint_zero_flux():
    op = _op()
    rng = np.random.default_rng(8)
    a = Field(grid=op.grid, values=rng.standard_normal(op.grid.shape))
    b = Field(grid=op.grid, values=rng.standard_normal(op.grid.shape))
    lhs = inner_product(apply(op, a), b)
    rhs = inner_product(a, apply(op, b))
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-13)


def test_dissipation_identity_and_positivity():
    op = _op()
    rng = np.random.default_rng(9)
    z = Field(grid=op.grid, values=rng.standard_normal(op.grid.shape))
    y = dissipation(op, z)
    assert y > 0.0
    assert dissipation_identity_gap(op, z) < 1e-10
    assert dissipation_fast(op, z) == pytest.approx(y, rel=1e-10)


def test_dissipation_vanishes_on_constants():
    op = _op()
    assert dissipation(op, constant_field(op.grid, 4.0)) == 0.0


def test_seminorm_tracks_dissipation():
    op = _op(j=4)
    rng = np.random.default_rng(10)
    z = Field(grid=op.grid, values=rng.standard_normal(op.grid.shape))
    lam = seminorm_lambda(bump_profile(1.0), 4, z)
    assert lam == pytest.approx(dissipation(op, z) / op.table.m2, rel=1e-12)
    with pytest.raises(ValueError):
        seminorm_lambda(bump_profile(1.0), 4, z, p=4)


def test_grid_mismatch_rejected():
    op = _op()
    other = constant_field(make_grid(2, (1.0, 1.0), (16, 16)), 1.0)
    with pytest.raises(ValueError):
        apply(op, other)
    with pytest.raises(ValueError):
        dissipation(op, other)


def test_interior_mask():
    grid = make_grid(2, (1.0, 1.0), (8, 8))
    mask = interior_mask(grid, 0.2)
    # cells with centers within 0.2 of any wall are excluded
    assert not mask[0, 4] and not mask[4, 0]
    assert mask[4, 4]
