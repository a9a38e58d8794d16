import math

import numpy as np
import pytest

from nlgs.grid import Field, constant_field, load_field, make_grid, save_field
from nlgs.integrator import (
    IntegrationError,
    IntegratorConfig,
    State,
    integrate,
    max_dt_from_stiffness,
    nonlocal_term,
    reaction_lipschitz,
    stability_bound,
    step,
    zero_diffusion_term,
)
from nlgs.kernels import KernelSpec, build_kernel_table, bump_profile
from nlgs.limit import _with_diffusivity
from nlgs.model import ModelParams
from nlgs.operator import make_operator

PARAMS = ModelParams(d1=0.1, d2=0.1, f=0.04, kappa=0.01)


def _grid(n=32):
    return make_grid(2, (1.0, 1.0), (n, n))


def _nonlocal_terms(grid, params, j=4):
    table = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=j), grid)
    op = make_operator(table)
    return (
        nonlocal_term(_with_diffusivity(op, params.d1)),
        nonlocal_term(_with_diffusivity(op, params.d2)),
        table,
    )


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(scheme="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(monitor_every=0)


def test_semi_trivial_state_is_a_fixed_point():
    grid = _grid()
    term_u, term_v, table = _nonlocal_terms(grid, PARAMS)
    initial = State(t=0.0, u=constant_field(grid, 1.0), v=constant_field(grid, 0.0))
    cfg = IntegratorConfig(dt=0.1, t_end=2.0)
    traj = integrate(initial, PARAMS, term_u, term_v, cfg, gamma_inf=table.gamma_inf)
    assert traj.ok
    assert np.max(np.abs(traj.final.u.values - 1.0)) < 1e-13
    assert np.max(np.abs(traj.final.v.values)) == 0.0


def test_imex_matches_closed_form_relaxation():
    # with v = 0 the u equation is u' = f (1 - u); the exponential-integrator
    # step is exact for it, so the error stays at rounding level.
    grid = _grid(8)
    params = ModelParams(d1=1.0, d2=1.0, f=0.3, kappa=0.1)
    initial = State(t=0.0, u=constant_field(grid, 2.0), v=constant_field(grid, 0.0))
    cfg = IntegratorConfig(scheme="imex_linear_decay", dt=0.025, t_end=5.0)
    traj = integrate(initial, params, zero_diffusion_term(), zero_diffusion_term(), cfg)
    expected = 1.0 + math.exp(-params.f * 5.0) * 1.0
    assert np.max(np.abs(traj.final.u.values - expected)) < 1e-12


def test_rk4_is_fourth_order_on_the_kinetics():
    grid = _grid(4)
    params = ModelParams(d1=1.0, d2=1.0, f=0.08, kappa=0.02)
    initial = State(t=0.0, u=constant_field(grid, 0.9), v=constant_field(grid, 0.4))

    def final_u(dt):
        cfg = IntegratorConfig(dt=dt, t_end=2.0)
        traj = integrate(initial, params, zero_diffusion_term(), zero_diffusion_term(), cfg)
        return traj.final.u.values[0, 0]

    ref = final_u(1.0 / 512)
    e1 = abs(final_u(1.0 / 16) - ref)
    e2 = abs(final_u(1.0 / 32) - ref)
    assert e1 / e2 > 12.0  # nominal ratio 16


def test_step_size_guard():
    grid = _grid()
    term_u, term_v, table = _nonlocal_terms(grid, PARAMS)
    initial = State(t=0.0, u=constant_field(grid, 1.0), v=constant_field(grid, 0.1))
    bound = stability_bound(PARAMS, table.gamma_inf, (1.0, 2.0))
    cfg = IntegratorConfig(dt=4.0 * bound, t_end=8.0 * bound)
    with pytest.raises(ValueError, match="stability bound"):
        integrate(initial, PARAMS, term_u, term_v, cfg, gamma_inf=table.gamma_inf)


def test_span_must_be_step_multiple():
    grid = _grid(8)
    initial = State(t=0.0, u=constant_field(grid, 1.0), v=constant_field(grid, 0.0))
    cfg = IntegratorConfig(dt=0.3, t_end=1.0)
    with pytest.raises(ValueError, match="integer multiple"):
        integrate(initial, PARAMS, zero_diffusion_term(), zero_diffusion_term(), cfg)


def test_negative_initial_data_rejected():
    grid = _grid(8)
    initial = State(t=0.0, u=constant_field(grid, 1.0), v=constant_field(grid, -0.5))
    cfg = IntegratorConfig(dt=0.1, t_end=1.0)
    with pytest.raises(ValueError, match="non-negative"):
        integrate(initial, PARAMS, zero_diffusion_term(), zero_diffusion_term(), cfg)


def test_blowup_raises_integration_error():
    grid = _grid(4)
    state = State(t=0.0, u=constant_field(grid, 1e160), v=constant_field(grid, 1e160))
    cfg = IntegratorConfig(dt=1.0, t_end=1.0)
    with pytest.raises(IntegrationError), np.errstate(over="ignore", invalid="ignore"):
        for _ in range(5):
            state = step(state, PARAMS, zero_diffusion_term(), zero_diffusion_term(), cfg)


def test_monitor_columns_and_schedule():
    grid = _grid()
    term_u, term_v, table = _nonlocal_terms(grid, PARAMS)
    initial = State(t=0.0, u=constant_field(grid, 1.0), v=constant_field(grid, 0.0))
    cfg = IntegratorConfig(dt=0.1, t_end=1.0, monitor_every=2, snapshot_every=5)
    traj = integrate(initial, PARAMS, term_u, term_v, cfg, gamma_inf=table.gamma_inf)
    assert len(traj.monitor["t"]) == 6  # t = 0, 0.2, ..., 1.0
    assert traj.monitor["t"][-1] == pytest.approx(1.0)
    assert [s.t for s in traj.states] == pytest.approx([0.0, 0.5, 1.0])
    assert all(len(col) == 6 for col in traj.monitor.values())


def test_restart_is_bitwise_reproducible(tmp_path):
    grid = _grid()
    term_u, term_v, table = _nonlocal_terms(grid, PARAMS)
    rng = np.random.default_rng(2)
    initial = State(
        t=0.0,
        u=Field(grid=grid, values=rng.uniform(0.9, 1.1, grid.shape)),
        v=Field(grid=grid, values=rng.uniform(0.0, 0.2, grid.shape)),
    )
    full = integrate(
        initial, PARAMS, term_u, term_v,
        IntegratorConfig(dt=0.05, t_end=2.0), gamma_inf=table.gamma_inf,
    )

    half = integrate(
        initial, PARAMS, term_u, term_v,
        IntegratorConfig(dt=0.05, t_end=1.0), gamma_inf=table.gamma_inf,
    )
    save_field(tmp_path / "u.bin", half.final.u, time=half.final.t)
    save_field(tmp_path / "v.bin", half.final.v, time=half.final.t)
    u, meta = load_field(tmp_path / "u.bin")
    v, _ = load_field(tmp_path / "v.bin")
    resumed = integrate(
        State(t=meta["time"], u=u, v=v), PARAMS, term_u, term_v,
        IntegratorConfig(dt=0.05, t_end=2.0), gamma_inf=table.gamma_inf,
    )
    assert resumed.final.t == full.final.t
    assert resumed.final.u.values.tobytes() == full.final.u.values.tobytes()
    assert resumed.final.v.values.tobytes() == full.final.v.values.tobytes()


def test_lipschitz_and_stiffness_helpers():
    lf = reaction_lipschitz(PARAMS, 1.0, 1.0)
    assert lf > 0.0
    assert max_dt_from_stiffness(10.0, lf) == pytest.approx(0.5 / (10.0 + lf))
    with pytest.raises(ValueError):
        max_dt_from_stiffness(10.0, lf, safety=0.0)
