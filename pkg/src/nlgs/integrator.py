"""Explicit and IMEX time stepping for the semilinear system dz/dt = Az + F(z).

A is a bounded diffusion pair (nonlocal operator or discrete Laplacian), so an
explicit step-size limit dt <= safety / (stiffness + L_F) applies, where the
stiffness is the sup-norm bound of A and L_F a local Lipschitz estimate of the
kinetics on the a-priori invariant box.  Negative undershoot beyond the
positivity tolerance is flagged, never clamped: clamping would hide scheme
defects that the maximum principle lets us detect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable

import numpy as np

from .grid import Field, norm
from .model import ModelParams, reaction_values
from .operator import NonlocalOperator, apply_values, dissipation_fast

RK4 = "rk4_explicit"
IMEX = "imex_linear_decay"
SCHEMES = (RK4, IMEX)


class IntegrationError(RuntimeError):
    """Raised when stepping produces non-finite values; carries the last state."""

    def __init__(self, message: str, last_state: "State | None" = None):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class State:
    t: float
    u: Field
    v: Field


@dataclass(frozen=True)
class DiffusionTerm:
    """Linear spatial part A = d * (operator), with its sup-norm bound."""

    apply_fn: Callable[[np.ndarray], np.ndarray]
    stiffness: float
    dissipation_fn: Callable[[Field], float] | None = None


def zero_diffusion_term() -> DiffusionTerm:
    return DiffusionTerm(apply_fn=lambda v: np.zeros_like(v), stiffness=0.0)


def nonlocal_term(op: NonlocalOperator) -> DiffusionTerm:
    d = op.table.spec.diffusivity
    return DiffusionTerm(
        apply_fn=lambda v: d * apply_values(op, v),
        stiffness=2.0 * d * op.table.gamma_inf,
        dissipation_fn=lambda f: dissipation_fast(op, f),
    )


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str = RK4
    dt: float = 1e-2
    t_end: float = 1.0
    snapshot_every: int = 0  # in steps; 0 keeps only first and last
    monitor_every: int = 1  # in steps
    postol: float = 1e-10
    montol: float = 1e-6
    safety: float = 0.5

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.safety <= 0:
            raise ValueError("safety must be positive")
        if self.monitor_every < 1:
            raise ValueError("monitor_every must be >= 1")


MONITOR_COLUMNS = (
    "t",
    "sup_u",
    "sup_v",
    "L1_u",
    "L1_v",
    "L2sq_u",
    "L2sq_v",
    "Y_u",
    "Y_v",
    "bound_u_slack",
    "bound_uv_slack",
    "decay_slack",
)


@dataclass
class Trajectory:
    states: list[State]
    monitor: dict[str, list[float]]
    violations: list[tuple[str, float, float]] = dataclass_field(default_factory=list)

    @property
    def final(self) -> State:
        return self.states[-1]

    @property
    def ok(self) -> bool:
        return not self.violations


def reaction_lipschitz(params: ModelParams, u_max: float, v_max: float) -> float:
    """Sup over the box [0, u_max] x [0, v_max] of the kinetics Jacobian row sums."""
    f, fk = params.f, params.f + params.kappa
    row1 = v_max * v_max + f + 2.0 * u_max * v_max
    row2 = v_max * v_max + max(2.0 * u_max * v_max, fk)
    return max(row1, row2)


def apriori_box(
    params: ModelParams, u0_sup: float, v0_sup: float, gamma_inf: float, m: float = 0.0
) -> tuple[float, float]:
    """A-priori sup bounds (u_max, h_max) along the flow from the given data.

    m is the row-mass gap between the two kernels; zero when u and v share one
    kernel.
    """
    u_max = 1.0 + max(0.0, u0_sup - 1.0)
    forced = (
        2.0 * (abs(params.d1 - params.d2) * gamma_inf + m * params.d2) * (1.0 + u0_sup)
        + params.f
    ) / params.f
    h_max = max(u0_sup + v0_sup, forced)
    return u_max, h_max


def stability_bound(
    params: ModelParams,
    gamma_inf: float,
    box_bounds: tuple[float, float],
    safety: float = 0.5,
) -> float:
    """Largest admissible explicit step safety / (2 d_max gamma_inf + L_F)."""
    if safety <= 0:
        raise ValueError("safety must be positive")
    u_max, v_max = box_bounds
    lf = reaction_lipschitz(params, u_max, v_max)
    d_max = max(params.d1, params.d2)
    return safety / (2.0 * d_max * gamma_inf + lf)


def max_dt_from_stiffness(stiffness: float, lipschitz: float, safety: float = 0.5) -> float:
    if safety <= 0:
        raise ValueError("safety must be positive")
    return safety / (stiffness + lipschitz)


def _rhs(u, v, params, op_u: DiffusionTerm, op_v: DiffusionTerm):
    f1, f2 = reaction_values(u, v, params)
    return op_u.apply_fn(u) + f1, op_v.apply_fn(v) + f2


def _step_rk4(u, v, dt, params, op_u, op_v):
    k1u, k1v = _rhs(u, v, params, op_u, op_v)
    k2u, k2v = _rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, params, op_u, op_v)
    k3u, k3v = _rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, params, op_u, op_v)
    k4u, k4v = _rhs(u + dt * k3u, v + dt * k3v, params, op_u, op_v)
    un = u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    vn = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return un, vn


def _phi1(z: float) -> float:
    if abs(z) < 1e-8:
        return 1.0 + 0.5 * z + z * z / 6.0
    return math.expm1(z) / z


def _step_imex(u, v, dt, params, op_u, op_v):
    # The diagonal linear decays (-f u, -(f+kappa) v) are integrated exactly;
    # the remainder (diffusion, autocatalysis, feed) is treated explicitly.
    f, fk = params.f, params.f + params.kappa
    uvv = u * v * v
    nu = op_u.apply_fn(u) - uvv + f
    nv = op_v.apply_fn(v) + uvv
    un = math.exp(-f * dt) * u + dt * _phi1(-f * dt) * nu
    vn = math.exp(-fk * dt) * v + dt * _phi1(-fk * dt) * nv
    return un, vn


def step(
    state: State,
    params: ModelParams,
    op_u: DiffusionTerm,
    op_v: DiffusionTerm,
    config: IntegratorConfig,
) -> State:
    """One time step; raises IntegrationError on non-finite output."""
    u, v = state.u.values, state.v.values
    stepper = _step_rk4 if config.scheme == RK4 else _step_imex
    un, vn = stepper(u, v, config.dt, params, op_u, op_v)
    if not (np.all(np.isfinite(un)) and np.all(np.isfinite(vn))):
        raise IntegrationError(
            f"non-finite values after step from t={state.t}", last_state=state
        )
    grid = state.u.grid
    return State(
        t=state.t + config.dt,
        u=Field(grid=grid, values=un),
        v=Field(grid=grid, values=vn),
    )


def _decay_rate(params: ModelParams, u0_sup: float, v0_sup: float) -> float:
    """Largest admissible exponential decay rate for the v envelope; <= 0 when
    the data sit outside the stabilizing set."""
    delta = max(0.0, u0_sup - 1.0)
    return params.f + params.kappa - (1.0 + delta) * v0_sup


def integrate(
    initial: State,
    params: ModelParams,
    op_u: DiffusionTerm,
    op_v: DiffusionTerm,
    config: IntegratorConfig,
    monitors: tuple[str, ...] = ("positivity", "u_bound", "uv_bound"),
    gamma_inf: float | None = None,
    kernel_mass_gap: float = 0.0,
) -> Trajectory:
    """Run to t_end, sampling snapshots and invariant monitors.

    Monitor violations are flagged and recorded; the run continues.  Available
    monitors: positivity, u_bound, uv_bound, decay.
    """
    u0, v0 = initial.u, initial.v
    if float(np.min(u0.values)) < -config.postol or float(np.min(v0.values)) < -config.postol:
        raise ValueError("initial data must be non-negative")
    span = config.t_end - initial.t
    if span <= 0:
        raise ValueError("t_end must exceed the initial time")
    n_steps = int(round(span / config.dt))
    if abs(n_steps * config.dt - span) > 1e-9 * max(1.0, span):
        raise ValueError("t_end - t0 must be an integer multiple of dt")

    u0_sup = norm(u0, "sup")
    v0_sup = norm(v0, "sup")
    uv0_sup = float(np.max(u0.values + v0.values))
    stiffness = max(op_u.stiffness, op_v.stiffness)
    if gamma_inf is not None:
        box = apriori_box(params, u0_sup, v0_sup, gamma_inf, kernel_mass_gap)
        dt_max = stability_bound(params, gamma_inf, box, config.safety)
        envelope_rate = 2.0 * (
            abs(params.d1 - params.d2) * gamma_inf + kernel_mass_gap * params.d2
        )
    else:
        box = apriori_box(params, u0_sup, v0_sup, 0.0, 0.0)
        lf = reaction_lipschitz(params, *box)
        dt_max = max_dt_from_stiffness(stiffness, lf, config.safety)
        envelope_rate = 0.0
    if config.dt > dt_max * (1.0 + 1e-12):
        raise ValueError(
            f"dt={config.dt:g} violates the stability bound dt_max={dt_max:g}"
        )

    eps = _decay_rate(params, u0_sup, v0_sup)
    monitor: dict[str, list[float]] = {c: [] for c in MONITOR_COLUMNS}
    violations: list[tuple[str, float, float]] = []

    def record(state: State):
        t = state.t
        uvals, vvals = state.u.values, state.v.values
        monitor["t"].append(t)
        sup_u = float(np.max(np.abs(uvals)))
        sup_v = float(np.max(np.abs(vvals)))
        monitor["sup_u"].append(sup_u)
        monitor["sup_v"].append(sup_v)
        monitor["L1_u"].append(norm(state.u, "L1"))
        monitor["L1_v"].append(norm(state.v, "L1"))
        monitor["L2sq_u"].append(norm(state.u, "L2") ** 2)
        monitor["L2sq_v"].append(norm(state.v, "L2") ** 2)
        y_u = op_u.dissipation_fn(state.u) if op_u.dissipation_fn else math.nan
        y_v = op_v.dissipation_fn(state.v) if op_v.dissipation_fn else math.nan
        monitor["Y_u"].append(y_u)
        monitor["Y_v"].append(y_v)

        rel = t - initial.t
        u_env = 1.0 + math.exp(-params.f * rel) * max(0.0, u0_sup - 1.0)
        u_slack = float(np.max(uvals)) - u_env
        monitor["bound_u_slack"].append(u_slack)
        decay = math.exp(-params.f * rel)
        uv_env = decay * uv0_sup + (1.0 - decay) / params.f * (
            envelope_rate * (1.0 + u0_sup) + params.f
        )
        uv_slack = float(np.max(uvals + vvals)) - uv_env
        monitor["bound_uv_slack"].append(uv_slack)
        if eps > 0:
            d_slack = sup_v - math.exp(-eps * rel) * v0_sup
        else:
            d_slack = math.nan
        monitor["decay_slack"].append(d_slack)

        if "positivity" in monitors:
            under = -min(float(np.min(uvals)), float(np.min(vvals)))
            if under > config.postol:
                violations.append(("positivity", t, under))
        if "u_bound" in monitors and u_slack > config.montol:
            violations.append(("u_bound", t, u_slack))
        if "uv_bound" in monitors and uv_slack > config.montol:
            violations.append(("uv_bound", t, uv_slack))
        if "decay" in monitors and eps > 0 and d_slack > config.montol * max(1.0, v0_sup):
            violations.append(("decay", t, d_slack))

    states = [initial]
    record(initial)
    state = initial
    for k in range(1, n_steps + 1):
        state = step(state, params, op_u, op_v, config)
        # Rebuild t from the step index to keep restarts bit-reproducible.
        state = State(t=initial.t + k * config.dt, u=state.u, v=state.v)
        if config.snapshot_every and k % config.snapshot_every == 0:
            states.append(state)
        if k % config.monitor_every == 0:
            record(state)
    if states[-1] is not state:
        states.append(state)
    return Trajectory(states=states, monitor=monitor, violations=violations)
