"""Scale-ladder study: nonlocal runs for increasing j against the classical
reference with effective diffusivities m2 * d / (2n).

All runs share one grid, one time step, and one snapshot schedule so the
space-time L2 errors are computed on identical meshes; this isolates the
large-j effect at fixed discretization, accepting an O(h^2) error floor.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .grid import Grid
from .integrator import (
    IntegratorConfig,
    State,
    Trajectory,
    integrate,
    max_dt_from_stiffness,
    nonlocal_term,
    reaction_lipschitz,
    apriori_box,
)
from .kernels import KernelSpec, KernelTable, RadialProfile, build_kernel_table, kernel_moments
from .local import effective_laplacians, integrate_local
from .model import ModelParams
from .operator import make_operator


def effective_diffusivity(profile: RadialProfile, d: float, n: int, resolution: int = 512) -> float:
    """D = m2 * d / (2n) with m2 from the profile quadrature."""
    _, m2 = kernel_moments(profile, n, resolution)
    return m2 * d / (2 * n)


@dataclass(frozen=True)
class LimitStudyConfig:
    params: ModelParams
    grid: Grid
    profile: RadialProfile
    j_ladder: tuple[int, ...]
    t_end: float
    dt: float | None = None  # None: largest shared step from the stability bounds
    snapshot_count: int = 50
    scheme: str = "rk4_explicit"
    safety: float = 0.5
    workers: int = 1

    def __post_init__(self):
        if list(self.j_ladder) != sorted(set(self.j_ladder)):
            raise ValueError("j_ladder must be strictly increasing")
        if not self.j_ladder:
            raise ValueError("j_ladder must be non-empty")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.snapshot_count < 2:
            raise ValueError("snapshot_count must be >= 2")


@dataclass
class LimitStudyReport:
    j_ladder: tuple[int, ...]
    spacetime_l2_err_u: dict[int, float]
    spacetime_l2_err_v: dict[int, float]
    final_l2_err_u: dict[int, float]
    final_l2_err_v: dict[int, float]
    wall_clock: dict[str, float]
    m2: float
    D1: float
    D2: float
    dt: float
    monotone_u: bool = False
    monotone_v: bool = False
    trajectories: dict[str, Trajectory] = dataclass_field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "j_ladder": list(self.j_ladder),
            "spacetime_l2_err_u": {str(j): e for j, e in self.spacetime_l2_err_u.items()},
            "spacetime_l2_err_v": {str(j): e for j, e in self.spacetime_l2_err_v.items()},
            "final_l2_err_u": {str(j): e for j, e in self.final_l2_err_u.items()},
            "final_l2_err_v": {str(j): e for j, e in self.final_l2_err_v.items()},
            "wall_clock": self.wall_clock,
            "m2": self.m2,
            "D1": self.D1,
            "D2": self.D2,
            "dt": self.dt,
            "monotone_u": self.monotone_u,
            "monotone_v": self.monotone_v,
        }


def spacetime_l2_error(a: Trajectory, b: Trajectory, component: str) -> float:
    """Trapezoid-in-time, midpoint-in-space L2((0,T) x box) distance between
    two trajectories sharing one snapshot schedule."""
    sa, sb = a.states, b.states
    if len(sa) != len(sb):
        raise ValueError("trajectories have different snapshot counts")
    grid = sa[0].u.grid
    total = 0.0
    sq = []
    for x, y in zip(sa, sb):
        if abs(x.t - y.t) > 1e-9:
            raise ValueError("trajectories have different snapshot times")
        fx = x.u if component == "u" else x.v
        fy = y.u if component == "u" else y.v
        diff = fx.values - fy.values
        sq.append(float(np.sum(diff * diff)) * grid.cell_measure)
    for k in range(1, len(sq)):
        total += 0.5 * (sa[k].t - sa[k - 1].t) * (sq[k] + sq[k - 1])
    return float(np.sqrt(total))


def _shared_dt(
    config: LimitStudyConfig, tables: dict[int, KernelTable], initial: State
) -> tuple[float, int]:
    params = config.params
    u0_sup = float(np.max(initial.u.values))
    v0_sup = float(np.max(initial.v.values))
    gamma_max = max(t.gamma_inf for t in tables.values())
    box = apriori_box(params, u0_sup, v0_sup, gamma_max, 0.0)
    lf = reaction_lipschitz(params, *box)
    d_max = max(params.d1, params.d2)
    bound = max_dt_from_stiffness(2.0 * d_max * gamma_max, lf, config.safety)
    L1, L2 = effective_laplacians(config.grid, params, tables[config.j_ladder[0]].m2)
    bound = min(bound, max_dt_from_stiffness(max(L1.stiffness, L2.stiffness), lf, config.safety))
    if config.dt is not None:
        if config.dt > bound * (1.0 + 1e-12):
            raise ValueError(f"requested dt={config.dt:g} exceeds the shared bound {bound:g}")
        bound = config.dt
    n_steps = max(1, int(np.ceil(config.t_end / bound)))
    # Align steps with the snapshot schedule.
    per = max(1, int(np.ceil(n_steps / (config.snapshot_count - 1))))
    n_steps = per * (config.snapshot_count - 1)
    return config.t_end / n_steps, per


def run_limit_study(config: LimitStudyConfig, initial: State) -> LimitStudyReport:
    """One classical run plus one nonlocal run per ladder entry; errors per j."""
    tables = {
        j: build_kernel_table(KernelSpec(profile=config.profile, scale_j=j), config.grid)
        for j in config.j_ladder
    }
    dt, snap_every = _shared_dt(config, tables, initial)
    m2 = tables[config.j_ladder[0]].m2
    n = config.grid.dim
    run_cfg = IntegratorConfig(
        scheme=config.scheme,
        dt=dt,
        t_end=config.t_end,
        snapshot_every=snap_every,
        monitor_every=snap_every,
        safety=config.safety,
    )

    wall: dict[str, float] = {}
    t0 = time.perf_counter()
    local_traj = integrate_local(initial, config.params, run_cfg, m2)
    wall["local"] = time.perf_counter() - t0

    def run_one(j: int) -> tuple[int, Trajectory, float]:
        start = time.perf_counter()
        table = tables[j]
        op = make_operator(table)
        term_u = nonlocal_term(_with_diffusivity(op, config.params.d1))
        term_v = nonlocal_term(_with_diffusivity(op, config.params.d2))
        traj = integrate(
            initial,
            config.params,
            term_u,
            term_v,
            run_cfg,
            gamma_inf=table.gamma_inf,
        )
        return j, traj, time.perf_counter() - start

    results: dict[int, Trajectory] = {}
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            for j, traj, secs in pool.map(run_one, config.j_ladder):
                results[j] = traj
                wall[f"j{j}"] = secs
    else:
        for j in config.j_ladder:
            j, traj, secs = run_one(j)
            results[j] = traj
            wall[f"j{j}"] = secs

    for j, traj in results.items():
        if not traj.ok:
            raise RuntimeError(f"nonlocal run j={j} flagged invariant violations: {traj.violations[:3]}")
    if not local_traj.ok:
        raise RuntimeError(f"local run flagged invariant violations: {local_traj.violations[:3]}")

    err_u = {j: spacetime_l2_error(results[j], local_traj, "u") for j in config.j_ladder}
    err_v = {j: spacetime_l2_error(results[j], local_traj, "v") for j in config.j_ladder}

    def final_err(j: int, component: str) -> float:
        a = results[j].final
        b = local_traj.final
        fa = a.u if component == "u" else a.v
        fb = b.u if component == "u" else b.v
        diff = fa.values - fb.values
        return float(np.sqrt(np.sum(diff * diff) * config.grid.cell_measure))

    ladder = list(config.j_ladder)
    report = LimitStudyReport(
        j_ladder=config.j_ladder,
        spacetime_l2_err_u=err_u,
        spacetime_l2_err_v=err_v,
        final_l2_err_u={j: final_err(j, "u") for j in ladder},
        final_l2_err_v={j: final_err(j, "v") for j in ladder},
        wall_clock=wall,
        m2=m2,
        D1=m2 * config.params.d1 / (2 * n),
        D2=m2 * config.params.d2 / (2 * n),
        dt=dt,
        monotone_u=all(err_u[a] > err_u[b] for a, b in zip(ladder, ladder[1:])),
        monotone_v=all(err_v[a] > err_v[b] for a, b in zip(ladder, ladder[1:])),
        trajectories={**{f"j{j}": results[j] for j in ladder}, "local": local_traj},
    )
    return report


def _with_diffusivity(op, d: float):
    """Operator view with the given diffusivity on its kernel spec."""
    from dataclasses import replace

    if op.table.spec.diffusivity == d:
        return op
    spec = replace(op.table.spec, diffusivity=d)
    table = replace(op.table, spec=spec)
    return make_operator(table)
