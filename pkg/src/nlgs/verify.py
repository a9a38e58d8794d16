"""Runtime verification suites for the provable properties of the model.

Each criterion function returns a list of Check records; the CLI `verify`
subcommand and the acceptance test module both drive these.  Tolerances are
fixed here, not configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field, constant_field, field_from_function, make_grid, norm
from .integrator import (
    IntegratorConfig,
    State,
    integrate,
    max_dt_from_stiffness,
    nonlocal_term,
    reaction_lipschitz,
    apriori_box,
    stability_bound,
)
from .kernels import (
    DIRICHLET,
    NEUMANN,
    KernelSpec,
    bump_profile,
    kernel_moments,
)
from .kernels import build_kernel_table
from .limit import LimitStudyConfig, run_limit_study
from .local import integrate_local, weak_residual
from .model import ModelParams, reaction_values, steady_states
from .operator import (
    NonlocalOperator,
    apply_dense,
    apply_values,
    dissipation,
    dissipation_fast,
    interior_mask,
    laplacian_consistency,
    make_operator,
    seminorm_lambda,
)
from .presets import perturbed_semi_trivial, stabilizing_decay


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    actual: float
    bound: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: actual={self.actual:.6g} bound={self.bound:.6g}"


def _check_le(name: str, actual: float, bound: float) -> Check:
    return Check(name=name, passed=actual <= bound, actual=actual, bound=bound)


def _check(name: str, passed: bool, actual: float, bound: float) -> Check:
    return Check(name=name, passed=passed, actual=actual, bound=bound)


def _diffuse_rk4(op: NonlocalOperator, values: np.ndarray, d: float, t_end: float):
    """RK4 on dz/dt = d * Gamma z; yields the value array after every step."""
    dt = 0.5 / (2.0 * d * op.table.gamma_inf)
    steps = max(1, int(math.ceil(t_end / dt)))
    dt = t_end / steps
    z = values
    for _ in range(steps):
        k1 = d * apply_values(op, z)
        k2 = d * apply_values(op, z + 0.5 * dt * k1)
        k3 = d * apply_values(op, z + 0.5 * dt * k2)
        k4 = d * apply_values(op, z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        yield z


def _round_dt(dt_max: float, span: float) -> float:
    steps = max(1, int(math.ceil(span / dt_max)))
    return span / steps


def criterion_contraction() -> list[Check]:
    """Pure diffusion keeps the sup norm non-increasing and preserves positivity."""
    grid = make_grid(2, (1.0, 1.0), (64, 64))
    table = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=8), grid)
    op = make_operator(table)
    worst_growth = 0.0
    worst_under = 0.0
    for seed in range(10):
        rng = np.random.default_rng(1000 + seed)
        z = rng.uniform(0.0, 1.0, size=grid.shape)
        sup_prev = float(np.max(np.abs(z)))
        for z in _diffuse_rk4(op, z, 1.0, 1.0):
            sup = float(np.max(np.abs(z)))
            worst_growth = max(worst_growth, sup - sup_prev)
            worst_under = max(worst_under, -float(np.min(z)))
            sup_prev = sup
    return [
        _check_le("contraction: max sup-norm growth per sample", worst_growth, 1e-8),
        _check_le("contraction: positivity undershoot", worst_under, 1e-10),
    ]


def criterion_constants() -> list[Check]:
    """Zero-flux mode annihilates constants; zero-extension mode is sub-Markov."""
    grid = make_grid(2, (1.0, 1.0), (64, 64))
    profile = bump_profile(1.0)
    op_n = make_operator(
        build_kernel_table(KernelSpec(profile=profile, scale_j=8, boundary_mode=NEUMANN), grid)
    )
    residual = float(np.max(np.abs(apply_values(op_n, np.ones(grid.shape)))))

    op_d = make_operator(
        build_kernel_table(KernelSpec(profile=profile, scale_j=8, boundary_mode=DIRICHLET), grid)
    )
    worst_over = 0.0
    for z in _diffuse_rk4(op_d, np.ones(grid.shape), 1.0, 1.0):
        worst_over = max(worst_over, float(np.max(z)) - 1.0)
    return [
        _check_le("constants: zero-flux residual on the constant field", residual, 1e-14),
        _check_le("constants: zero-extension overshoot above 1", worst_over, 1e-12),
    ]


def criterion_quadratic_identity() -> list[Check]:
    """Gamma applied to |x|^2 returns the kernel second moment on the interior,
    and the operator-vs-scaled-Laplacian error decays along the scale ladder."""
    checks = []
    grid = make_grid(2, (1.0, 1.0), (64, 64))
    table = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=8), grid)
    op = make_operator(table)
    w = field_from_function(grid, lambda x, y: x * x + y * y)
    gw = apply_values(op, w.values)
    mask = interior_mask(grid, table.spec.support_radius)
    rel = float(np.max(np.abs(gw[mask] - table.m2))) / table.m2
    h = max(grid.spacing)
    checks.append(_check_le("quadratic: |Gamma(|x|^2) - m2| / m2 on the interior", rel, 5.0 * h * h))

    fine = make_grid(2, (1.0, 1.0), (256, 256))
    wf = field_from_function(fine, lambda x, y: np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y))
    lap = field_from_function(
        fine, lambda x, y: -8 * np.pi**2 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)
    )
    errs = []
    for j in (4, 8, 16):
        t = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=j), fine)
        errs.append(laplacian_consistency(make_operator(t), wf, lap, d=1.0))
    dec = errs[0] > errs[1] > errs[2]
    checks.append(
        _check("quadratic: consistency error strictly decreasing over j=4,8,16",
               dec, errs[2], errs[0])
    )
    return checks


def criterion_apriori_bounds() -> list[Check]:
    """Sup bound on u and the explicit envelope on u + v along a real run."""
    grid = make_grid(2, (1.0, 1.0), (64, 64))
    params = ModelParams(d1=0.05, d2=0.05, f=0.04, kappa=0.01)
    table = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=8), grid)
    op = make_operator(table)
    bump = field_from_function(
        grid, lambda x, y: 0.5 * np.exp(-(((x - 0.5) / 0.1) ** 2 + ((y - 0.5) / 0.1) ** 2))
    )
    initial = State(t=0.0, u=constant_field(grid, 2.0), v=bump)
    box = apriori_box(params, 2.0, norm(bump, "sup"), table.gamma_inf)
    dt = _round_dt(stability_bound(params, table.gamma_inf, box), 50.0)
    cfg = IntegratorConfig(dt=dt, t_end=50.0, monitor_every=5, montol=1e-6)
    from .limit import _with_diffusivity

    term_u = nonlocal_term(_with_diffusivity(op, params.d1))
    term_v = nonlocal_term(_with_diffusivity(op, params.d2))
    traj = integrate(initial, params, term_u, term_v, cfg, gamma_inf=table.gamma_inf)
    u_slack = max(traj.monitor["bound_u_slack"])
    uv_slack = max(traj.monitor["bound_uv_slack"])
    pos = [v for v in traj.violations if v[0] == "positivity"]
    return [
        _check_le("bounds: sup u exceeds 1 + exp(-f t) (u0 = 2) by", u_slack, 1e-6),
        _check_le("bounds: u + v exceeds its explicit envelope by", uv_slack, 1e-6),
        _check("bounds: no positivity violations flagged", not pos, float(len(pos)), 0.0),
    ]


def criterion_stabilization() -> list[Check]:
    """Exponential decay of v at the largest admissible rate, and u -> 1."""
    grid = make_grid(2, (1.0, 1.0), (32, 32))
    params = ModelParams(d1=0.1, d2=0.1, f=0.04, kappa=0.01)
    table = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=8), grid)
    op = make_operator(table)
    u0, v0 = stabilizing_decay(grid, params, v_sup_frac=0.5, width_frac=0.2)
    v0_sup = norm(v0, "sup")
    eps = params.f + params.kappa - v0_sup  # delta = 0
    box = apriori_box(params, 1.0, v0_sup, table.gamma_inf)
    dt = _round_dt(stability_bound(params, table.gamma_inf, box), 200.0)
    cfg = IntegratorConfig(dt=dt, t_end=200.0, monitor_every=5)
    from .limit import _with_diffusivity

    term = nonlocal_term(_with_diffusivity(op, params.d1))
    traj = integrate(
        State(t=0.0, u=u0, v=v0), params, term, term, cfg,
        monitors=("positivity", "u_bound", "decay"), gamma_inf=table.gamma_inf,
    )
    worst_factor = 0.0
    for t, sup_v in zip(traj.monitor["t"], traj.monitor["sup_v"]):
        env = math.exp(-eps * t) * v0_sup
        worst_factor = max(worst_factor, sup_v / env)
    final_u_dev = float(np.max(np.abs(traj.final.u.values - 1.0)))
    return [
        _check_le("stabilization: max sup_v / exponential envelope", worst_factor, 1.0 + 1e-6),
        _check_le("stabilization: |u - 1| at t = 200", final_u_dev, 1e-3),
    ]


def criterion_steady_states() -> list[Check]:
    """Random three-state-regime parameters: algebraic residuals and regimes."""
    rng = np.random.default_rng(7)
    worst_res = 0.0
    worst_uv = 0.0
    mismatches = 0
    found = 0
    while found < 100:
        f = rng.uniform(0.01, 0.25)
        kappa = rng.uniform(0.001, 0.1)
        params = ModelParams(d1=1.0, d2=1.0, f=f, kappa=kappa)
        disc_sign = np.sign(f - 4.0 * (f + kappa) ** 2)
        report = steady_states(params)
        expected = {1.0: "s3", 0.0: "s2", -1.0: "s1"}[float(disc_sign)]
        if report.regime != expected:
            mismatches += 1
        if report.regime != "s3":
            continue
        found += 1
        for u, v in report.states[1:]:
            f1, f2 = reaction_values(np.array(u), np.array(v), params)
            worst_res = max(worst_res, abs(float(f1)), abs(float(f2)))
            worst_uv = max(worst_uv, abs(u * v - (f + kappa)))
    return [
        _check_le("steady: worst kinetics residual at the nontrivial states", worst_res, 1e-12),
        _check_le("steady: worst |u v - (f + kappa)|", worst_uv, 1e-12),
        _check("steady: regime matches the discriminant sign", mismatches == 0,
               float(mismatches), 0.0),
    ]


def _energy_defect(traj, params: ModelParams, op: NonlocalOperator, volume: float) -> float:
    """Worst positive per-step defect of the discrete L2-energy inequality."""
    states = traj.states
    dt = states[1].t - states[0].t
    e = [norm(s.u, "L2") ** 2 for s in states]
    g = []
    for s in states:
        y = dissipation_fast(op, s.u)
        uv = s.u.values * s.v.values
        uv2 = float(np.sum(uv * uv)) * s.u.grid.cell_measure
        g.append(params.d1 * y + 2.0 * uv2 + params.f * norm(s.u, "L2") ** 2)
    worst = 0.0
    for k in range(len(states) - 1):
        defect = (e[k + 1] - e[k]) / dt + 0.5 * (g[k] + g[k + 1]) - params.f * volume
        worst = max(worst, defect)
    return worst


def criterion_energy_dissipation() -> list[Check]:
    """Per-step defect of the L2-energy inequality, and its decay under dt halving."""
    grid = make_grid(2, (1.0, 1.0), (64, 64))
    params = ModelParams(d1=0.05, d2=0.05, f=0.04, kappa=0.06)
    table = build_kernel_table(KernelSpec(profile=bump_profile(1.0), scale_j=8), grid)
    op = make_operator(table)
    u0, v0 = perturbed_semi_trivial(grid, params, v_amplitude=0.5, u_dip=0.5, width_frac=0.1)
    initial = State(t=0.0, u=u0, v=v0)
    box = apriori_box(params, norm(u0, "sup"), norm(v0, "sup"), table.gamma_inf)
    dt = _round_dt(stability_bound(params, table.gamma_inf, box), 10.0)
    from .limit import _with_diffusivity

    term_u = nonlocal_term(_with_diffusivity(op, params.d1))
    term_v = nonlocal_term(_with_diffusivity(op, params.d2))

    worsts = []
    for step_dt in (dt, dt / 2.0):
        cfg = IntegratorConfig(dt=step_dt, t_end=10.0, snapshot_every=1, monitor_every=10**9)
        traj = integrate(initial, params, term_u, term_v, cfg, gamma_inf=table.gamma_inf)
        worsts.append(_energy_defect(traj, params, op, grid.volume))
    improved = worsts[1] <= max(worsts[0] / 3.0, 1e-12)
    return [
        _check_le("energy: worst per-step defect of the dissipation inequality", worsts[0], 1e-3),
        _check("energy: halving dt cuts the worst defect by >= 3x", improved,
               worsts[1], worsts[0] / 3.0),
    ]


def criterion_diffusive_limit() -> list[Check]:
    """Scale-ladder errors against the classical run, plus the weak-form residual."""
    grid = make_grid(2, (1.0, 1.0), (64, 64))
    params = ModelParams(d1=1.0, d2=1.0, f=0.04, kappa=0.01)
    profile = bump_profile(1.0)
    u0, v0 = perturbed_semi_trivial(grid, params, v_amplitude=0.5, u_dip=0.5, width_frac=0.15)
    initial = State(t=0.0, u=u0, v=v0)
    study = LimitStudyConfig(
        params=params, grid=grid, profile=profile, j_ladder=(4, 8, 16), t_end=1.0,
        snapshot_count=41,
    )
    report = run_limit_study(study, initial)
    eu, ev = report.spacetime_l2_err_u, report.spacetime_l2_err_v
    checks = [
        _check("limit: space-time errors strictly decreasing in j (u)",
               report.monotone_u, eu[16], eu[4]),
        _check("limit: space-time errors strictly decreasing in j (v)",
               report.monotone_v, ev[16], ev[4]),
        _check_le("limit: err_u(16) / err_u(4)", eu[16] / eu[4], 0.5),
        _check_le("limit: err_v(16) / err_v(4)", ev[16] / ev[4], 0.5),
    ]

    m2 = report.m2
    from .local import effective_laplacians

    fine = make_grid(2, (1.0, 1.0), (64, 64))
    lf = reaction_lipschitz(params, *apriori_box(params, 1.0, 0.5, 0.0))
    L1, L2 = effective_laplacians(fine, params, m2)
    bound = max_dt_from_stiffness(max(L1.stiffness, L2.stiffness), lf)
    # Even step count on the fine grid, so the coarse run can take dt twice as
    # large; the snapshot stride is fixed, so the snapshot spacing halves too.
    n_fine = 2 * int(math.ceil(1.0 / (2.0 * bound)))
    snap_stride = 8
    resids = []
    for counts, n in ((32, n_fine // 2), (64, n_fine)):
        g = make_grid(2, (1.0, 1.0), (counts, counts))
        uu, vv = perturbed_semi_trivial(g, params, v_amplitude=0.5, u_dip=0.5, width_frac=0.15)
        cfg = IntegratorConfig(dt=1.0 / n, t_end=1.0, snapshot_every=snap_stride,
                               monitor_every=n)
        traj = integrate_local(State(t=0.0, u=uu, v=vv), params, cfg, m2)
        # Zero normal derivative on the box boundary, and not orthogonal to the
        # centered initial data, so the residual terms are genuinely nonzero.
        theta = field_from_function(g, lambda x, y: 1.0 + np.cos(2 * np.pi * x) * np.cos(2 * np.pi * y))
        resids.append(weak_residual(traj, theta, "u", params, m2))
    checks.append(_check_le("limit: weak-form residual on the fine grid", resids[1], 1e-2))
    checks.append(
        _check_le("limit: fine/coarse weak-residual ratio under h,dt halving",
                  resids[1] / resids[0], 1.0 / 3.0)
    )
    return checks


def criterion_dissipation_functionals() -> list[Check]:
    """Pair-sum dissipation vs the quadratic form, the difference-quotient
    seminorm, and a brute-force double-loop oracle."""
    grid = make_grid(2, (1.0, 1.0), (32, 32))
    profile = bump_profile(1.0)
    table = build_kernel_table(KernelSpec(profile=profile, scale_j=4), grid)
    op = make_operator(table)
    _, m2 = kernel_moments(profile, 2)
    rng = np.random.default_rng(11)
    worst_lambda = 0.0
    worst_quad = 0.0
    for _ in range(10):
        z = Field(grid=grid, values=rng.standard_normal(grid.shape))
        y = dissipation(op, z)
        lam = seminorm_lambda(profile, 4, z)
        worst_lambda = max(worst_lambda, abs(lam - y / m2) / (y / m2))
        quad = dissipation_fast(op, z)
        worst_quad = max(worst_quad, abs(y - quad) / abs(y))

    small = make_grid(2, (1.0, 1.0), (8, 8))
    t2 = build_kernel_table(KernelSpec(profile=profile, scale_j=2), small)
    op2 = make_operator(t2)
    z = Field(grid=small, values=rng.standard_normal(small.shape))
    y_fast = dissipation(op2, z)
    y_brute = _dissipation_bruteforce(profile, 2, z)
    rel_brute = abs(y_fast - y_brute) / abs(y_brute)
    return [
        _check_le("dissipation: |Lambda - Y/m2| relative", worst_lambda, 1e-12),
        _check_le("dissipation: |Y + 2<z, Gamma z>| relative", worst_quad, 1e-10),
        _check_le("dissipation: pair sum vs brute-force O(N^2) oracle", rel_brute, 1e-12),
    ]


def _dissipation_bruteforce(profile, j: int, z: Field) -> float:
    """O(N^2) double loop straight from the double-integral definition."""
    grid = z.grid
    n = grid.dim
    coords = [c.reshape(-1) for c in grid.meshgrid()]
    vals = z.values.reshape(-1)
    scale = float(j) ** (n + 2)
    total = 0.0
    N = vals.size
    for a in range(N):
        for b in range(N):
            dist = math.hypot(*(coords[ax][a] - coords[ax][b] for ax in range(n)))
            w = scale * float(profile(j * dist))
            diff = vals[a] - vals[b]
            total += w * diff * diff
    return total * grid.cell_measure**2


def criterion_fast_dense_agreement() -> list[Check]:
    """Fast convolution path against the dense reference matrix, both modes."""
    grid = make_grid(2, (1.0, 1.0), (32, 32))
    profile = bump_profile(1.0)
    rng = np.random.default_rng(13)
    worst = 0.0
    for mode in (NEUMANN, DIRICHLET):
        for j in (4, 8):
            table = build_kernel_table(KernelSpec(profile=profile, scale_j=j, boundary_mode=mode), grid)
            op = make_operator(table)
            z = Field(grid=grid, values=rng.standard_normal(grid.shape))
            fast = apply_values(op, z.values)
            dense = apply_dense(op, z).values
            rel = float(np.max(np.abs(fast - dense))) / float(np.max(np.abs(dense)))
            worst = max(worst, rel)
    return [_check_le("paths: fast vs dense relative disagreement", worst, 1e-12)]


CRITERIA = {
    1: criterion_contraction,
    2: criterion_constants,
    3: criterion_quadratic_identity,
    4: criterion_apriori_bounds,
    5: criterion_stabilization,
    6: criterion_steady_states,
    7: criterion_energy_dissipation,
    8: criterion_diffusive_limit,
    9: criterion_dissipation_functionals,
    10: criterion_fast_dense_agreement,
}

SUITES = {
    "operator": (1, 2, 3, 9, 10),
    "bounds": (4, 7),
    "decay": (5,),
    "dirichlet": (2,),
    "limit": (8,),
    "steady": (6,),
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    checks: list[Check] = []
    for idx in SUITES[name]:
        checks.extend(CRITERIA[idx]())
    return checks
