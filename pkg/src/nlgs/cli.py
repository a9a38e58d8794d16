"""Command-line entry point.

Subcommands:
    simulate      run one simulation from a JSON config
    limit-study   scale-ladder comparison against the classical reference
    steady-states homogeneous steady states for given feed/kill rates
    kernel-info   kernel table summary on a given grid
    verify        run a named suite of invariant checks

Exit codes: 0 success, 1 usage or check failure, 2 simulation finished but an
invariant monitor flagged a violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import (
    ConfigError,
    RunConfig,
    parse_any,
    parse_limit_config,
    parse_run_config,
)
from .grid import save_field
from .integrator import (
    MONITOR_COLUMNS,
    IntegratorConfig,
    apriori_box,
    integrate,
    max_dt_from_stiffness,
    nonlocal_term,
    reaction_lipschitz,
    stability_bound,
)
from .kernels import build_kernel_table, kernel_moments
from .limit import LimitStudyConfig, _with_diffusivity, run_limit_study
from .local import effective_laplacians, laplacian_term
from .model import ModelParams, classify_stability_homogeneous, steady_states
from .operator import make_operator
from .verify import SUITES, run_suite


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("NLGS_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"NLGS_THREADS={env!r} is not an integer") from None
    return 1


def _load_run(args) -> RunConfig:
    doc = parse_any(args.config)
    if args.seed is not None:
        init = doc.get("initial")
        if isinstance(init, dict) and init.get("preset") == "random_seeded":
            init["seed"] = args.seed
        else:
            raise ConfigError("--seed only applies to the random_seeded preset")
    return parse_run_config(doc)


def _build_run(cfg: RunConfig):
    """Terms, per-run metadata, and the dt stability ceiling for a run config."""
    params = cfg.params
    u0_sup = float(np.max(cfg.initial.u.values))
    v0_sup = float(np.max(cfg.initial.v.values))
    if cfg.kernel.kind == "nonlocal":
        table = build_kernel_table(cfg.kernel.spec, cfg.grid)
        op = make_operator(table)
        term_u = nonlocal_term(_with_diffusivity(op, params.d1))
        term_v = nonlocal_term(_with_diffusivity(op, params.d2))
        box = apriori_box(params, u0_sup, v0_sup, table.gamma_inf)
        dt_max = stability_bound(params, table.gamma_inf, box)
        meta = {"kind": "nonlocal", **table.summary()}
        return term_u, term_v, table.gamma_inf, dt_max, meta
    _, m2 = kernel_moments(cfg.kernel.spec.profile, cfg.grid.dim)
    L1, L2 = effective_laplacians(cfg.grid, params, m2, cfg.kernel.bc)
    box = apriori_box(params, u0_sup, v0_sup, 0.0)
    lf = reaction_lipschitz(params, *box)
    dt_max = max_dt_from_stiffness(max(L1.stiffness, L2.stiffness), lf)
    meta = {"kind": "laplacian", "bc": cfg.kernel.bc, "m2": m2,
            "D1": L1.diffusivity, "D2": L2.diffusivity}
    return laplacian_term(L1), laplacian_term(L2), None, dt_max, meta


def _resolve_dt(cfg: RunConfig, dt_max: float) -> IntegratorConfig:
    if cfg.integrator is not None:
        return cfg.integrator
    raw = cfg.integrator_raw
    span = raw["t_end"] - cfg.initial.t
    steps = max(1, int(np.ceil(span / dt_max)))
    return IntegratorConfig(dt=span / steps, **raw)


def _write_monitor_csv(path: Path, monitor: dict) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MONITOR_COLUMNS)
        for row in zip(*(monitor[c] for c in MONITOR_COLUMNS)):
            writer.writerow([f"{x:.17g}" for x in row])


def _write_snapshots(out: Path, states, prefix: str = "") -> None:
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for k, state in enumerate(states):
        for name in ("u", "v"):
            field = getattr(state, name)
            save_field(snap_dir / f"{prefix}{name}_{k:06d}.bin", field,
                       time=state.t, name=name)


def cmd_simulate(args) -> int:
    cfg = _load_run(args)
    term_u, term_v, gamma_inf, dt_max, meta = _build_run(cfg)
    run_cfg = _resolve_dt(cfg, dt_max)
    if run_cfg.dt > dt_max * (1.0 + 1e-12):
        raise ConfigError(f"dt={run_cfg.dt:g} exceeds the stability bound {dt_max:g}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    traj = integrate(cfg.initial, cfg.params, term_u, term_v, run_cfg,
                     monitors=cfg.monitors, gamma_inf=gamma_inf)
    elapsed = time.perf_counter() - start

    resolved = dict(cfg.raw)
    resolved["integrator"] = {**cfg.integrator_raw, "dt": run_cfg.dt}
    with open(out / "config.json", "w") as fh:
        json.dump(resolved, fh, indent=2)
    _write_monitor_csv(out / "monitor.csv", traj.monitor)
    _write_snapshots(out, traj.states)
    report = {
        "dt": run_cfg.dt,
        "dt_stability_bound": dt_max,
        "t_final": traj.final.t,
        "snapshots": len(traj.states),
        "threads": _resolve_threads(args),
        "wall_clock_s": elapsed,
        "diffusion": meta,
        "violations": [
            {"monitor": name, "t": t, "value": value}
            for name, t, value in traj.violations
        ],
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2)

    if traj.violations:
        name, t, value = traj.violations[0]
        print(f"violation: monitor={name} t={t:.6g} value={value:.6g} "
              f"({len(traj.violations)} total); details in {out / 'report.json'}")
        return 2
    print(f"ok: t={traj.final.t:g} steps with dt={run_cfg.dt:g}, "
          f"outputs in {out}")
    return 0


def cmd_limit_study(args) -> int:
    kwargs, initial = parse_limit_config(parse_any(args.config))
    threads = _resolve_threads(args)
    if threads > 1:
        kwargs["workers"] = threads
    study = LimitStudyConfig(**kwargs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = run_limit_study(study, initial)

    with open(out / "report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    with open(out / "errors.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "spacetime_l2_err_u", "spacetime_l2_err_v",
                         "final_l2_err_u", "final_l2_err_v"])
        for j in study.j_ladder:
            writer.writerow([j, report.spacetime_l2_err_u[j], report.spacetime_l2_err_v[j],
                             report.final_l2_err_u[j], report.final_l2_err_v[j]])
    for label, traj in report.trajectories.items():
        _write_monitor_csv(out / f"monitor_{label}.csv", traj.monitor)
        _write_snapshots(out, [traj.final], prefix=f"{label}_")
    print(f"ok: ladder {list(study.j_ladder)}, err_u "
          f"{[f'{report.spacetime_l2_err_u[j]:.3e}' for j in study.j_ladder]}, "
          f"outputs in {out}")
    return 0


def cmd_steady_states(args) -> int:
    params = ModelParams(d1=args.d1, d2=args.d2, f=args.f, kappa=args.kappa)
    report = steady_states(params)
    doc = report.to_dict()
    doc["stability"] = [
        classify_stability_homogeneous(params, s) for s in report.states
    ]
    json.dump(doc, sys.stdout, indent=2)
    print()
    return 0


def cmd_kernel_info(args) -> int:
    from .config import parse_profile
    from .kernels import KernelSpec

    grid = _grid_from_args(args)
    profile = parse_profile({"name": args.profile, "radius": args.radius})
    spec = KernelSpec(profile=profile, scale_j=args.j, boundary_mode=args.boundary_mode)
    table = build_kernel_table(spec, grid)
    doc = table.summary()
    doc.update(
        boundary_mode=spec.boundary_mode,
        support_radius=spec.support_radius,
        grid={"dim": grid.dim, "extents": list(grid.extents), "counts": list(grid.counts)},
        operator_norm_bound=2.0 * table.gamma_inf,
        effective_diffusivity_per_unit_d=table.m2 / (2 * grid.dim),
    )
    json.dump(doc, sys.stdout, indent=2)
    print()
    return 0


def _grid_from_args(args):
    from .grid import make_grid

    extents = [float(x) for x in args.extents.split(",")]
    counts = [int(x) for x in args.counts.split(",")]
    return make_grid(len(extents), extents, counts)


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    failed = 0
    for name in names:
        print(f"suite {name}:")
        for check in run_suite(name):
            print("  " + check.line())
            failed += 0 if check.passed else 1
    if failed:
        print(f"{failed} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlgs",
        description="Nonlocal two-species reaction-diffusion simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation from a JSON config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: NLGS_THREADS or 1)")
    sim.add_argument("--seed", type=int, default=None,
                     help="override the seed of the random_seeded preset")
    sim.set_defaults(fn=cmd_simulate)

    study = sub.add_parser("limit-study", help="scale ladder vs the classical reference")
    study.add_argument("--config", required=True)
    study.add_argument("--out", required=True)
    study.add_argument("--threads", type=int, default=None)
    study.set_defaults(fn=cmd_limit_study)

    steady = sub.add_parser("steady-states", help="homogeneous steady states")
    steady.add_argument("--f", type=float, required=True, dest="f")
    steady.add_argument("--kappa", type=float, required=True)
    steady.add_argument("--d1", type=float, default=1.0)
    steady.add_argument("--d2", type=float, default=1.0)
    steady.set_defaults(fn=cmd_steady_states)

    kinfo = sub.add_parser("kernel-info", help="kernel table summary on a grid")
    kinfo.add_argument("--profile", default="bump")
    kinfo.add_argument("--radius", type=float, default=1.0)
    kinfo.add_argument("--j", type=int, required=True)
    kinfo.add_argument("--boundary-mode", default="neumann_nonlocal")
    kinfo.add_argument("--extents", default="1.0,1.0",
                       help="comma-separated box side lengths")
    kinfo.add_argument("--counts", default="64,64",
                       help="comma-separated cell counts")
    kinfo.set_defaults(fn=cmd_kernel_info)

    ver = sub.add_parser("verify", help="run a named invariant-check suite")
    ver.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    ver.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
