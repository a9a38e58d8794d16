"""JSON run configuration: strict parsing with unknown-key rejection.

The resolved configuration is embedded verbatim in every output directory so
a run can be reproduced from its artifacts alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .grid import Field, Grid, load_field, make_grid
from .integrator import IntegratorConfig, State
from .kernels import (
    BOUNDARY_MODES,
    KernelSpec,
    PROFILES,
    RadialProfile,
)
from .local import DIRICHLET_BC, NEUMANN_BC
from .model import ModelParams
from .presets import PRESETS, make_initial


class ConfigError(ValueError):
    pass


def _require_keys(obj: dict, where: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - required - optional
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def parse_model(obj: dict) -> ModelParams:
    _require_keys(obj, "model", {"d1", "d2", "f", "kappa"})
    try:
        return ModelParams(**{k: float(obj[k]) for k in ("d1", "d2", "f", "kappa")})
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def parse_space(obj: dict) -> Grid:
    _require_keys(obj, "space", {"dim", "extents", "counts"})
    try:
        return make_grid(obj["dim"], obj["extents"], obj["counts"])
    except ValueError as exc:
        raise ConfigError(f"space: {exc}") from exc


def parse_profile(obj: dict) -> RadialProfile:
    _require_keys(obj, "profile", {"name"}, {"radius"})
    name = obj["name"]
    if name not in PROFILES:
        raise ConfigError(f"profile: unknown profile {name!r}; known: {sorted(PROFILES)}")
    return PROFILES[name](float(obj.get("radius", 1.0)))


@dataclass(frozen=True)
class KernelChoice:
    """Either a nonlocal kernel spec or a local-Laplacian spec."""

    kind: str  # "nonlocal" | "laplacian"
    spec: KernelSpec | None = None
    bc: str | None = None


def parse_kernel(obj: dict) -> KernelChoice:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError("kernel: missing 'type' (nonlocal | laplacian)")
    if obj["type"] == "nonlocal":
        _require_keys(obj, "kernel", {"type", "profile", "j"}, {"radius", "boundary_mode"})
        profile = parse_profile({"name": obj["profile"], "radius": obj.get("radius", 1.0)})
        mode = obj.get("boundary_mode", "neumann_nonlocal")
        if mode not in BOUNDARY_MODES:
            raise ConfigError(f"kernel: unknown boundary_mode {mode!r}")
        return KernelChoice(
            kind="nonlocal",
            spec=KernelSpec(profile=profile, scale_j=int(obj["j"]), boundary_mode=mode),
        )
    if obj["type"] == "laplacian":
        _require_keys(obj, "kernel", {"type"}, {"bc", "profile", "radius"})
        bc = obj.get("bc", NEUMANN_BC)
        if bc not in (NEUMANN_BC, DIRICHLET_BC):
            raise ConfigError(f"kernel: unknown bc {bc!r}")
        # The profile still matters: it sets m2 and hence the diffusivities.
        profile = parse_profile(
            {"name": obj.get("profile", "bump"), "radius": obj.get("radius", 1.0)}
        )
        return KernelChoice(kind="laplacian", bc=bc, spec=KernelSpec(profile=profile, scale_j=1))
    raise ConfigError(f"kernel: unknown type {obj['type']!r}")


def parse_integrator(obj: dict) -> tuple[IntegratorConfig | None, dict]:
    _require_keys(
        obj,
        "integrator",
        {"t_end"},
        {"scheme", "dt", "snapshot_every", "monitor_every", "postol", "montol", "safety"},
    )
    raw = {
        "scheme": obj.get("scheme", "rk4_explicit"),
        "t_end": float(obj["t_end"]),
        "snapshot_every": int(obj.get("snapshot_every", 0)),
        "monitor_every": int(obj.get("monitor_every", 1)),
        "postol": float(obj.get("postol", 1e-10)),
        "montol": float(obj.get("montol", 1e-6)),
        "safety": float(obj.get("safety", 0.5)),
    }
    dt = obj.get("dt", "auto")
    if dt == "auto":
        return None, raw  # dt resolved later from the stability bound
    try:
        return IntegratorConfig(dt=float(dt), **raw), raw
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc


def parse_initial(obj: dict, grid: Grid, params: ModelParams) -> tuple[State, dict]:
    if not isinstance(obj, dict):
        raise ConfigError("initial: expected an object")
    if "snapshot" in obj:
        _require_keys(obj, "initial", {"snapshot"})
        snap = obj["snapshot"]
        _require_keys(snap, "initial.snapshot", {"u", "v"})
        u, meta_u = load_field(snap["u"])
        v, meta_v = load_field(snap["v"])
        if u.grid != grid or v.grid != grid:
            raise ConfigError("initial.snapshot: snapshot grid does not match space")
        if meta_u["time"] != meta_v["time"]:
            raise ConfigError("initial.snapshot: u and v snapshots have different times")
        return State(t=float(meta_u["time"]), u=u, v=v), obj
    if "preset" not in obj:
        raise ConfigError("initial: need either 'preset' or 'snapshot'")
    options = {k: v for k, v in obj.items() if k != "preset"}
    if obj["preset"] not in PRESETS:
        raise ConfigError(f"initial: unknown preset {obj['preset']!r}")
    try:
        u, v = make_initial(grid, params, obj["preset"], **options)
    except TypeError as exc:
        raise ConfigError(f"initial: bad options for preset {obj['preset']!r}: {exc}") from exc
    return State(t=0.0, u=u, v=v), obj


KNOWN_MONITORS = ("positivity", "u_bound", "uv_bound", "decay")


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    params: ModelParams
    grid: Grid
    kernel: KernelChoice
    integrator: IntegratorConfig | None  # None while dt is still "auto"
    integrator_raw: dict
    initial: State
    monitors: tuple[str, ...]


def parse_run_config(doc: dict) -> RunConfig:
    _require_keys(
        doc, "config", {"model", "space", "kernel", "integrator", "initial"}, {"monitors", "output"}
    )
    params = parse_model(doc["model"])
    grid = parse_space(doc["space"])
    kernel = parse_kernel(doc["kernel"])
    integ, integ_raw = parse_integrator(doc["integrator"])
    initial, _ = parse_initial(doc["initial"], grid, params)
    monitors = tuple(doc.get("monitors", ["positivity", "u_bound", "uv_bound"]))
    for m in monitors:
        if m not in KNOWN_MONITORS:
            raise ConfigError(f"monitors: unknown monitor {m!r}; known: {KNOWN_MONITORS}")
    return RunConfig(
        raw=doc,
        params=params,
        grid=grid,
        kernel=kernel,
        integrator=integ,
        integrator_raw=integ_raw,
        initial=initial,
        monitors=monitors,
    )


def load_run_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_run_config(doc)


def parse_limit_config(doc: dict) -> tuple[dict, State]:
    """Parse a scale-ladder study config; returns the study keyword arguments
    (everything LimitStudyConfig needs except workers) and the initial state."""
    _require_keys(
        doc,
        "config",
        {"model", "space", "profile", "j_ladder", "t_end", "initial"},
        {"dt", "snapshot_count", "scheme", "safety", "workers"},
    )
    params = parse_model(doc["model"])
    grid = parse_space(doc["space"])
    profile = parse_profile(doc["profile"])
    ladder = doc["j_ladder"]
    if not isinstance(ladder, list) or not all(isinstance(j, int) for j in ladder):
        raise ConfigError("j_ladder: expected a list of integers")
    initial, _ = parse_initial(doc["initial"], grid, params)
    dt = doc.get("dt", None)
    kwargs = {
        "params": params,
        "grid": grid,
        "profile": profile,
        "j_ladder": tuple(ladder),
        "t_end": float(doc["t_end"]),
        "dt": None if dt in (None, "auto") else float(dt),
        "snapshot_count": int(doc.get("snapshot_count", 50)),
        "scheme": doc.get("scheme", "rk4_explicit"),
        "safety": float(doc.get("safety", 0.5)),
        "workers": int(doc.get("workers", 1)),
    }
    return kwargs, initial


def parse_any(path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
