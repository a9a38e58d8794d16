import json

import pytest

from nlgs.config import (
    ConfigError,
    load_run_config,
    parse_limit_config,
    parse_run_config,
)
from nlgs.grid import constant_field, make_grid, save_field


def base_doc():
    return {
        "model": {"d1": 0.1, "d2": 0.1, "f": 0.04, "kappa": 0.01},
        "space": {"dim": 2, "extents": [1.0, 1.0], "counts": [32, 32]},
        "kernel": {"type": "nonlocal", "profile": "bump", "j": 4},
        "integrator": {"t_end": 1.0, "dt": 0.01},
        "initial": {"preset": "semi_trivial"},
    }


def test_happy_path():
    cfg = parse_run_config(base_doc())
    assert cfg.params.f == 0.04
    assert cfg.grid.counts == (32, 32)
    assert cfg.kernel.kind == "nonlocal"
    assert cfg.kernel.spec.scale_j == 4
    assert cfg.integrator.dt == 0.01
    assert cfg.initial.t == 0.0
    assert cfg.monitors == ("positivity", "u_bound", "uv_bound")


def test_auto_dt_defers_integrator():
    doc = base_doc()
    doc["integrator"]["dt"] = "auto"
    cfg = parse_run_config(doc)
    assert cfg.integrator is None
    assert cfg.integrator_raw["t_end"] == 1.0
    del doc["integrator"]["dt"]  # omitted dt means auto as well
    assert parse_run_config(doc).integrator is None


def test_unknown_keys_rejected_at_every_level():
    doc = base_doc()
    doc["extra"] = 1
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_run_config(doc)

    doc = base_doc()
    doc["model"]["gamma"] = 2.0
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_run_config(doc)

    doc = base_doc()
    doc["integrator"]["step"] = 0.1
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_run_config(doc)


def test_missing_keys_rejected():
    doc = base_doc()
    del doc["model"]["kappa"]
    with pytest.raises(ConfigError, match="missing keys"):
        parse_run_config(doc)


def test_bad_values_rejected():
    doc = base_doc()
    doc["model"]["f"] = -0.04
    with pytest.raises(ConfigError, match="model"):
        parse_run_config(doc)

    doc = base_doc()
    doc["kernel"]["boundary_mode"] = "weird"
    with pytest.raises(ConfigError, match="boundary_mode"):
        parse_run_config(doc)

    doc = base_doc()
    doc["initial"] = {"preset": "no_such_preset"}
    with pytest.raises(ConfigError, match="preset"):
        parse_run_config(doc)

    doc = base_doc()
    doc["monitors"] = ["positivity", "energy"]
    with pytest.raises(ConfigError, match="monitor"):
        parse_run_config(doc)


def test_laplacian_kernel_choice():
    doc = base_doc()
    doc["kernel"] = {"type": "laplacian", "bc": "neumann"}
    cfg = parse_run_config(doc)
    assert cfg.kernel.kind == "laplacian"
    assert cfg.kernel.bc == "neumann"


def test_snapshot_initial(tmp_path):
    grid = make_grid(2, (1.0, 1.0), (32, 32))
    up, vp = tmp_path / "u.bin", tmp_path / "v.bin"
    save_field(up, constant_field(grid, 1.0), time=2.5)
    save_field(vp, constant_field(grid, 0.1), time=2.5)
    doc = base_doc()
    doc["initial"] = {"snapshot": {"u": str(up), "v": str(vp)}}
    doc["integrator"]["t_end"] = 3.5
    cfg = parse_run_config(doc)
    assert cfg.initial.t == 2.5
    assert cfg.initial.v.values[0, 0] == 0.1

    # grid mismatch is refused
    doc["space"]["counts"] = [16, 16]
    with pytest.raises(ConfigError, match="grid"):
        parse_run_config(doc)


def test_snapshot_time_mismatch(tmp_path):
    grid = make_grid(2, (1.0, 1.0), (32, 32))
    up, vp = tmp_path / "u.bin", tmp_path / "v.bin"
    save_field(up, constant_field(grid, 1.0), time=1.0)
    save_field(vp, constant_field(grid, 0.1), time=2.0)
    doc = base_doc()
    doc["initial"] = {"snapshot": {"u": str(up), "v": str(vp)}}
    with pytest.raises(ConfigError, match="different times"):
        parse_run_config(doc)


def test_json_errors_carry_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "model": oops\n}\n')
    with pytest.raises(ConfigError, match="line 2"):
        load_run_config(path)


def test_limit_config():
    doc = {
        "model": {"d1": 1.0, "d2": 1.0, "f": 0.04, "kappa": 0.01},
        "space": {"dim": 2, "extents": [1.0, 1.0], "counts": [32, 32]},
        "profile": {"name": "bump"},
        "j_ladder": [4, 8],
        "t_end": 0.5,
        "initial": {"preset": "perturbed_semi_trivial"},
    }
    kwargs, initial = parse_limit_config(doc)
    assert kwargs["j_ladder"] == (4, 8)
    assert kwargs["dt"] is None
    assert initial.t == 0.0

    doc["j_ladder"] = [4, "8"]
    with pytest.raises(ConfigError, match="j_ladder"):
        parse_limit_config(doc)
