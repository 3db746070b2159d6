import json

import pytest

from monojac import __version__
from monojac.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from monojac.config import ConfigError, parse_config
from monojac.presets import PRESETS, get_preset


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_every_preset_parses():
    for name, doc in PRESETS.items():
        cfg = parse_config(get_preset(name))
        assert cfg.command == doc["command"]
        assert len(cfg.hash) == 64


def test_presets_are_copies():
    get_preset("duality-shared-ratio")["duality"]["species"].append([9, 9])
    assert len(get_preset("duality-shared-ratio")["duality"]["species"]) == 2


def test_exact_hand_preset_report(tmp_path):
    assert run(tmp_path, "verify-jacobi", "--preset", "jacobi-exact-hand") == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["version"] == __version__ and report["passed"]
    assert report["result"]["direct_residual"]["polynomial"] == "3"
    assert "time" not in json.dumps(report).lower().replace("time_", "")


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["duality", "--preset", "duality-grid", "--out", str(out)]) == EXIT_OK
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_seed_changes_the_hash(tmp_path):
    main(["verify-jacobi", "--preset", "jacobi-exact-hand", "--out", str(tmp_path / "a")])
    main(["verify-jacobi", "--preset", "jacobi-exact-hand", "--seed", "7",
          "--out", str(tmp_path / "b")])
    ha = json.loads((tmp_path / "a" / "report.json").read_text())["config_hash"]
    hb = json.loads((tmp_path / "b" / "report.json").read_text())["config_hash"]
    assert ha != hb


def test_violation_exit_code(tmp_path):
    cfg = get_preset("radial-passthrough")
    cfg["simulate"]["params"]["X_e"] = [1.0, 0.3, 0.0]
    path = tmp_path / "aim.json"
    path.write_text(json.dumps(cfg))
    assert run(tmp_path, "simulate", "--config", str(path)) == EXIT_VIOLATION
    assert (tmp_path / "trajectory.csv").read_text().startswith("step,time,x,y,z")


def test_csv_series_written(tmp_path):
    assert run(tmp_path, "simulate", "--preset", "radial-passthrough") == EXIT_OK
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert len(lines) == 1 + 1 + get_preset("radial-passthrough")["simulate"]["params"]["steps"]


@pytest.mark.parametrize("args", [
    ["verify-jacobi"],
    ["verify-jacobi", "--preset", "no-such-preset"],
    ["verify-jacobi", "--preset", "radial-passthrough"],
    ["simulate", "--preset", "radial-passthrough", "--tier", "exact"],
    ["duality", "--preset", "duality-grid", "--tolerance", "-1"],
    ["duality", "--preset", "duality-grid", "--seed", "-1"],
])
def test_usage_errors(tmp_path, args):
    assert run(tmp_path, *args) == EXIT_USAGE


def test_no_command_is_a_usage_error():
    assert main([]) == EXIT_USAGE


def test_list_presets(capsys):
    assert main(["--list-presets"]) == EXIT_OK
    out = capsys.readouterr().out
    assert all(name in out for name in PRESETS)


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "duality", "--config", str(bad)) == EXIT_USAGE


@pytest.mark.parametrize("doc", [
    {"command": "duality", "duality": {"species": [[1, 0]], "colour": 1}},
    {"command": "duality", "duality": {"species": []}},
    {"command": "duality", "duality": {"species": [[1, "x"]]}},
    {"command": "duality", "duality": {"species": [[1, 0]]}, "extra": 1},
    {"command": "duality", "seed": 2**64, "duality": {"species": [[1, 0]]}},
    {"command": "fly"},
    {"command": "casimir", "casimir": {"mode": "sideways"}},
    {"command": "casimir", "casimir": {"dt": 0}},
    {"command": "simulate", "simulate": {"experiment": "warp"}},
    {"command": "simulate", "simulate": {"experiment": "radial_passthrough", "params": {"m_e": -1}}},
    {"command": "simulate", "simulate": {"experiment": "field"}},
    {"command": "verify-jacobi", "verify_jacobi": {"tier": "grid"}},
    {"command": "verify-jacobi", "verify_jacobi": {"tier": "exact", "exact": {"mode": "explicit"}}},
    {"command": "verify-jacobi", "verify_jacobi": {"tier": "exact", "exact": {"trials": 0}}},
])
def test_config_validation(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_grid_config_validation():
    doc = get_preset("jacobi-grid-divergent-small")
    grid = doc["verify_jacobi"]["grid"]
    grid["functionals"] = grid["functionals"][:2]
    with pytest.raises(ConfigError):
        parse_config(doc)
    doc = get_preset("jacobi-grid-solenoidal")
    del doc["verify_jacobi"]["grid"]["reference_B"]
    with pytest.raises(ConfigError):
        parse_config(doc)
    doc = get_preset("jacobi-grid-solenoidal")
    doc["verify_jacobi"]["grid"]["state"]["B"] = ["0", "0", "0"]
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_explicit_exact_config(tmp_path):
    doc = {"command": "verify-jacobi", "verify_jacobi": {"tier": "exact", "exact": {
        "mode": "explicit", "c": "2",
        "particles": [{"label": "e", "mass": "1/2", "electric_charge": "1"}],
        "B": ["x1^2", "0", "0"], "functionals": ["Ve1", "Ve2", "Ve3"]}}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    assert run(tmp_path, "verify-jacobi", "--config", str(path)) == EXIT_OK
    result = json.loads((tmp_path / "report.json").read_text())["result"]
    # (e div B)/(m^3 c) = 2 x1 / (1/8 * 2) = 8 x1 at the particle
    assert result["direct_residual"]["polynomial"] == "8*Xe1"
