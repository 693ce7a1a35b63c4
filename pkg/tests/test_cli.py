import json
import shutil

import pytest
import yaml

from elastoharvest import __version__
from elastoharvest.cli import dispatch, main
from elastoharvest.config import parse_config
from elastoharvest.errors import ConfigError


def write(tmp_path, data, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


BASE = {"material": "default", "geometry": {"x10_m": 1e-2, "x20_m": 1e-2, "x30_m": 1e-3}}


def test_replication_fixture_parses(configs):
    cfg = parse_config(configs / "replicate_membrane_2kv.yaml")
    assert cfg.block("cycle")["lam_p"] == 4.0
    assert cfg.block("cycle")["mode"] == "constant_voltage"
    assert cfg.geometry.x30 == 1e-3


@pytest.mark.parametrize("name", ["envelope_default", "design_sweep", "dynamics_step",
                                  "circuit_ramp", "fit_example"])
def test_shipped_configs_parse(configs, name):
    parse_config(configs / f"{name}.yaml")


def test_negative_thickness_named(tmp_path):
    data = dict(BASE, geometry={"x10_m": 1e-2, "x20_m": 1e-2, "x30_m": -1})
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, data))
    assert any("x30_m" in e for e in info.value.errors)


def test_exclusive_modes(tmp_path):
    data = dict(BASE, cycle={"lam_p": 3.0, "constant_voltage": True, "constant_charge": True})
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, data))
    assert any("mutually exclusive" in e for e in info.value.errors)


def test_all_errors_reported(tmp_path):
    data = dict(BASE, geometry={"x10_m": 0, "x20_m": 1e-2, "x30_m": -1},
                cycle={"lam_p": 0.5, "colour": 1}, bogus=1)
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, data))
    assert len(info.value.errors) == 5


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "absent.yaml")


def test_missing_referenced_file(tmp_path):
    data = dict(BASE, material="nowhere.yaml", fit={"tensile_csv": "nowhere.csv"})
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, data))
    assert len(info.value.errors) == 2


def test_unknown_subcommand_is_usage_error(configs):
    with pytest.raises(SystemExit) as info:
        main(["explode", "--config", str(configs / "envelope_default.yaml")])
    assert info.value.code != 0


def test_config_error_exit_code(tmp_path, capsys):
    path = write(tmp_path, dict(BASE, geometry={"x10_m": 1}))
    code = main(["cycle", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 2
    report = json.loads((tmp_path / "o" / "error_report.json").read_text())
    assert report["error"] == "ConfigError"
    assert len(report["messages"]) == 2
    assert json.loads(capsys.readouterr().err)["exit_code"] == 2


def test_infeasible_exit_code(tmp_path):
    path = write(tmp_path, dict(BASE, cycle={"lam_p": 4.0, "lam_act": 2.0, "poling_voltage_v": 10.0}))
    code = main(["cycle", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 3
    report = json.loads((tmp_path / "o" / "error_report.json").read_text())
    assert report["criterion"] == "yield"
    assert report["module"] == "cycle"


def test_numerical_failure_exit_code(tmp_path):
    circuit = {"r_e_ohm": 1e7, "r_mes_ohm": 1e5, "source": [[0.0, 0.0, True]],
               "capacitance_profile": [[0.0, 1e-10], [1.0, 1e-10]], "r_p_ohm": 1e12,
               "t_end_s": 0.01, "dt_s": 1e-5, "noise_std_a": 1e-6,
               "estimates": [{"window_s": [0.0, 0.01], "v_known_v": 100.0}]}
    path = write(tmp_path, dict(BASE, circuit=circuit))
    assert main(["circuit", "--config", str(path), "--out", str(tmp_path / "o")]) == 4


def test_envelope_cli_boundary(tmp_path, configs):
    assert main(["envelope", "--config", str(configs / "envelope_default.yaml"), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "envelope_mechanical_boundary.csv").read_text().splitlines()
    assert lines[0].startswith(f"# elastoharvest {__version__} config_sha256=")
    assert "4.0,1.5" in lines


def test_cycle_cli_measured_pathway(tmp_path, configs):
    assert main(["cycle", "--config", str(configs / "replicate_membrane_2kv.yaml"), "--out", str(tmp_path)]) == 0
    report = yaml.safe_load((tmp_path / "cycle_report.yaml").read_text())
    assert report["measured"]["produced_j"] == pytest.approx(28e-6, rel=1e-3)
    assert 24e-6 <= report["net_j"] <= 38e-6


@pytest.mark.parametrize("sub,config", [("dynamics", "dynamics_step"), ("circuit", "circuit_ramp"),
                                        ("fit", "fit_example")])
def test_every_output_has_header(tmp_path, configs, sub, config):
    if sub == "fit":
        # keep the run short: single-term relaxation fit
        src = yaml.safe_load((configs / "fit_example.yaml").read_text())
        src["fit"]["n_terms"] = 1
        shutil.copytree(configs / "data", tmp_path / "data")
        path = write(tmp_path, src, "fit.yaml")
    else:
        path = configs / f"{config}.yaml"
    out = tmp_path / "out"
    assert main([sub, "--config", str(path), "--out", str(out)]) == 0
    for f in out.iterdir():
        assert f.read_text().startswith("# elastoharvest "), f.name


def test_seed_override_recorded(tmp_path, configs):
    cfg = parse_config(configs / "circuit_ramp.yaml", seed=11)
    assert dispatch(cfg, "circuit", tmp_path) == 0
    assert "seed=11" in (tmp_path / "trace.csv").read_text().splitlines()[0]


def test_fitted_material_roundtrips(tmp_path, configs):
    src = yaml.safe_load((configs / "fit_example.yaml").read_text())
    src["fit"]["n_terms"] = 1
    shutil.copytree(configs / "data", tmp_path / "data")
    path = write(tmp_path, src, "fit.yaml")
    assert main(["fit", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
    again = dict(BASE, material=str(tmp_path / "o" / "fitted_material.yaml"))
    cfg = parse_config(write(tmp_path, again, "again.yaml"))
    assert cfg.material.yeoh0.c10 == pytest.approx(69300.0, rel=0.02)
