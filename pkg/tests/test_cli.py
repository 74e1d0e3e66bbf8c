import json

import pytest

from paragate.cli import main, parse_duration


def _read(path_glob, directory):
    matches = sorted(directory.glob(path_glob))
    assert matches, f"no artifact matching {path_glob} in {directory}"
    return matches[-1].read_text()


def test_parse_duration():
    assert parse_duration("80ns", "T") == pytest.approx(80e-9)
    assert parse_duration("0.5us", "T") == pytest.approx(0.5e-6)
    assert parse_duration(1e-7, "T") == pytest.approx(1e-7)
    with pytest.raises(Exception, match="must be > 0"):
        parse_duration("-5ns", "T")
    with pytest.raises(Exception, match="cannot parse"):
        parse_duration("fastish", "T")


def test_synth_artifacts(tmp_path):
    assert main(["synth", "--output-dir", str(tmp_path)]) == 0
    csv = _read("synth_swap-point_*.csv", tmp_path)
    assert csv.splitlines()[0] == "t_ns,F_rad,Fdot_rad_per_s,eps"
    meta = json.loads(_read("synth_swap-point_*.json", tmp_path))
    assert meta["experiment"] == "synth"
    assert meta["config"]["preset"] == "swap-point"
    assert list(tmp_path.glob("synth_*.png"))


def test_synth_determinism(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    for d in (a_dir, b_dir):
        assert main(["synth", "--T", "100ns", "--output-dir", str(d)]) == 0
    assert _read("synth_*.csv", a_dir) == _read("synth_*.csv", b_dir)


def test_trajectory_and_config_merge(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"t_gate": "100ns", "scheme": "adiabatic"}))
    # Flag wins over the config file for the scheme; t_gate comes from file.
    assert main(["trajectory", "--config", str(cfg), "--scheme",
                 "superadiabatic", "--output-dir", str(tmp_path)]) == 0
    meta = json.loads(_read("trajectory_*.json", tmp_path))
    assert meta["config"]["scheme"] == "superadiabatic"
    assert meta["config"]["t_gate"] == pytest.approx(100e-9)


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"bogus_knob": 1}))
    assert main(["trajectory", "--config", str(cfg),
                 "--output-dir", str(tmp_path)]) == 1


def test_negative_duration_is_config_error(tmp_path):
    assert main(["trajectory", "--T", "-5ns",
                 "--output-dir", str(tmp_path)]) == 1


def test_rb_requires_seed(tmp_path, capsys):
    rc = main(["rb", "--model", "ideal", "--lengths", "1,3,5", "--k", "2",
               "--output-dir", str(tmp_path)])
    assert rc == 1
    assert "seed required for stochastic experiment" in capsys.readouterr().err


def test_rb_depolarizing_deterministic(tmp_path):
    args = ["rb", "--model", "depolarizing", "--p0", "0.95", "--lengths",
            "1,3,6", "--k", "3", "--seed", "7"]
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    for d in (a_dir, b_dir):
        assert main(args + ["--output-dir", str(d)]) == 0
    assert _read("rb_*.csv", a_dir) == _read("rb_*.csv", b_dir)
    meta = json.loads(_read("rb_*.json", a_dir))
    assert "error_rate" in meta
    assert meta["config"]["seed"] == 7


def test_numerical_error_exit_code(tmp_path):
    # Peak Rabi rate far above the Bessel coupling ceiling.
    rc = main(["synth", "--omega0-mhz", "100",
               "--output-dir", str(tmp_path)])
    assert rc == 2


def test_unknown_preset_is_config_error(tmp_path):
    assert main(["trajectory", "--preset", "no-such",
                 "--output-dir", str(tmp_path)]) == 1


def test_output_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("PARAGATE_OUTPUT_DIR", str(tmp_path))
    assert main(["synth", "--T", "100ns"]) == 0
    assert list(tmp_path.glob("synth_*.csv"))
