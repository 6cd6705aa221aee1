"""End-to-end tests of the command-line interface on small grids."""

import json

import pytest

from stratmoi.main import StratMoiRunner, main
from stratmoi.modules.wavefields import read_wave_csv, wave_from_frame
from stratmoi.utils.exceptions import ConfigurationError

SMALL = {
    "mode": {"ny": 65},
    "grid": {"nx": 129, "ny": 65},
    "sweep": {"nx": 129, "ny": 65, "n_points": 3, "eps_min": 0.06, "eps_max": 0.1},
    "probes": {"nx": 129, "ny": 65, "directions": 2},
    "runtime": {"progress": False},
}


def config_file(tmp_path, document=None, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document or SMALL, indent=2), encoding="utf-8")
    return str(path)


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_bad_grid_exits_with_configuration_status(tmp_path, capsys):
    path = config_file(tmp_path, {"grid": {"ny": 3}})
    assert main(["--config", path, "--out", str(tmp_path / "out"), "coeffs"]) == 2
    assert "ny ≥ 16 required" in capsys.readouterr().err


def test_negative_jobs_rejected(tmp_path):
    with pytest.raises(ConfigurationError):
        StratMoiRunner(config_file(tmp_path), out=str(tmp_path / "out"), jobs=0)


def test_validate_profile(tmp_path):
    out = tmp_path / "out"
    assert main(["--config", config_file(tmp_path), "--out", str(out), "validate-profile"]) == 0
    payload = read_json(out / "profile_validation.json")
    assert payload["kind"] == "profile_validation"
    assert payload["report"]["passed"] is True
    metadata = read_json(out / "run_metadata.json")
    assert metadata["status"] == 0
    assert metadata["files"] == ["profile_validation.json"]


def test_unstable_profile_fails_validation(tmp_path, capsys):
    document = dict(SMALL, profile={"kind": "linear", "rho_bottom": 0.9, "rho_top": 1.0})
    out = tmp_path / "out"
    assert main(["--config", config_file(tmp_path, document), "--out", str(out), "validate-profile"]) == 1
    assert "rho_bar' < 0" in capsys.readouterr().err
    assert read_json(out / "profile_validation.json")["report"]["passed"] is False
    assert read_json(out / "run_metadata.json")["status"] == 1


def test_coeffs_and_modes(tmp_path):
    out = tmp_path / "out"
    config = config_file(tmp_path)
    assert main(["--config", config, "--out", str(out), "modes"]) == 0
    assert main(["--config", config, "--out", str(out), "coeffs"]) == 0
    modes = read_json(out / "modes.json")
    coeffs = read_json(out / "coeffs.json")["coefficients"]
    assert modes["mode"]["c0"] == pytest.approx(coeffs["c0"])
    assert modes["flux_residual_relative"] < 1e-10
    assert coeffs["a"] * coeffs["r"] == pytest.approx(-1.5)
    assert (out / "modes.csv").exists()


def test_wave_files_round_trip(tmp_path):
    out = tmp_path / "out"
    assert main(["--config", config_file(tmp_path), "--out", str(out), "wave"]) == 0
    meta = read_json(out / "wave.json")["wave"]
    wave = wave_from_frame(read_wave_csv(out / "wave.csv"), meta)
    assert wave.grid.shape == (129, 65)
    assert wave.eps == 0.1
    assert wave.c == pytest.approx(meta["c0"] + 0.01)


def test_functionals_print_json(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["--config", config_file(tmp_path), "--out", str(out), "functionals"]) == 0
    printed = json.loads(capsys.readouterr().out)
    stored = read_json(out / "functionals.json")
    assert printed == stored["functionals"]
    assert printed["I"] > 0.0
    free, weighted = stored["casimir_check"]
    assert free["casimir_variant"] == "sigma_free"
    assert max(free["rho"], free["sigma"]) < max(weighted["rho"], weighted["sigma"])


def test_csv_output_can_be_disabled(tmp_path):
    document = dict(SMALL, output={"formats": ["json"]})
    out = tmp_path / "out"
    assert main(["--config", config_file(tmp_path, document), "--out", str(out), "wave"]) == 0
    assert (out / "wave.json").exists()
    assert not (out / "wave.csv").exists()


def test_branch_is_deterministic(tmp_path):
    config = config_file(tmp_path)
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["--config", config, "--out", str(first), "--jobs", "2", "branch"]) == 0
    assert main(["--config", config, "--out", str(second), "branch"]) == 0
    assert (first / "branch.csv").read_bytes() == (second / "branch.csv").read_bytes()
    assert read_json(first / "branch.json")["branch"] == read_json(second / "branch.json")["branch"]


def test_branch_from_amplitude_list(tmp_path):
    document = dict(SMALL, sweep=dict(SMALL["sweep"], eps_list=[0.05, 0.07]))
    out = tmp_path / "out"
    assert main(["--config", config_file(tmp_path, document), "--out", str(out), "branch"]) == 0
    branch = read_json(out / "branch.json")
    assert branch["branch"]["n_points"] == 3
    assert "m_second" in branch["branch"]
    middle = branch["branch"]["c0"] + 0.5 * (0.05 ** 2 + 0.07 ** 2)
    assert branch["branch"]["m_second"]["c"][0] == pytest.approx(middle)


def speed_list_runner(tmp_path, c_list):
    document = dict(SMALL, sweep=dict(SMALL["sweep"], c_list=c_list))
    return StratMoiRunner(config_file(tmp_path, document), out=str(tmp_path / "out"))


def test_uniform_speed_list_is_kept(tmp_path):
    runner = speed_list_runner(tmp_path, [0.33, 0.34, 0.35, 0.36])
    assert runner._branch_c_values(0.3) == pytest.approx([0.33, 0.34, 0.35, 0.36])


def test_uneven_speed_list_is_resampled(tmp_path):
    runner = speed_list_runner(tmp_path, [0.31, 0.312, 0.35])
    assert runner._branch_c_values(0.3) == pytest.approx([0.31, 0.33, 0.35])
