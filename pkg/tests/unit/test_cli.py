"""Unit tests for the command-line interface."""
import json

import pandas as pd
import pytest

from sphere_energy import main as cli
from sphere_energy.main import EXIT_INVALID, EXIT_OK, EXIT_SINGULAR, RunConfig, build_parser, make_config


@pytest.fixture(autouse=True)
def quiet_logging(mocker):
    """Leave logging configuration to pytest."""
    mocker.patch("sphere_energy.main.setup_logging")


@pytest.fixture
def common_flags(tmp_path):
    return ["--no-persist", "--cache-dir", str(tmp_path / "cache")]


def run(argv):
    return cli.main(argv)


def test_energy_command(point_file, tmp_path, common_flags):
    """Test energy of a point file written as JSON."""
    out = tmp_path / "energy.json"
    code = run(["energy", "--file", str(point_file), "--kind", "riesz", "--s", "2", "--output", str(out)] + common_flags)
    assert code == EXIT_OK
    result = json.loads(out.read_text())
    assert result["value"] == pytest.approx(2.25)
    assert result["N"] == 4


def test_energy_with_split(point_file, tmp_path, common_flags):
    """Test the split fields in the energy report."""
    out = tmp_path / "split.json"
    code = run(["energy", "--file", str(point_file), "--kind", "log", "--t", "2", "--nmax", "500",
                "--output", str(out)] + common_flags)
    assert code == EXIT_OK
    result = json.loads(out.read_text())
    assert abs(result["split_discrepancy"]) < 1e-6
    assert result["split"]["t"] == 2


def test_energy_singular_exit_code(antipodal_file, tmp_path, common_flags):
    """Test that an antipodal pair under the kernel split exits with 3."""
    code = run(["energy", "--file", str(antipodal_file), "--kind", "log", "--t", "1",
                "--output", str(tmp_path / "x.json")] + common_flags)
    assert code == EXIT_SINGULAR


@pytest.mark.parametrize("argv", [
    ["energy", "--kind", "log"],
    ["energy", "--generator", "random", "--kind", "log"],
    ["energy", "--generator", "random", "--N", "10", "--kind", "riesz"],
    ["energy", "--generator", "random", "--N", "10", "--kind", "log", "--lambda", "2.5"],
    ["kernel", "--kind", "riesz", "--s", "2", "--t", "10", "--nmax", "5"],
    ["sweep", "--source", "fibonacci", "--kinds", "riesz"],
    ["sweep", "--source", "fibonacci", "--kinds", "log", "--N-values", "1"],
    ["predict", "--kind", "log"],
])
def test_invalid_arguments_exit_code(argv, common_flags):
    """Test validation failures exit with 2."""
    assert run(argv + common_flags) == EXIT_INVALID


def test_missing_file_exit_code(tmp_path, common_flags):
    """Test a missing point file exits with 2."""
    code = run(["verify", "--file", str(tmp_path / "none.txt"), "--t", "2"] + common_flags)
    assert code == EXIT_INVALID


def test_non_finite_file_exit_code(tmp_path, common_flags):
    """Test a point file with a nan coordinate exits with 2."""
    path = tmp_path / "nan.txt"
    path.write_text("0 0 1\nnan 0 1\n1 0 0\n")
    assert run(["energy", "--file", str(path), "--kind", "log"] + common_flags) == EXIT_INVALID


def test_no_command_prints_help(capsys):
    """Test that no subcommand shows help."""
    assert run([]) == EXIT_INVALID
    assert "usage" in capsys.readouterr().out


def test_verify_command(point_file, tmp_path, common_flags):
    """Test verification output."""
    out = tmp_path / "cert.json"
    code = run(["verify", "--file", str(point_file), "--t", "2", "--tolerance", "1e-10",
                "--output", str(out)] + common_flags)
    assert code == EXIT_OK
    assert json.loads(out.read_text())["verdict"] == "pass"


def test_kernel_command_csv(tmp_path, common_flags):
    """Test the kernel table as CSV."""
    out = tmp_path / "kernel.csv"
    code = run(["kernel", "--kind", "riesz", "--s", "2", "--t", "4", "--nmax", "1500", "--grid", "9",
                "--format", "csv", "--output", str(out)] + common_flags)
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["x", "head", "tail", "exact", "error"]
    assert len(frame) == 9


def test_predict_command(tmp_path, common_flags):
    """Test the prediction output."""
    out = tmp_path / "predict.json"
    code = run(["predict", "--kind", "riesz", "--s", "2", "--N", "100", "--t", "4", "--output", str(out)] + common_flags)
    assert code == EXIT_OK
    assert json.loads(out.read_text())["leading_term"] == pytest.approx(3750.0)


def test_sweep_and_fit_commands(tmp_path, common_flags):
    """Test a Fibonacci sweep to CSV followed by a fit of that CSV."""
    csv_path = tmp_path / "sweep.csv"
    code = run(["sweep", "--source", "fibonacci", "--kinds", "log", "riesz:3", "--N-values", "40", "80", "160", "320",
                "--format", "csv", "--output", str(csv_path)] + common_flags)
    assert code == EXIT_OK
    frame = pd.read_csv(csv_path)
    assert len(frame) == 8

    fit_path = tmp_path / "fit.json"
    code = run(["fit", "--input", str(csv_path), "--kind", "log", "--output", str(fit_path)] + common_flags)
    assert code == EXIT_OK
    assert json.loads(fit_path.read_text())["count"] == 4


def test_fit_missing_input(tmp_path, common_flags):
    """Test fit of a missing CSV exits with 2."""
    assert run(["fit", "--input", str(tmp_path / "none.csv")] + common_flags) == EXIT_INVALID


def test_construct_dispatch(mocker, tmp_path, common_flags):
    """Test construct forwards options to the orchestrator."""
    options_path = tmp_path / "options.json"
    options_path.write_text(json.dumps({"restarts": 2, "max_iters": 100}))
    runner = mocker.patch.object(cli.Orchestrator, "run_construct", return_value={"certificate": {}})

    code = run(["construct", "--t", "3", "--N", "12", "--options", str(options_path), "--tolerance", "1e-9",
                "--save", str(tmp_path / "d.txt"), "--no-reuse", "--output", str(tmp_path / "c.json")] + common_flags)
    assert code == EXIT_OK
    kwargs = runner.call_args.kwargs
    assert kwargs["t"] == 3 and kwargs["N"] == 12
    assert kwargs["options"].restarts == 2
    assert kwargs["options"].tolerance == 1e-9
    assert kwargs["reuse"] is False
    assert kwargs["output"] == str(tmp_path / "d.txt")


def test_config_file_defaults(tmp_path):
    """Test --config supplies defaults that explicit flags override."""
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({"source": "fibonacci", "kinds": ["log"], "N_values": [10, 20], "d": 2}))
    args = build_parser().parse_args(["sweep", "--config", str(config_path), "--kinds", "riesz:4"])
    config = make_config(args)
    assert isinstance(config, RunConfig)
    assert config.source == "fibonacci"
    assert config.kinds == ["riesz:4"]
    assert config.N_values == [10, 20]


def test_unexpected_error_exit_code(mocker, point_file, common_flags):
    """Test an unexpected exception exits with 1."""
    mocker.patch.object(cli.Orchestrator, "run_energy", side_effect=RuntimeError("boom"))
    assert run(["energy", "--file", str(point_file), "--kind", "log"] + common_flags) == 1
