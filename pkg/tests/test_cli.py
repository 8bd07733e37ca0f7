import json

import numpy as np
import pytest
from typer.testing import CliRunner

from magblock.cli import app
from magblock.core.csv_writer import read_csv
from magblock.core.parallel import WORKERS_ENV

runner = CliRunner()


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    return tmp_path


def test_init_writes_config(workspace):
    result = runner.invoke(app, ["init"])
    assert result.exit_code == 0
    config = json.loads((workspace / "magblock.json").read_text())
    assert config["g_mb"] == 3.0

    result = runner.invoke(app, ["init"], input="n\n")
    assert result.exit_code == 0
    assert "cancelled" in result.output


def test_sweep_delta_writes_csv(workspace):
    result = runner.invoke(app, ["sweep-delta", "--n-points", "41", "--output", "out", "--delta-min=8",
                                 "--delta-max", "10"])
    assert result.exit_code == 0, result.output
    path = workspace / "out" / "sweep_delta_magnon_lam2.000e-04.csv"
    preamble, header, data = read_csv(path)
    assert header == ["delta_over_omega_b", "g2_analytic"]
    assert data.shape == (41, 2)
    assert preamble["n_points"] == "41"
    assert (workspace / "out" / "sweep_delta_magnon_lam2.000e-04.plot.py").exists()
    assert data[np.argmin(data[:, 1]), 0] == pytest.approx(9.03, abs=0.05)


def test_outputs_are_byte_identical(workspace):
    args = ["sweep-delta", "--n-points", "31", "--mode", "both", "--lambdas", "0,4e-4"]
    assert runner.invoke(app, args + ["--output", "a"]).exit_code == 0
    assert runner.invoke(app, args + ["--output", "a"]).exit_code == 0
    first = sorted((workspace / "a").glob("*.csv"))
    assert len(first) == 4
    snapshot = {p.name: p.read_bytes() for p in first}
    assert runner.invoke(app, args + ["--output", "a"]).exit_code == 0
    assert {p.name: p.read_bytes() for p in sorted((workspace / "a").glob("*.csv"))} == snapshot


def test_config_file_and_overrides(workspace):
    (workspace / "run.cfg").write_text("mode = cavity\nlambdas = 4e-4\ndelta_min = -1\ndelta_max = 1\n")
    result = runner.invoke(app, ["sweep-delta", "--config", "run.cfg", "--n-points", "21"])
    assert result.exit_code == 0, result.output
    assert (workspace / "magblock_out" / "sweep_delta_cavity_lam4.000e-04.csv").exists()


def test_single_point_sweep_is_a_usage_error():
    result = runner.invoke(app, ["sweep-delta", "--n-points", "1"])
    assert result.exit_code == 2
    assert "n_points" in result.output


def test_unknown_key_is_a_usage_error():
    result = runner.invoke(app, ["optimize", "--colour", "blue"])
    assert result.exit_code == 2


def test_negative_dephasing_rate_is_rejected():
    result = runner.invoke(app, ["dephasing", "--gamma-p-list=0,-0.1"])
    assert result.exit_code == 2


def test_optimize_reports_the_magnon_optimum(workspace):
    result = runner.invoke(app, ["optimize"])
    assert result.exit_code == 0, result.output
    assert "Delta_opt = 9.0" in result.output
    _, header, data = read_csv(workspace / "magblock_out" / "optimize_magnon_trace.csv")
    assert header == ["round", "delta_over_omega_b", "lambda_over_omega_b", "log10_g2"]
    assert data.shape[0] >= 2


def test_optimize_without_interior_minimum_fails():
    result = runner.invoke(app, ["optimize", "--delta-min", "100", "--delta-max", "101"])
    assert result.exit_code == 3
    assert "interior minimum" in result.output


def test_evolve_keeps_the_trace(workspace):
    result = runner.invoke(app, ["evolve", "--dim-m", "3", "--dim-c", "3", "--n-t", "11", "--t-max-us", "0.5"])
    assert result.exit_code == 0, result.output
    _, header, data = read_csv(workspace / "magblock_out" / "evolve.csv")
    assert header == ["t_us", "g2_m_zero", "population_m", "population_c", "trace_error"]
    assert data.shape == (11, 5)
    assert np.all(data[:, 4] < 1e-8)
    assert np.isnan(data[0, 1])


def test_g2tau_starts_below_one(workspace):
    result = runner.invoke(app, ["g2tau", "--dim-m", "4", "--dim-c", "4", "--n-tau", "11"])
    assert result.exit_code == 0, result.output
    _, header, data = read_csv(workspace / "magblock_out" / "g2tau_magnon.csv")
    assert header == ["tau_us", "g2_tau"]
    assert data[0, 1] < 1.0
    assert np.all(data[1:, 1] > data[0, 1])


def test_dephasing_writes_one_file_per_rate(workspace):
    result = runner.invoke(app, ["dephasing", "--dim-m", "3", "--dim-c", "3", "--n-points", "5",
                                 "--delta-min", "8.5", "--delta-max", "9.5", "--gamma-p-list", "0,0.5"])
    assert result.exit_code == 0, result.output
    names = sorted(p.name for p in (workspace / "magblock_out").glob("dephasing_*.csv"))
    assert names == ["dephasing_magnon_cavity_gp0.000e00.csv", "dephasing_magnon_cavity_gp5.000e-01.csv",
                     "dephasing_magnon_magnon_gp0.000e00.csv", "dephasing_magnon_magnon_gp5.000e-01.csv"]
    preamble, _, _ = read_csv(workspace / "magblock_out" / "dephasing_magnon_magnon_gp5.000e-01.csv")
    assert preamble["meta.dephasing_target"] == "magnon"
    assert "cavity" in result.output and "magnon" in result.output


def test_combined_dephasing_is_its_own_family(workspace):
    result = runner.invoke(app, ["dephasing", "--dim-m", "3", "--dim-c", "3", "--n-points", "5",
                                 "--gamma-p-list", "0.5", "--dephasing-target", "combined"])
    assert result.exit_code == 0, result.output
    assert [p.name for p in (workspace / "magblock_out").glob("dephasing_*.csv")] == [
        "dephasing_magnon_combined_gp5.000e-01.csv"]


def test_dephased_dynamics_label_each_channel(workspace):
    result = runner.invoke(app, ["evolve", "--dim-m", "3", "--dim-c", "3", "--n-t", "3", "--t-max-us", "0.1",
                                 "--gamma-p", "0.2"])
    assert result.exit_code == 0, result.output
    assert (workspace / "magblock_out" / "evolve_cavity.csv").exists()
    assert (workspace / "magblock_out" / "evolve_magnon.csv").exists()


def test_history_lists_runs(workspace):
    runner.invoke(app, ["sweep-delta", "--n-points", "5"])
    runner.invoke(app, ["sweep-delta", "--n-points", "5", "--kappa-m", "0.5"])
    result = runner.invoke(app, ["history"])
    assert result.exit_code == 0
    records = json.loads((workspace / "magblock_out" / "runs_history.json").read_text())
    assert [r["status"] for r in records] == ["success", "failed"]
    assert records[0]["command"] == "sweep-delta"


def test_verbose_flag(workspace):
    result = runner.invoke(app, ["-v", "sweep-delta", "--n-points", "5"])
    assert result.exit_code == 0, result.output


def test_unwritable_output_directory_is_a_usage_error(workspace):
    (workspace / "afile").write_text("not a directory")
    result = runner.invoke(app, ["sweep-delta", "--n-points", "5", "--output", "afile/sub"])
    assert result.exit_code == 2
    assert "Cannot create output directory" in result.output
