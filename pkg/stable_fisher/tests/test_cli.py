"""The stable-info command line."""

from __future__ import annotations

# flake8: noqa
import csv
import io
import json

import pytest
from click.testing import CliRunner

from stable_fisher.cli import THREADS_ENV, RunConfig, StableInfo, parse_grid

from .core import cli_config, gaussian


@pytest.fixture(scope="session")
def runner():
    # keep log records out of the captured tables on every click version
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


def _rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_density_csv(runner):
    result = runner.invoke(StableInfo.cli, ["density", "--alpha", "2", "--grid", "-1:1:3"])
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert lines[0].startswith("# abs_tol: ")
    assert "# args: alpha=2.0 grid=-1.0:1.0:3" in lines
    assert "# command: density" in lines
    rows = _rows(result.stdout)
    assert [r["x"] for r in rows] == ["-1", "0", "1"]
    assert float(rows[1]["density"]) == pytest.approx(gaussian(0.0), rel=1e-16)
    assert {r["method"] for r in rows} == {"gaussian_exact"}
    assert {r["abs_error"] for r in rows} == {"0"}


def test_output_is_reproducible(runner):
    args = ["density", "--alpha", "1.8", "--beta", "0.3", "--grid", "-2:2:5"]
    first = runner.invoke(StableInfo.cli, args)
    second = runner.invoke(StableInfo.cli, args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout


def test_threads_do_not_change_output(runner, monkeypatch):
    args = ["density", "--alpha", "1.9", "--grid", "-3:3:7"]
    serial = runner.invoke(StableInfo.cli, args)
    monkeypatch.setenv(THREADS_ENV, "3")
    threaded = runner.invoke(StableInfo.cli, args)
    assert threaded.exit_code == 0
    assert _rows(threaded.stdout) == _rows(serial.stdout)


def test_bad_thread_variable(runner, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "many")
    result = runner.invoke(StableInfo.cli, ["table1"])
    assert result.exit_code == 2


def test_table1_json(runner):
    result = runner.invoke(StableInfo.cli, ["table1", "--format", "json"])
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["meta"]["command"] == "table1"
    values = {(r["row"], r["col"]): r["value"] for r in document["rows"]}
    assert values[("mu", "mu")] == 0.5
    assert values[("alpha", "alpha")] == "inf"
    assert values[("sigma", "alpha")] == "-inf"
    assert {r["provenance"] for r in document["rows"]} == {"table_limit"}


def test_asymptotic_matrix(runner):
    result = runner.invoke(
        StableInfo.cli, ["fisher", "--asymptotic", "--alpha", "1.99", "--beta", "0.5"]
    )
    assert result.exit_code == 0
    rows = _rows(result.stdout)
    assert len(rows) == 10
    assert {r["provenance"] for r in rows} == {"asymptotic"}


def test_gaussian_scores(runner):
    result = runner.invoke(StableInfo.cli, ["score", "--alpha", "2", "--grid", "1:1:1"])
    assert result.exit_code == 0
    (row,) = _rows(result.stdout)
    assert float(row["s_mu"]) == pytest.approx(0.5, rel=1e-12)
    assert float(row["s_sigma"]) == pytest.approx(-0.5, rel=1e-12)


def test_compare_marks_mode_derivative(runner):
    result = runner.invoke(
        StableInfo.cli, ["compare-asymptotics", "--alpha", "1.99", "--grid", "-2:2:5"]
    )
    assert result.exit_code == 0
    rows = _rows(result.stdout)
    assert len(rows) == 5
    assert rows[2]["fprime_exact"] == "nan"
    assert rows[0]["regime"] == "core"


@pytest.mark.parametrize(
    "args",
    [
        pytest.param(["density", "--alpha", "2.5"], id="alpha-out-of-range"),
        pytest.param(["density", "--beta", "1"], id="beta-out-of-range"),
        pytest.param(["density", "--grid", "5:1:3"], id="reversed-grid"),
        pytest.param(["density", "--grid", "0:1"], id="short-grid"),
        pytest.param(["sweep", "--deltas", "0,0.1"], id="zero-delta"),
        pytest.param(["sweep", "--deltas", "0.1", "--entry", "alpha"], id="bad-entry"),
        pytest.param(["fisher", "--threads", "0"], id="no-threads"),
    ],
)
def test_parameter_errors(runner, args):
    result = runner.invoke(StableInfo.cli, args)
    assert result.exit_code == 2


def test_domain_error_exit_code(runner):
    # the asymptotic matrix needs delta < 1/e
    result = runner.invoke(StableInfo.cli, ["fisher", "--asymptotic", "--alpha", "1.5"])
    assert result.exit_code == 2


def test_nonconvergence_exit_code(runner, tmp_path):
    path = tmp_path / "budget.json"
    path.write_text(json.dumps({"max_evaluations": 5}))
    result = runner.invoke(
        StableInfo.cli,
        ["density", "--config", str(path), "--alpha", "1.8", "--grid", "1:1:1"],
    )
    assert result.exit_code == 3


def test_config_file_and_flags(runner, tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cli_config()))
    result = runner.invoke(StableInfo.cli, ["density", "--config", str(path), "--grid", "0:1:2"])
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert len(document["rows"]) == 2
    assert document["meta"]["abs_tol"] == 1e-10

    override = runner.invoke(
        StableInfo.cli,
        ["density", "--config", str(path), "--alpha", "2", "--format", "csv", "--grid", "0:1:2"],
    )
    assert override.exit_code == 0
    assert {r["method"] for r in _rows(override.stdout)} == {"gaussian_exact"}


def test_output_file(runner, tmp_path):
    target = tmp_path / "table.csv"
    result = runner.invoke(StableInfo.cli, ["table1", "--output", str(target)])
    assert result.exit_code == 0
    assert result.stdout == ""
    assert len(_rows(target.read_text())) == 10


def test_parse_grid():
    assert parse_grid("-1:1:3") == (-1.0, 1.0, 3)
    assert parse_grid("2:2:1") == (2.0, 2.0, 1)
    with pytest.raises(ValueError):
        parse_grid("1:2:0")


def test_run_config_rejects_unknown_command():
    with pytest.raises(ValueError, match="unknown command"):
        RunConfig(command="plot")


def test_runner_defaults():
    runner = StableInfo()
    assert runner.config["alpha"] == 2.0
    assert runner.quad_config().strict
    with pytest.raises(AssertionError, match="threads"):
        StableInfo(config={"threads": 0}, validate_config=False)


@pytest.mark.slow
def test_verify_lines(runner):
    result = runner.invoke(StableInfo.cli, ["verify"])
    assert result.exit_code == 0
    records = [json.loads(line) for line in result.stdout.splitlines()]
    assert records
    assert all(r["pass"] for r in records)


@pytest.mark.slow
def test_sweep(runner):
    result = runner.invoke(
        StableInfo.cli, ["sweep", "--entry", "mu,mu", "--deltas", "0.1", "--beta", "0.2"]
    )
    assert result.exit_code == 0
    (row,) = _rows(result.stdout)
    assert float(row["asymptotic"]) == 0.5
    assert float(row["ratio"]) == pytest.approx(1.0, abs=0.2)


def test_environment_layers_between_files_and_flags(runner, tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"alpha": 1.8, "format": "json"}))
    monkeypatch.setenv("STABLE_INFO_ALPHA", "2")
    from_env = runner.invoke(
        StableInfo.cli, ["density", "--config", str(path), "--grid", "0:1:2"]
    )
    assert from_env.exit_code == 0
    document = json.loads(from_env.stdout)
    assert {r["method"] for r in document["rows"]} == {"gaussian_exact"}

    from_flag = runner.invoke(
        StableInfo.cli,
        ["density", "--config", str(path), "--alpha", "1.8", "--grid", "1:2:2"],
    )
    assert from_flag.exit_code == 0
    document = json.loads(from_flag.stdout)
    assert {r["method"] for r in document["rows"]} == {"nolan_integral"}


def test_runner_reads_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")
    monkeypatch.setenv("STABLE_INFO_STRICT", "false")
    runner = StableInfo(parse_env_config=True, overrides={"beta": 0.5, "mu": None})
    assert runner.config["threads"] == 4
    assert runner.config["beta"] == 0.5
    assert runner.config["mu"] == 0.0
    assert not runner.quad_config().strict


@pytest.mark.parametrize(
    "args",
    [
        pytest.param(["table1"], id="table1"),
        pytest.param(["density", "--alpha", "2", "--grid", "0:4:5"], id="gaussian-density"),
        pytest.param(
            ["density", "--alpha", "2", "--grid", "0:4:5", "--format", "json"],
            id="gaussian-json",
        ),
    ],
)
def test_golden_output(runner, args):
    first = runner.invoke(StableInfo.cli, args)
    second = runner.invoke(StableInfo.cli, args)
    assert first.exit_code == 0
    assert first.stdout_bytes == second.stdout_bytes


def test_table1_golden_body(runner):
    result = runner.invoke(StableInfo.cli, ["table1"])
    assert result.exit_code == 0
    body = [line for line in result.stdout.splitlines() if not line.startswith("#")]
    assert body == [
        "row,col,value,provenance",
        "mu,mu,0.5,table_limit",
        "mu,sigma,0,table_limit",
        "mu,alpha,0,table_limit",
        "mu,beta,0,table_limit",
        "sigma,sigma,2,table_limit",
        "sigma,alpha,-inf,table_limit",
        "sigma,beta,0,table_limit",
        "alpha,alpha,inf,table_limit",
        "alpha,beta,0,table_limit",
        "beta,beta,0,table_limit",
    ]


@pytest.mark.slow
def test_sweep_is_byte_stable(runner):
    args = ["sweep", "--entry", "mu,mu", "--deltas", "0.2"]
    first = runner.invoke(StableInfo.cli, args)
    second = runner.invoke(StableInfo.cli, args)
    assert first.exit_code == 0
    assert first.stdout_bytes == second.stdout_bytes
