import json
import os

import numpy as np
import pytest

from mdsp.cli import EXIT_CLAIMS_FAILED, EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ABORT, EXIT_OK, main, parse_point
from mdsp.errors import ConfigError
from mdsp.record_io import read_record
from mdsp.solver.record import RunRecord
from tests.conftest import PROJECT_ROOT, TEST_DATA_DIR


def run_cli(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


def test_run_writes_trajectory_and_report(tmp_path):
    code = run_cli(tmp_path, "run", "--problem", "matching-pennies", "--method", "omd", "--step", "const:0.5",
                   "--iters", "200", "--start", "0.9,0.5", "--assert", "MonotoneDescent", "PerStepDescentInequality")
    assert code == EXIT_OK
    csv_path = tmp_path / "matching-pennies_omd_seed0.csv"
    assert csv_path.exists()
    assert (tmp_path / "matching-pennies_omd_seed0.json").exists()
    record = read_record(str(csv_path))
    assert record.iterations == 200
    report = json.loads((tmp_path / "matching-pennies_omd_seed0.report.json").read_text())
    assert report["all_passed"]
    assert [c["claim"] for c in report["claims"]] == ["MonotoneDescent", "PerStepDescentInequality"]


def test_run_with_failing_claim_returns_one(tmp_path):
    code = run_cli(tmp_path, "run", "--problem", "matching-pennies", "--method", "md", "--step", "const:0.1",
                   "--iters", "20", "--start", "0.9,0.5", "--assert", "MonotoneDescent")
    assert code == EXIT_CLAIMS_FAILED
    report = json.loads((tmp_path / "matching-pennies_md_seed0.report.json").read_text())
    assert not report["all_passed"]


@pytest.mark.parametrize("config_name", ["pennies_omd.json", "pennies_omd.cfg"])
def test_run_from_config_file(tmp_path, config_name):
    code = run_cli(tmp_path, "run", "--config", str(TEST_DATA_DIR / "configs" / config_name))
    assert code == EXIT_OK
    assert (tmp_path / "matching-pennies_omd_seed0.csv").exists()


def test_flags_override_config_file(tmp_path):
    code = run_cli(tmp_path, "run", "--config", str(TEST_DATA_DIR / "configs" / "pennies_omd.json"),
                   "--iters", "30", "--seed", "4")
    assert code == EXIT_OK
    record = read_record(str(tmp_path / "matching-pennies_omd_seed4.csv"))
    assert record.iterations == 30


@pytest.mark.parametrize("constants, expected", [
    ({}, EXIT_OK),
    ({"lipschitz": 0.1}, EXIT_CLAIMS_FAILED),
    ({"alpha": 1.0, "lipschitz": 1.0}, EXIT_OK),
], ids=["stored", "understated_lipschitz", "explicit"])
def test_run_reads_claim_constants_from_config_file(tmp_path, constants, expected):
    data = {"problem": "matching-pennies", "method": "omd", "step": "const:0.5", "iterations": 50,
            "initial_point": [0.9, 0.5], "assert": ["PerStepDescentInequality"]}
    data.update(constants)
    assert run_cli(tmp_path, "run", "--config", write_config(tmp_path, "run.json", data)) == expected


def test_run_claim_constant_flags_override_config_file(tmp_path):
    data = {"problem": "matching-pennies", "method": "omd", "step": "const:0.5", "iterations": 50,
            "initial_point": [0.9, 0.5], "assert": ["PerStepDescentInequality"], "lipschitz": 1.0}
    config = write_config(tmp_path, "run.json", data)
    assert run_cli(tmp_path, "run", "--config", config, "--lipschitz", "0.1") == EXIT_CLAIMS_FAILED


@pytest.mark.parametrize("required, expected", [(0.0, EXIT_OK), (0.5, EXIT_CLAIMS_FAILED)])
def test_run_reads_required_fraction_from_config_file(tmp_path, required, expected):
    data = {"problem": "scc-quadratic", "method": "md", "step": "power:c=1,p=1", "sigma": 0.1, "iterations": 5,
            "ensemble": 2, "workers": 1, "threshold": 1e-300, "required_fraction": required,
            "assert": ["EnsembleConvergenceFraction"]}
    assert run_cli(tmp_path, "run", "--config", write_config(tmp_path, "run.json", data)) == expected


def test_run_ensemble_writes_one_record_per_member(tmp_path):
    code = run_cli(tmp_path, "run", "--problem", "scc-quadratic", "--method", "md", "--step", "power:c=1,p=1",
                   "--sigma", "0.1", "--iters", "50", "--ensemble", "3", "--workers", "2")
    assert code == EXIT_OK
    for i in range(3):
        assert (tmp_path / "scc-quadratic_md_seed0_run{:03d}.csv".format(i)).exists()


def test_run_adaptive_optimizer(tmp_path):
    code = run_cli(tmp_path, "run", "--config", str(PROJECT_ROOT / "configs" / "bilinear_optimistic_adam.json"),
                   "--iters", "100")
    assert code == EXIT_OK
    record = read_record(str(tmp_path / "bilinear_optimistic-adam_seed0.csv"))
    assert record.distance_kind == RunRecord.DISTANCE_NORM
    assert len(record.entries) == 100


def test_diverging_adaptive_run_is_a_numerical_abort(tmp_path):
    code = run_cli(tmp_path, "run", "--problem", "bilinear", "--method", "optimistic-adam", "--lr", "1e13",
                   "--iters", "10")
    assert code == EXIT_NUMERICAL_ABORT
    record = read_record(str(tmp_path / "bilinear_optimistic-adam_seed0.csv"))
    assert record.diverged
    assert not record.complete


@pytest.mark.parametrize("args", [
    ["run", "--problem", "matching-pennies"],
    ["run", "--method", "omd"],
    ["run", "--problem", "no-such-problem", "--method", "md"],
    ["run", "--problem", "scc-quadratic", "--param", "no_such_arg=1", "--method", "md"],
    ["run", "--problem", "matching-pennies", "--method", "md", "--step", "linear:0.1"],
    ["run", "--problem", "matching-pennies", "--method", "md", "--start", "0.9,x"],
    ["run", "--problem", "matching-pennies", "--method", "md", "--iters", "0"],
    ["run", "--problem", "matching-pennies", "--method", "adam"],
    ["run", "--problem", "matching-pennies", "--method", "nope"],
    ["run", "--config", str(TEST_DATA_DIR / "schema_validation_bad_configs" / "unknown_key.json")],
], ids=["no_method", "no_problem", "unknown_problem", "bad_param", "bad_step", "bad_point", "zero_iters",
        "adam_on_constrained", "unknown_method", "bad_config"])
def test_configuration_errors_return_two(tmp_path, args):
    assert run_cli(tmp_path, *args) == EXIT_CONFIG_ERROR


def test_check_on_stored_record(tmp_path):
    assert run_cli(tmp_path, "run", "--problem", "matching-pennies", "--method", "omd", "--step", "const:0.5",
                   "--iters", "100", "--start", "0.9,0.5") == EXIT_OK
    csv_path = str(tmp_path / "matching-pennies_omd_seed0.csv")
    assert main(["check", csv_path, "--claims", "MonotoneDescent", "PerStepDescentInequality"]) == EXIT_OK
    report = json.loads((tmp_path / "matching-pennies_omd_seed0.report.json").read_text())
    assert report["all_passed"]

    report_path = str(tmp_path / "null.report.json")
    assert main(["check", csv_path, "--claims", "NullNondecrease", "--report", report_path]) == EXIT_CLAIMS_FAILED
    assert os.path.exists(report_path)


def test_check_uses_given_constants(tmp_path):
    assert run_cli(tmp_path, "run", "--problem", "matching-pennies", "--method", "omd", "--step", "const:0.5",
                   "--iters", "50", "--start", "0.9,0.5") == EXIT_OK
    csv_path = str(tmp_path / "matching-pennies_omd_seed0.csv")
    # A smaller Lipschitz constant makes the descent inequality too strong to hold.
    assert main(["check", csv_path, "--claims", "PerStepDescentInequality", "--lipschitz", "0.1"]) == \
        EXIT_CLAIMS_FAILED


def test_check_errors_return_two(tmp_path):
    assert run_cli(tmp_path, "run", "--problem", "matching-pennies", "--method", "md", "--iters", "10") == EXIT_OK
    csv_path = tmp_path / "matching-pennies_md_seed0.csv"
    assert main(["check", str(csv_path), "--claims", "NoSuchClaim"]) == EXIT_CONFIG_ERROR
    assert main(["check", str(csv_path), "--claims", "PerStepDescentInequality"]) == EXIT_CONFIG_ERROR

    lines = csv_path.read_text().splitlines(keepends=True)
    csv_path.write_text("".join(lines[:-3]))
    assert main(["check", str(csv_path), "--claims", "MonotoneDescent"]) == EXIT_CONFIG_ERROR
    assert main(["check", str(tmp_path / "missing.csv"), "--claims", "MonotoneDescent"]) == EXIT_CONFIG_ERROR


def test_probe_writes_report(tmp_path):
    assert run_cli(tmp_path, "probe", "--problem", "matching-pennies") == EXIT_OK
    data = json.loads((tmp_path / "matching-pennies.probe.json").read_text())
    assert data["classification"] == "null"
    assert data["matches_declared"]


def test_probe_from_config_with_random_plan(tmp_path):
    assert run_cli(tmp_path, "probe", "--problem", "scc-quadratic", "--samples", "200", "--seed", "2") == EXIT_OK
    data = json.loads((tmp_path / "scc-quadratic.probe.json").read_text())
    assert data["plan"]["kind"] == "random"
    assert data["classification"] == "strict"

    assert run_cli(tmp_path, "probe", "--config", str(TEST_DATA_DIR / "configs" / "probe_scc.json")) == EXIT_OK
    data = json.loads((tmp_path / "scc-quadratic.probe.json").read_text())
    assert data["plan"]["kind"] == "grid"


def write_config(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_probe_reads_samples_from_config_file(tmp_path):
    config = write_config(tmp_path, "probe.json", {"problem": "scc-quadratic", "samples": 37, "seed": 5})
    assert run_cli(tmp_path, "probe", "--config", config) == EXIT_OK
    data = json.loads((tmp_path / "scc-quadratic.probe.json").read_text())
    assert data["plan"]["kind"] == "random"
    assert data["plan"]["samples"] == 37
    assert data["plan"]["seed"] == 5


def test_probe_needs_a_problem(tmp_path):
    assert run_cli(tmp_path, "probe") == EXIT_CONFIG_ERROR


def test_portrait_writes_one_record_per_method_and_start(tmp_path):
    code = run_cli(tmp_path, "portrait", "--problem", "portrait", "--methods", "md", "omd", "--start", "0.45,0.6",
                   "--start", "0.2,0.2", "--iters", "100")
    assert code == EXIT_OK
    for method in ["md", "omd"]:
        for k in range(2):
            path = tmp_path / "portrait_{}_start{}.csv".format(method, k)
            assert path.exists()
    record = read_record(str(tmp_path / "portrait_omd_start1.csv"))
    assert record.metadata["portrait"]["start"] == [0.2, 0.2]
    assert record.entries[0].point.tolist() == [0.2, 0.2]


def test_portrait_on_matching_pennies_separates_md_from_omd(tmp_path):
    code = run_cli(tmp_path, "portrait", "--problem", "matching-pennies", "--methods", "md", "omd",
                   "--start", "0.6,0.5", "--step", "const:0.1", "--iters", "300")
    assert code == EXIT_OK
    md = read_record(str(tmp_path / "matching-pennies_md_start0.csv"))
    omd = read_record(str(tmp_path / "matching-pennies_omd_start0.csv"))
    d0 = 0.5 * 0.1 ** 2
    assert np.all(np.diff(md.distance_series()) > 0.0)
    assert md.final.distances[0] > 10 * d0
    assert np.all(np.diff(omd.distance_series()) < 0.0)
    assert omd.final.distances[0] < 0.1 * d0
    for record in (md, omd):
        assert record.metadata["portrait"]["title"].startswith("Matching pennies")


def test_portrait_needs_a_planar_problem(tmp_path):
    assert run_cli(tmp_path, "portrait", "--problem", "rock-paper-scissors") == EXIT_CONFIG_ERROR


def test_list_problems(capsys):
    assert main(["list-problems"]) == EXIT_OK
    out = capsys.readouterr().out
    for label in ["matching-pennies", "portrait", "scc-quadratic", "rock-paper-scissors", "bilinear"]:
        assert label in out


def test_no_command_returns_two():
    assert main([]) == EXIT_CONFIG_ERROR


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("mdsp ")


def test_unknown_flag_is_a_usage_error():
    assert main(["run", "--no-such-flag"]) == EXIT_CONFIG_ERROR


def test_parse_point():
    assert parse_point("0.9, 0.5").tolist() == [0.9, 0.5]
    assert parse_point([1, 2]).tolist() == [1.0, 2.0]
    with pytest.raises(ConfigError):
        parse_point("a,b")
