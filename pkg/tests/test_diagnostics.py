import numpy as np
import pytest

from mdsp.definitions import REPORT_SCHEMA_VERSION
from mdsp.diagnostics import (CONFORMANCE_CLAIMS, check_bounded_orbit, check_descent_inequality,
                              check_ergodic_convergence, check_monotone_descent, check_null_identity,
                              check_null_nondecrease, ensemble_stats, run_checks, wilson_interval)
from mdsp.errors import ConfigError, EmptyEnsemble, MissingHalfStep, MissingSolution, Uncertifiable
from mdsp.schedulers import parse_schedule
from mdsp.solver import RunConfig, RunRecord, run
from mdsp.solver.record import FinalState, RecordEntry

START = [0.9, 0.5]


def pennies(method, schedule="const:0.1", iterations=50, **kwargs):
    return run(RunConfig("matching-pennies", geometry="euclidean", schedule=schedule, iterations=iterations,
                         initial_point=START, **kwargs), method)


def test_monotone_descent_fails_for_md_on_null_problem():
    result = check_monotone_descent(pennies("md"))
    assert not result.passed
    assert result.margin > 0.0
    assert result.location is not None


def test_monotone_descent_passes_for_omd_on_null_problem():
    assert check_monotone_descent(pennies("omd")).passed


def test_null_nondecrease_fails_for_omd():
    result = check_null_nondecrease(pennies("omd"))
    assert not result.passed
    assert result.margin < 0.0


def test_null_identity_fails_for_omd():
    assert not check_null_identity(pennies("omd")).passed


def test_descent_inequality_needs_half_steps():
    with pytest.raises(MissingHalfStep):
        check_descent_inequality(pennies("md"), alpha=1.0, lipschitz=1.0)


def test_descent_inequality_detects_a_wrong_constant():
    record = pennies("omd", schedule="const:0.5")
    assert check_descent_inequality(record, alpha=1.0, lipschitz=1.0).passed
    # Understating L inflates the guaranteed decrease beyond what OMD delivers.
    assert not check_descent_inequality(record, alpha=1.0, lipschitz=0.1).passed


def test_per_step_claims_need_every_row():
    record = pennies("omd", record_every=5)
    with pytest.raises(ConfigError):
        check_monotone_descent(record)
    with pytest.raises(ConfigError):
        check_descent_inequality(record, alpha=1.0, lipschitz=1.0)


def test_bounded_orbit_with_understated_noise_bound():
    schedule = parse_schedule("power:c=0.5,p=1")
    record = pennies("md", schedule=schedule, iterations=200)
    assert check_bounded_orbit(record, schedule, m_squared=0.5, alpha=1.0).passed
    assert not check_bounded_orbit(record, schedule, m_squared=0.0, alpha=1.0).passed


def sparse_record(distances, final_distance, every=10):
    record = RunRecord("md", "synthetic", 2, [np.zeros(2)], record_every=every)
    for k, d in enumerate(distances):
        record.append(RecordEntry(1 + k * every, 0.1, np.zeros(2), None, np.zeros(2), [d], k))
    record.final = FinalState(1 + len(distances) * every, np.zeros(2), [final_distance], len(distances))
    return record


def test_bounded_orbit_locates_the_final_state_on_sparse_records():
    record = sparse_record([0.1 * k for k in range(10)], 5.0)
    assert [e.n for e in record.entries] == list(range(1, 92, 10))
    result = check_bounded_orbit(record, parse_schedule("power:c=1,p=1"), m_squared=0.0, alpha=1.0)
    assert not result.passed
    assert result.margin == pytest.approx(5.0)
    assert result.location == 101


def test_bounded_orbit_locates_sparse_rows_by_iteration():
    record = sparse_record([0.0, 0.3, 2.0, 0.3], 0.1)
    result = check_bounded_orbit(record, parse_schedule("power:c=1,p=1"), m_squared=0.0, alpha=1.0)
    assert result.location == 21


def test_ergodic_convergence_with_tight_radius_fails():
    record = pennies("md", schedule="power:c=0.2,p=0.5", iterations=100)
    result = check_ergodic_convergence(record, radius=1e-6)
    assert not result.passed
    assert result.location == 100


def test_claims_need_solutions():
    record = RunRecord("md", "anonymous", 2, [])
    with pytest.raises(MissingSolution):
        check_ergodic_convergence(record)


def test_wilson_interval_golden():
    low, high = wilson_interval(45, 50)
    assert low == pytest.approx(0.78640, abs=1e-4)
    assert high == pytest.approx(0.95652, abs=1e-4)


def test_wilson_interval_is_clamped():
    low, high = wilson_interval(50, 50)
    assert high == 1.0
    assert low < 1.0
    low, high = wilson_interval(0, 50)
    assert low == 0.0
    assert 0.0 < high < 1.0


@pytest.mark.parametrize("total", [1, 2, 7, 50, 1000])
def test_wilson_interval_endpoints_are_exact(total):
    assert wilson_interval(0, total)[0] == 0.0
    assert wilson_interval(total, total)[1] == 1.0


def test_ensemble_statistics_need_two_runs():
    with pytest.raises(EmptyEnsemble):
        ensemble_stats([pennies("omd", iterations=5)])


def test_ensemble_statistics_count_successes():
    converged = pennies("omd", schedule="const:0.5", iterations=100)
    stuck = pennies("md", iterations=5)
    stats = ensemble_stats([converged, converged, stuck], threshold=1e-3)
    assert (stats.successes, stats.total) == (2, 3)
    assert stats.to_dict()["fraction"] == pytest.approx(2 / 3)


def test_run_checks_uses_stored_constants():
    record = pennies("omd", schedule="const:0.5")
    report = run_checks([record], ["MonotoneDescent", "PerStepDescentInequality"], names=["pennies.csv"])
    assert [r.claim for r in report.results] == ["MonotoneDescent", "PerStepDescentInequality"]
    assert report.all_passed
    assert all(r.record == "pennies.csv" for r in report.results)


def test_bounded_orbit_on_constant_steps_is_uncertifiable():
    with pytest.raises(Uncertifiable):
        run_checks([pennies("md")], ["BoundedOrbit"])


def test_given_constants_override_stored_ones():
    record = pennies("omd", schedule="const:0.5")
    report = run_checks([record], ["PerStepDescentInequality"], {"alpha": 1.0, "lipschitz": 0.1})
    assert not report.all_passed


def test_missing_constants_are_config_errors():
    record = pennies("omd", schedule="const:0.5")
    record.metadata.pop("lipschitz")
    with pytest.raises(ConfigError):
        run_checks([record], ["PerStepDescentInequality"])


def test_unknown_claim():
    with pytest.raises(ConfigError):
        run_checks([pennies("md", iterations=3)], ["Convergence"])


def test_report_rendering():
    report = run_checks([pennies("omd")], ["MonotoneDescent", "ErgodicConvergence"], names=["r.csv"])
    data = report.to_dict()
    assert data["schema"] == REPORT_SCHEMA_VERSION
    assert len(data["claims"]) == 2
    table = report.draw()
    assert "MonotoneDescent" in table
    assert "r.csv" in table


def test_registered_claims():
    assert set(CONFORMANCE_CLAIMS.names()) == {"MonotoneDescent", "NullNondecrease", "NullIdentity",
                                               "PerStepDescentInequality", "BoundedOrbit", "ErgodicConvergence",
                                               "EnsembleConvergenceFraction"}


def test_zero_required_fraction_is_honoured():
    stuck = pennies("md", iterations=5)
    report = run_checks([stuck, stuck], ["EnsembleConvergenceFraction"], {"required_fraction": 0.0})
    assert report.all_passed
