import numpy as np
import pytest

from mdsp.diagnostics import (check_bounded_orbit, check_descent_inequality, check_ergodic_convergence,
                              check_monotone_descent, check_null_identity, check_null_nondecrease)
from mdsp.errors import ConfigError
from mdsp.geometry import Box, two_player_set
from mdsp.oracle import OracleConfig
from mdsp.problems import Problem, get_problem
from mdsp.schedulers import parse_schedule
from mdsp.solver import RunConfig, run
from mdsp.solver.algo import FLAG_INCOMPLETE, FLAG_LIPSCHITZ_UNKNOWN, FLAG_OUTSIDE_WINDOW

START = [0.9, 0.5]


def pennies_config(**kwargs):
    options = dict(geometry="euclidean", schedule="const:0.1", iterations=5, initial_point=START)
    options.update(kwargs)
    return RunConfig("matching-pennies", **options)


def test_record_layout_for_md():
    record = run(pennies_config(), "md")
    assert len(record.entries) == 5
    assert [e.n for e in record.entries] == [1, 2, 3, 4, 5]
    assert record.entries[0].point == pytest.approx(START)
    assert record.entries[0].distances[0] == pytest.approx(0.08)
    assert record.entries[0].average == pytest.approx(START)
    assert record.entries[0].half is None
    assert [e.queries for e in record.entries] == [1, 2, 3, 4, 5]
    assert record.final.n == 6
    assert record.iterations == 5
    assert record.final.queries == 5
    assert record.final.distances[0] == pytest.approx(0.08 * 1.01 ** 5)
    assert record.complete
    assert record.metadata["alpha"] == 1.0
    assert record.metadata["m_squared"] == pytest.approx(0.5)


def test_record_layout_for_omd():
    record = run(pennies_config(), "omd")
    assert record.has_half_steps
    assert record.entries[0].half == pytest.approx([0.9, 0.54])
    assert record.entries[1].point == pytest.approx([0.896, 0.54])
    assert [e.queries for e in record.entries] == [2, 4, 6, 8, 10]


def test_omd_on_matching_pennies_converges_inside_the_certified_window():
    record = run(pennies_config(schedule="const:0.5", iterations=500), "omd")
    assert FLAG_OUTSIDE_WINDOW not in record.flags
    assert check_monotone_descent(record, tol=1e-9).passed
    assert check_descent_inequality(record, alpha=1.0, lipschitz=1.0, tol=1e-9).passed
    assert record.iterations == 500
    assert record.final.distances[0] <= 1e-6


def test_record_every_thins_rows():
    record = run(pennies_config(record_every=2), "md")
    assert [e.n for e in record.entries] == [1, 3, 5]
    assert record.final.n == 6


def test_md_on_matching_pennies_spirals_out():
    record = run(pennies_config(iterations=20), "md")
    series = record.distance_series()
    assert series[1:] / series[:-1] == pytest.approx(np.full(20, 1.01), rel=1e-12)


def test_omd_contracts_on_matching_pennies_with_equality_in_descent():
    record = run(pennies_config(schedule="const:0.5", iterations=40), "omd")
    series = record.distance_series()
    assert series[1:] / series[:-1] == pytest.approx(np.full(40, 0.8125), rel=1e-9)
    result = check_descent_inequality(record, alpha=1.0, lipschitz=1.0)
    assert result.passed
    assert abs(result.margin) <= 1e-12
    assert not record.flags


def test_md_on_null_problem_never_gets_closer():
    schedule = parse_schedule("power:c=0.5,p=1")
    record = run(pennies_config(schedule=schedule, iterations=10000), "md")
    assert check_null_nondecrease(record).passed
    assert check_null_identity(record).passed
    assert record.final.distances[0] == pytest.approx(0.117, abs=1e-3)
    bounded = check_bounded_orbit(record, schedule, record.metadata["m_squared"], 1.0)
    assert bounded.passed


def test_entropic_md_on_simplex_game_satisfies_null_identity():
    record = run(RunConfig("simplex-game", geometry="entropic", schedule="const:0.05", iterations=500,
                           initial_point=[0.7, 0.3, 0.4, 0.6]), "md")
    assert record.geometry == "entropic"
    assert check_null_identity(record).passed
    assert check_null_nondecrease(record).passed


def test_ergodic_average_converges_on_null_problem():
    record = run(pennies_config(schedule="power:c=0.2,p=0.5", iterations=10000), "md")
    assert check_ergodic_convergence(record, radius=0.05).passed
    assert np.linalg.norm(record.final.average - [0.5, 0.5]) <= 0.023
    assert record.final.distances[0] >= 0.08


@pytest.mark.parametrize("method", ["md", "omd"])
def test_last_iterate_converges_on_strict_problem(method):
    problem = get_problem("scc-quadratic")
    gamma = 0.5 / problem.lipschitz
    record = run(RunConfig(problem, geometry="euclidean", schedule="const:{}".format(gamma), iterations=2000,
                           initial_point=[1.0, -1.0]), method)
    assert check_monotone_descent(record).passed
    assert record.final.distances[0] < 1e-10


def test_portrait_md_spirals_out_and_omd_converges():
    problem = get_problem("portrait")
    start = problem.solutions[0] + np.array([0.05, 0.0])
    config = RunConfig(problem, geometry="euclidean", schedule="const:0.1", iterations=2000, initial_point=start)
    d0 = 0.5 * 0.05 ** 2

    md = run(config, "md")
    assert np.mean(md.distance_series()[-500:]) >= 10 * d0

    omd = run(config, "omd")
    assert omd.final.distances[0] < 1e-6


def test_noisy_runs_are_reproducible():
    config = RunConfig("scc-quadratic", schedule="power:c=1,p=1", iterations=200,
                       oracle=OracleConfig.gaussian(0.1, seed=4))
    first = run(config, "omd")
    second = run(config, "omd")
    assert np.array_equal(first.points(with_final=True), second.points(with_final=True))
    third = run(RunConfig("scc-quadratic", schedule="power:c=1,p=1", iterations=200,
                          oracle=OracleConfig.gaussian(0.1, seed=5)), "omd")
    assert not np.array_equal(first.points(with_final=True), third.points(with_final=True))


def test_default_start_is_the_center():
    record = run(RunConfig("rock-paper-scissors", iterations=3), "md")
    assert record.initial_point == pytest.approx([1 / 3] * 6)
    assert record.geometry == "auto"


def test_non_finite_gradient_aborts_the_run():
    def field(x):
        if x[0] > 0.75:
            return np.array([np.nan, 0.0])
        return np.array([-1.0, 0.0])

    problem = Problem("cliff", two_player_set(Box([0.0], [1.0]), Box([0.0], [1.0])), lambda x: 0.0, field,
                      solutions=[np.array([1.0, 0.5])], lipschitz=1.0)
    record = run(RunConfig(problem, geometry="euclidean", schedule="const:0.1", iterations=10,
                           initial_point=[0.5, 0.5]), "md")
    assert not record.complete
    assert FLAG_INCOMPLETE in record.flags
    assert [e.n for e in record.entries] == [1, 2, 3]
    assert record.final.n == 4
    assert record.final.point == pytest.approx([0.8, 0.5])
    assert "not finite" in record.abort_reason


def test_omd_outside_window_is_flagged():
    record = run(pennies_config(schedule="const:1.5"), "omd")
    assert FLAG_OUTSIDE_WINDOW in record.flags
    statuses = {c["requirement"]: c["status"] for c in record.certifications}
    assert statuses == {"RobbinsMonro": "fail", "OMDWindow": "fail"}


def test_md_is_not_flagged_for_the_omd_window():
    record = run(pennies_config(schedule="const:1.5"), "md")
    assert FLAG_OUTSIDE_WINDOW not in record.flags


def test_unknown_lipschitz_is_flagged_for_omd():
    problem = Problem("unknown-l", two_player_set(Box([0.0], [1.0]), Box([0.0], [1.0])), lambda x: 0.0,
                      lambda x: np.zeros(2), solutions=[np.array([0.5, 0.5])])
    record = run(RunConfig(problem, iterations=3), "omd")
    assert FLAG_LIPSCHITZ_UNKNOWN in record.flags


def test_robbins_monro_certification_is_recorded():
    record = run(pennies_config(schedule="power:c=1,p=1"), "md")
    assert record.certifications[0] == {"requirement": "RobbinsMonro", "status": "pass", "violated": None}


@pytest.mark.parametrize("factory", [
    lambda: run(pennies_config(initial_point=[1.5, 0.5]), "md"),
    lambda: run(RunConfig("simplex-game", geometry="entropic", initial_point=[1.0, 0.0, 0.5, 0.5]), "md"),
    lambda: run(pennies_config(initial_point=[0.5, 0.5, 0.5]), "md"),
    lambda: run(pennies_config(), "sgd"),
    lambda: run(RunConfig("no-such-problem"), "md"),
    lambda: RunConfig("matching-pennies", schedule="custom:[0.1, 0.1]", iterations=3),
    lambda: RunConfig("matching-pennies", iterations=0),
    lambda: RunConfig("matching-pennies", record_every=0),
    lambda: run(RunConfig("matching-pennies", geometry="entropic"), "md"),
], ids=["infeasible_start", "boundary_start", "start_dimension", "method", "problem", "short_custom",
        "iterations", "record_every", "entropy_on_box"])
def test_configuration_errors(factory):
    with pytest.raises(ConfigError):
        factory()


def test_custom_schedule_with_zero_steps_freezes():
    record = run(pennies_config(schedule="custom:[0.0, 0.0, 0.0]", iterations=3), "md")
    assert record.final.point == pytest.approx(START)
    assert record.final.average == pytest.approx(START)
