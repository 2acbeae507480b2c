import numpy as np
import pytest

from mdsp.errors import ConfigError
from mdsp.problems import PROBLEMS, CoherenceClass, estimate_lipschitz, get_problem
from mdsp.problems.probe import finite_difference_field, gradient_check_error

BUILTIN_LABELS = ["matching-pennies", "portrait", "nonmonotone-ex2", "scc-quadratic", "simplex-game",
                  "rock-paper-scissors"]


def test_all_builtins_are_registered():
    assert set(BUILTIN_LABELS) <= set(PROBLEMS.names())


def test_unknown_problem_is_reported():
    with pytest.raises(KeyError):
        get_problem("no-such-problem")


@pytest.mark.parametrize("label", BUILTIN_LABELS)
def test_gradient_field_matches_finite_differences(label):
    problem = get_problem(label)
    assert gradient_check_error(problem, samples=100, seed=0) < 1e-6


@pytest.mark.parametrize("label", BUILTIN_LABELS)
def test_solutions_are_feasible_stationary_points(label):
    problem = get_problem(label)
    assert problem.solutions
    for solution in problem.solutions:
        assert problem.set.contains(solution)


@pytest.mark.parametrize("label", BUILTIN_LABELS)
def test_gradient_is_finite_on_samples(label):
    problem = get_problem(label)
    rng = np.random.default_rng(0)
    for x in problem.set.sample(rng, 200):
        assert np.all(np.isfinite(problem.gradient(x)))


def test_matching_pennies_field():
    problem = get_problem("matching-pennies")
    assert problem.gradient([1.0, 0.0]) == pytest.approx([-0.5, -0.5])
    assert problem.value([1.0, 0.0]) == pytest.approx(-0.25)
    assert problem.coherence_class is CoherenceClass.NULL
    assert problem.lipschitz == 1.0


def test_portrait_stationary_point():
    problem = get_problem("portrait")
    solution = problem.solutions[0]
    assert solution == pytest.approx([0.40279, 0.59721], abs=1e-4)
    assert np.linalg.norm(problem.gradient(solution)) < 1e-10
    assert problem.coherence_class is CoherenceClass.UNKNOWN
    assert problem.lipschitz > 1.0


def test_nonmonotone_field_at_origin_and_corner():
    problem = get_problem("nonmonotone-ex2")
    assert problem.gradient([0.0, 0.0]) == pytest.approx([0.0, 0.0])
    # f(1, x2) = (x2^2 + 2)(x2^4 - x2^2 + 1) and f(x1, 1) = x1^2 (x1^4 + x1^2 + 1)
    x = np.array([1.0, 1.0])
    assert finite_difference_field(problem, x) == pytest.approx(problem.gradient(x), rel=1e-6)
    assert problem.value(x) == pytest.approx(3.0)


def test_scc_quadratic_defaults():
    problem = get_problem("scc-quadratic")
    assert problem.dim == 2
    assert problem.coherence_class is CoherenceClass.STRICT
    solution = problem.solutions[0]
    assert np.all(np.abs(solution) < 1.0)
    assert np.linalg.norm(problem.gradient(solution)) < 1e-12
    assert problem.params["dim"] == 1


def test_scc_quadratic_is_seeded():
    first = get_problem("scc-quadratic", dim=3, seed=7)
    second = get_problem("scc-quadratic", dim=3, seed=7)
    other = get_problem("scc-quadratic", dim=3, seed=8)
    assert first.dim == 6
    assert np.array_equal(first.solutions[0], second.solutions[0])
    assert not np.array_equal(first.solutions[0], other.solutions[0])


def test_scc_quadratic_with_explicit_data():
    problem = get_problem("scc-quadratic", centers=[[0.2], [-0.3]], coupling_matrix=[[0.0]], curvature=2.0)
    assert problem.solutions[0] == pytest.approx([0.2, -0.3])
    assert problem.lipschitz == pytest.approx(2.0)
    assert problem.gradient([0.0, 0.0]) == pytest.approx([-0.4, 0.6])


def test_scc_quadratic_rejects_exterior_saddle():
    with pytest.raises(ConfigError):
        get_problem("scc-quadratic", centers=[[1.5], [0.0]], coupling_matrix=[[0.0]])


def test_scc_quadratic_shrinks_coupling_until_interior():
    problem = get_problem("scc-quadratic", centers=[[0.9], [0.9]], coupling_matrix=[[0.414]])
    assert problem.solutions[0] == pytest.approx([0.798, 0.9826], abs=1e-3)
    assert problem.params["coupling_matrix"][0][0] == pytest.approx(0.1035)


def test_scc_quadratic_gives_up_after_retries():
    with pytest.raises(ConfigError):
        get_problem("scc-quadratic", centers=[[0.9], [0.9]], coupling_matrix=[[0.414]], max_retries=1)


def test_zero_payoff_game_is_null():
    problem = get_problem("simplex-game", payoff=[[0.0, 0.0], [0.0, 0.0]])
    assert problem.coherence_class is CoherenceClass.NULL
    assert problem.solutions[0] == pytest.approx([0.5, 0.5, 0.5, 0.5])


def test_matching_pennies_simplex_game():
    problem = get_problem("simplex-game")
    assert problem.coherence_class is CoherenceClass.NULL
    assert problem.solutions[0] == pytest.approx([0.5, 0.5, 0.5, 0.5])
    assert problem.lipschitz == pytest.approx(2.0)
    assert problem.lipschitz_entropic == pytest.approx(1.0)


def test_pure_equilibrium_game_is_coherent():
    problem = get_problem("simplex-game", payoff=[[1.0, 2.0], [3.0, 4.0]])
    assert problem.coherence_class is CoherenceClass.COHERENT
    assert problem.solutions[0] == pytest.approx([1.0, 0.0, 0.0, 1.0])


def test_rock_paper_scissors():
    problem = get_problem("rock-paper-scissors")
    assert problem.label == "rock-paper-scissors"
    assert problem.coherence_class is CoherenceClass.NULL
    assert problem.solutions[0] == pytest.approx([1 / 3] * 6)


def test_lipschitz_estimate_of_linear_field():
    problem = get_problem("matching-pennies")
    assert estimate_lipschitz(problem, samples=500, seed=0) == pytest.approx(1.0, abs=1e-9)


def test_lipschitz_estimate_is_a_lower_bound():
    problem = get_problem("scc-quadratic", dim=2, seed=3)
    estimate = estimate_lipschitz(problem, samples=1000, seed=0)
    assert problem.params["curvature"] - 1e-9 <= estimate <= problem.lipschitz + 1e-9


def test_lipschitz_estimate_needs_two_samples():
    with pytest.raises(ConfigError):
        estimate_lipschitz(get_problem("matching-pennies"), samples=1)
