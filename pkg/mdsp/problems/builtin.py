"""
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at
      http://www.apache.org/licenses/LICENSE-2.0
 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.

Builtin benchmark problems, addressable by label through the PROBLEMS registry.
"""
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import root

from mdsp.errors import ConfigError, DimensionMismatch
from mdsp.geometry.blocks import Box, Simplex, two_player_set
from mdsp.mdsp_logger import logger
from mdsp.problems.base import CoherenceClass, Problem, SamplingPlan
from mdsp.problems.equilibrium import is_interior, solve_zero_sum
from mdsp.problems.probe import estimate_lipschitz
from mdsp.registry import Registry

PROBLEMS = Registry("problem")

MATCHING_PENNIES_PAYOFF = np.array([[1.0, -1.0], [-1.0, 1.0]])
ROCK_PAPER_SCISSORS_PAYOFF = np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])

PORTRAIT_ROOT_TOL = 1e-10
LIPSCHITZ_SAMPLES = 4000


def unit_square():
    return two_player_set(Box([0.0], [1.0]), Box([0.0], [1.0]))


@PROBLEMS.register("matching-pennies")
def builtin_matching_pennies() -> Problem:
    """f(x1, x2) = (x1 - 1/2)(x2 - 1/2) on [0, 1]^2."""

    def value(x):
        return (x[0] - 0.5) * (x[1] - 0.5)

    def field(x):
        return np.array([x[1] - 0.5, -(x[0] - 0.5)])

    return Problem("matching-pennies", unit_square(), value, field,
                   solutions=[np.array([0.5, 0.5])],
                   coherence_class=CoherenceClass.NULL,
                   lipschitz=1.0,
                   description="Matching pennies in mixed-strategy box form")


def _portrait_terms(x):
    a = x[0] - 0.25
    b = x[1] - 0.75
    bump = np.exp(-a * a - b * b) / 3.0
    return a, b, bump


@PROBLEMS.register("portrait")
def builtin_portrait_problem() -> Problem:
    """
    f(x1, x2) = (x1 - 1/2)(x2 - 1/2) + exp(-(x1 - 1/4)^2 - (x2 - 3/4)^2) / 3 on [0, 1]^2.

    The stationary point is located numerically. The VI residual changes sign around it,
    so the coherence class is left undetermined.
    """

    def value(x):
        a, b, bump = _portrait_terms(x)
        return (x[0] - 0.5) * (x[1] - 0.5) + bump

    def field(x):
        a, b, bump = _portrait_terms(x)
        return np.array([(x[1] - 0.5) - 2.0 * a * bump,
                         -((x[0] - 0.5) - 2.0 * b * bump)])

    def jacobian(x):
        a, b, bump = _portrait_terms(x)
        cross = 1.0 + 4.0 * a * b * bump
        return np.array([[(4.0 * a * a - 2.0) * bump, cross],
                         [-cross, -(4.0 * b * b - 2.0) * bump]])

    found = root(field, np.array([0.5, 0.5]), jac=jacobian, method="hybr", tol=1e-14)
    stationary = found.x
    if np.linalg.norm(field(stationary)) > PORTRAIT_ROOT_TOL or not unit_square().contains(stationary):
        raise ConfigError("Failed to locate the stationary point of the portrait problem: {}".format(found.message))
    logger.debug("Portrait stationary point: {}".format(stationary.tolist()))

    problem = Problem("portrait", unit_square(), value, field,
                      solutions=[stationary],
                      coherence_class=CoherenceClass.UNKNOWN,
                      description="Bilinear term plus a Gaussian bump; vanilla mirror descent spirals outwards")
    problem.lipschitz = estimate_lipschitz(problem, LIPSCHITZ_SAMPLES, seed=0)
    return problem


@PROBLEMS.register("nonmonotone-ex2")
def builtin_nonmonotone_example() -> Problem:
    """f(x1, x2) = (x1^4 x2^2 + x1^2 + 1)(x1^2 x2^4 - x2^2 + 1) on [-1, 1]^2; not quasi-monotone."""

    def value(x):
        x1, x2 = x
        return (x1 ** 4 * x2 ** 2 + x1 ** 2 + 1.0) * (x1 ** 2 * x2 ** 4 - x2 ** 2 + 1.0)

    def field(x):
        x1, x2 = x
        p1 = x1 ** 4 * x2 ** 2 + x1 ** 2 + 1.0
        p2 = x1 ** 2 * x2 ** 4 - x2 ** 2 + 1.0
        d1 = (4.0 * x1 ** 3 * x2 ** 2 + 2.0 * x1) * p2 + p1 * 2.0 * x1 * x2 ** 4
        d2 = 2.0 * x1 ** 4 * x2 * p2 + p1 * (4.0 * x1 ** 2 * x2 ** 3 - 2.0 * x2)
        return np.array([d1, -d2])

    product_set = two_player_set(Box([-1.0], [1.0]), Box([-1.0], [1.0]))
    problem = Problem("nonmonotone-ex2", product_set, value, field,
                      solutions=[np.zeros(2)],
                      coherence_class=CoherenceClass.COHERENT,
                      description="Coherent but not quasi-monotone polynomial problem")
    problem.lipschitz = estimate_lipschitz(problem, LIPSCHITZ_SAMPLES, seed=0)
    return problem


@PROBLEMS.register("scc-quadratic")
def builtin_strictly_convex_concave(dim: int = 1, curvature: float = 1.0, coupling: float = 0.1, seed: int = 0,
                                    centers: Optional[Sequence[Sequence[float]]] = None,
                                    coupling_matrix: Optional[Sequence[Sequence[float]]] = None,
                                    max_retries: int = 10) -> Problem:
    """
    f(x1, x2) = k/2 ||x1 - c1||^2 - k/2 ||x2 - c2||^2 + x1^T B x2 on [-1, 1]^dim x [-1, 1]^dim.

    Centers are drawn from [-0.5, 0.5]^dim and B from coupling * U[-1, 1] unless given. The
    coupling is halved until the saddle point is interior.
    """
    dim = int(dim)
    if dim < 1:
        raise ConfigError("Dimension must be positive, got {}".format(dim))
    if not curvature > 0:
        raise ConfigError("Curvature must be positive, got {}".format(curvature))
    rng = np.random.default_rng(seed)
    if centers is None:
        c1 = rng.uniform(-0.5, 0.5, dim)
        c2 = rng.uniform(-0.5, 0.5, dim)
    else:
        c1, c2 = (np.asarray(c, dtype=np.float64) for c in centers)
    if coupling_matrix is None:
        b = coupling * rng.uniform(-1.0, 1.0, (dim, dim))
    else:
        b = np.asarray(coupling_matrix, dtype=np.float64)
    if c1.shape != (dim,) or c2.shape != (dim,) or b.shape != (dim, dim):
        raise DimensionMismatch("Centers must have length {} and the coupling must be {}x{}".format(dim, dim, dim))

    eye = np.eye(dim)
    for _ in range(max_retries + 1):
        system = np.block([[curvature * eye, b], [-b.T, curvature * eye]])
        saddle = np.linalg.solve(system, curvature * np.concatenate([c1, c2]))
        if np.all(np.abs(saddle) < 1.0):
            break
        b = 0.5 * b
    else:
        raise ConfigError("Saddle point of the quadratic problem is not interior: {}".format(saddle.tolist()))

    def value(x):
        x1, x2 = x[:dim], x[dim:]
        return (0.5 * curvature * np.dot(x1 - c1, x1 - c1) - 0.5 * curvature * np.dot(x2 - c2, x2 - c2)
                + x1 @ b @ x2)

    def field(x):
        x1, x2 = x[:dim], x[dim:]
        return np.concatenate([curvature * (x1 - c1) + b @ x2, curvature * (x2 - c2) - b.T @ x1])

    product_set = two_player_set(Box(-np.ones(dim), np.ones(dim)), Box(-np.ones(dim), np.ones(dim)))
    return Problem("scc-quadratic", product_set, value, field,
                   solutions=[saddle],
                   coherence_class=CoherenceClass.STRICT,
                   lipschitz=float(np.sqrt(curvature ** 2 + np.linalg.norm(b, 2) ** 2)),
                   description="Strictly convex-concave quadratic with bilinear coupling",
                   params={"dim": dim, "curvature": curvature, "seed": seed, "c1": c1.tolist(), "c2": c2.tolist(),
                           "coupling_matrix": b.tolist()})


@PROBLEMS.register("simplex-game")
def builtin_simplex_game(payoff: Optional[Sequence[Sequence[float]]] = None, label: str = "simplex-game") -> Problem:
    """
    f(x1, x2) = x1^T A x2 on a product of simplices. Equilibria come from support enumeration
    (linear programming for larger or degenerate games); an interior equilibrium makes the
    game null-coherent.
    """
    payoff = MATCHING_PENNIES_PAYOFF if payoff is None else np.asarray(payoff, dtype=np.float64)
    if payoff.ndim != 2 or payoff.size == 0:
        raise DimensionMismatch("Payoff must be a nonempty matrix, got shape {}".format(payoff.shape))
    if not np.all(np.isfinite(payoff)):
        raise ConfigError("Payoff matrix must be finite")
    n_rows, n_cols = payoff.shape

    def value(x):
        return float(x[:n_rows] @ payoff @ x[n_rows:])

    def field(x):
        return np.concatenate([payoff @ x[n_rows:], -(payoff.T @ x[:n_rows])])

    if not np.any(payoff):
        # Every profile is an equilibrium; the uniform one stands for the set.
        equilibria = [(np.full(n_rows, 1.0 / n_rows), np.full(n_cols, 1.0 / n_cols))]
        coherence = CoherenceClass.NULL
    else:
        equilibria = solve_zero_sum(payoff)
        coherence = CoherenceClass.NULL if any(is_interior(e) for e in equilibria) else CoherenceClass.COHERENT

    return Problem(label, two_player_set(Simplex(n_rows), Simplex(n_cols)), value, field,
                   solutions=[np.concatenate(e) for e in equilibria],
                   coherence_class=coherence,
                   lipschitz=float(np.linalg.norm(payoff, 2)),
                   lipschitz_entropic=float(np.max(np.abs(payoff))),
                   sampling_plan=SamplingPlan(SamplingPlan.RANDOM, samples=1000),
                   description="Zero-sum matrix game on the product of simplices",
                   params={"payoff": payoff.tolist()})


@PROBLEMS.register("rock-paper-scissors")
def builtin_rock_paper_scissors() -> Problem:
    return builtin_simplex_game(ROCK_PAPER_SCISSORS_PAYOFF, label="rock-paper-scissors")


def get_problem(label: str, **kwargs) -> Problem:
    return PROBLEMS.get(label)(**kwargs)
