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
"""
import time
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from mdsp.errors import ConfigError, DimensionMismatch, DomainError, NonFiniteInput
from mdsp.geometry.geometry import Geometry
from mdsp.mdsp_logger import logger
from mdsp.oracle import OracleConfig, OracleState, bound_report
from mdsp.problems.base import Problem
from mdsp.problems.builtin import get_problem
from mdsp.registry import Registry
from mdsp.schedulers import CustomSchedule, OMDWindow, RobbinsMonro, StepSchedule, certify, parse_schedule
from mdsp.solver.record import FinalState, RecordEntry, RunRecord

SOLVERS = Registry("solver")

FLAG_OUTSIDE_WINDOW = "omd-outside-certified-window"
FLAG_LIPSCHITZ_UNKNOWN = "lipschitz-unknown"
FLAG_INCOMPLETE = "incomplete"


def _check_step_size(gamma: float):
    if not np.isfinite(gamma) or gamma < 0:
        raise ConfigError("Step size must be finite and nonnegative, got {}".format(gamma))


def md_step(geometry: Geometry, problem: Problem, oracle_state: OracleState, x: np.ndarray,
            gamma: float) -> np.ndarray:
    """X_{n+1} = prox_{X_n}(-gamma_n g_n)"""
    _check_step_size(gamma)
    return geometry.prox(x, -gamma * oracle_state.query(problem, x))


def omd_step(geometry: Geometry, problem: Problem, oracle_state: OracleState, x: np.ndarray,
             gamma: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    X_{n+1/2} = prox_{X_n}(-gamma_n g_n)
    X_{n+1}   = prox_{X_n}(-gamma_n g_{n+1/2})

    Both prox steps are based at X_n.
    """
    _check_step_size(gamma)
    half = geometry.prox(x, -gamma * oracle_state.query(problem, x))
    return half, geometry.prox(x, -gamma * oracle_state.query(problem, half))


class SolverMethod:
    name = None  # type: str
    queries_per_step = 1

    @staticmethod
    def step(geometry, problem, oracle_state, x, gamma) -> Tuple[Optional[np.ndarray], np.ndarray]:
        raise NotImplementedError


@SOLVERS.register("md")
class MirrorDescent(SolverMethod):
    name = "md"
    queries_per_step = 1

    @staticmethod
    def step(geometry, problem, oracle_state, x, gamma):
        return None, md_step(geometry, problem, oracle_state, x, gamma)


@SOLVERS.register("omd")
class OptimisticMirrorDescent(SolverMethod):
    name = "omd"
    queries_per_step = 2

    @staticmethod
    def step(geometry, problem, oracle_state, x, gamma):
        return omd_step(geometry, problem, oracle_state, x, gamma)


def ergodic_average(weights: Sequence[float], iterates: Sequence[np.ndarray]) -> np.ndarray:
    """sum_k gamma_k X_k / sum_k gamma_k; the plain mean when every weight is zero."""
    weights = np.asarray(weights, dtype=np.float64)
    iterates = np.asarray(iterates, dtype=np.float64)
    if weights.ndim != 1 or iterates.ndim != 2 or weights.shape[0] != iterates.shape[0]:
        raise DimensionMismatch("Got {} weights for {} iterates".format(weights.shape, iterates.shape))
    if weights.shape[0] == 0:
        raise DimensionMismatch("Ergodic average of an empty trajectory")
    total = np.sum(weights)
    if total == 0:
        return np.mean(iterates, axis=0)
    return np.sum(weights[:, None] * iterates, axis=0) / total


class ErgodicAverager:
    """Running form of `ergodic_average`."""

    def __init__(self, dim: int):
        self._weighted_sum = np.zeros(dim)
        self._plain_sum = np.zeros(dim)
        self._total_weight = 0.0
        self._count = 0

    def update(self, gamma: float, x: np.ndarray) -> np.ndarray:
        self._weighted_sum += gamma * x
        self._plain_sum += x
        self._total_weight += gamma
        self._count += 1
        return self.value

    @property
    def value(self) -> np.ndarray:
        if self._total_weight == 0:
            return self._plain_sum / self._count
        return self._weighted_sum / self._total_weight


class RunConfig:
    def __init__(self, problem: Union[str, Problem], geometry: str = "auto",
                 schedule: Union[str, StepSchedule] = "const:0.1",
                 oracle: Optional[OracleConfig] = None,
                 iterations: int = 1000,
                 initial_point: Optional[Sequence[float]] = None,
                 record_every: int = 1,
                 problem_params: Optional[dict] = None):
        if int(iterations) < 1:
            raise ConfigError("Number of iterations must be positive, got {}".format(iterations))
        if int(record_every) < 1:
            raise ConfigError("record_every must be positive, got {}".format(record_every))
        self.problem = problem
        self.geometry = geometry
        self.schedule = parse_schedule(schedule) if isinstance(schedule, str) else schedule
        self.oracle = oracle if oracle is not None else OracleConfig.exact()
        self.iterations = int(iterations)
        self.initial_point = None if initial_point is None else np.asarray(initial_point, dtype=np.float64)
        self.record_every = int(record_every)
        self.problem_params = problem_params or {}
        if isinstance(self.schedule, CustomSchedule) and len(self.schedule.steps) < self.iterations:
            raise ConfigError("Custom schedule lists {} step sizes for {} iterations".format(
                len(self.schedule.steps), self.iterations))

    def resolve_problem(self) -> Problem:
        if isinstance(self.problem, Problem):
            return self.problem
        try:
            return get_problem(self.problem, **self.problem_params)
        except KeyError as e:
            raise ConfigError(str(e))
        except TypeError as e:
            raise ConfigError("Bad parameters for problem {}: {}".format(self.problem, e))

    def with_problem(self, problem: Union[str, Problem], oracle: Optional[OracleConfig] = None) -> 'RunConfig':
        return RunConfig(problem, self.geometry, self.schedule, oracle if oracle is not None else self.oracle,
                         self.iterations, self.initial_point, self.record_every, self.problem_params)

    def for_run(self, run_index: int) -> 'RunConfig':
        """Ensemble member `run_index`: same problem reference, its own noise stream."""
        return self.with_problem(self.problem, self.oracle.for_run(run_index))


def _initial_point(config: RunConfig, geometry: Geometry) -> np.ndarray:
    if config.initial_point is None:
        return geometry.default_point()
    x0 = config.initial_point
    try:
        if not geometry.set.contains(x0):
            raise ConfigError("Initial point {} is not feasible".format(x0.tolist()))
        return geometry.check_prox_base(x0)
    except (DomainError, DimensionMismatch) as e:
        raise ConfigError("Invalid initial point: {}".format(e))


def _certify(record: RunRecord, config: RunConfig, method: SolverMethod, problem: Problem, geometry: Geometry):
    record.certifications.append(certify(config.schedule, RobbinsMonro()).to_dict())
    lipschitz = problem.lipschitz_for(geometry)
    if lipschitz is None or lipschitz <= 0:
        if method.name == "omd":
            logger.warning("No Lipschitz constant known for {} in {} geometry, OMD step window not checked".format(
                problem.label, geometry.name))
            record.flag(FLAG_LIPSCHITZ_UNKNOWN)
        return
    window = certify(config.schedule, OMDWindow(geometry.alpha, lipschitz))
    record.certifications.append(window.to_dict())
    if method.name == "omd" and config.oracle.is_exact and not window.passed:
        logger.warning("OMD on {} runs outside its certified step window: {}".format(problem.label, window))
        record.flag(FLAG_OUTSIDE_WINDOW)


def run(config: RunConfig, method: str = "md") -> RunRecord:
    """
    Iterates the chosen method from the initial point for `config.iterations` steps.
    Row n holds X_n and the diagnostics taken there; X_{N+1} is kept as the record's final state.
    A numerical failure ends the run early with the record flagged incomplete.
    """
    try:
        solver = SOLVERS.get(method)
    except KeyError as e:
        raise ConfigError(str(e))
    problem = config.resolve_problem()
    geometry = Geometry.from_name(problem.set, config.geometry)
    x = _initial_point(config, geometry)

    record = RunRecord(solver.name, problem.label, problem.dim, problem.solutions,
                       geometry=geometry.name, schedule=config.schedule.to_spec(), oracle=config.oracle.to_dict(),
                       record_every=config.record_every, initial_point=x.copy(),
                       metadata={"alpha": geometry.alpha, "lipschitz": problem.lipschitz_for(geometry),
                                 "m_squared": bound_report(OracleState(config.oracle), problem, geometry=geometry),
                                 "set": problem.set.to_dict(), "dgfs": [d.name for d in geometry.dgfs],
                                 "schedule_flags": config.schedule.flags(), "problem_params": problem.params})
    _certify(record, config, solver, problem, geometry)

    oracle_state = OracleState(config.oracle)
    averager = ErgodicAverager(problem.dim)
    start = time.perf_counter()
    n = 1
    average = None
    for n in range(1, config.iterations + 1):
        gamma = config.schedule.step_at(n)
        average = averager.update(gamma, x)
        distances = [geometry.bregman(s, x) for s in problem.solutions]
        try:
            half, x_next = solver.step(geometry, problem, oracle_state, x, gamma)
        except (NonFiniteInput, DomainError) as e:
            logger.error("{} on {} aborted at step {}: {}".format(solver.name, problem.label, n, e))
            record.complete = False
            record.abort_reason = str(e)
            record.flag(FLAG_INCOMPLETE)
            break
        if (n - 1) % config.record_every == 0:
            record.append(RecordEntry(n, gamma, x, half, average, distances, oracle_state.query_count))
        logger.debug("step {}: gamma={:.6g} D={}".format(n, gamma, distances))
        x = x_next
    else:
        n = config.iterations + 1
    record.final = FinalState(n, x, [geometry.bregman(s, x) for s in problem.solutions], oracle_state.query_count,
                              average)
    record.duration = time.perf_counter() - start
    logger.info("{} on {}: {} iterations, final D = {}, {} queries".format(
        solver.name, problem.label, n - 1, ["{:.6e}".format(d) for d in record.final.distances],
        oracle_state.query_count))
    return record
