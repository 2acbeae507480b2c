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
from typing import Optional, Sequence, Union

import numpy as np

from mdsp.adaptive.optimizers import ADAPTIVE_OPTIMIZERS, AdamHyperparams, AdamState
from mdsp.adaptive.problems import ADAPTIVE_PROBLEMS, UnconstrainedProblem
from mdsp.errors import ConfigError, NonFiniteGradient
from mdsp.mdsp_logger import logger
from mdsp.solver.record import FinalState, RecordEntry, RunRecord

DIVERGENCE_NORM = 1e12


def _resolve(problem: Union[str, UnconstrainedProblem]) -> UnconstrainedProblem:
    if isinstance(problem, UnconstrainedProblem):
        return problem
    try:
        return ADAPTIVE_PROBLEMS.get(problem)()
    except KeyError as e:
        raise ConfigError(str(e))


def run_adaptive(problem: Union[str, UnconstrainedProblem], optimizer: str = "optimistic-adam",
                 hyperparams: AdamHyperparams = AdamHyperparams(), iterations: int = 1000, seed: int = 0,
                 sigma: float = 0.0, initial_point: Optional[Sequence[float]] = None,
                 record_every: int = 1) -> RunRecord:
    """
    Row n holds the parameters at the start of step n, the waiting point of optimistic
    methods and ||theta - theta*|| when the problem knows its solution.
    """
    problem = _resolve(problem)
    try:
        step_fn = ADAPTIVE_OPTIMIZERS.get(optimizer)
    except KeyError as e:
        raise ConfigError(str(e))
    if iterations < 1 or record_every < 1:
        raise ConfigError("iterations and record_every must be positive")
    if sigma < 0:
        raise ConfigError("Gradient noise scale must be nonnegative, got {}".format(sigma))

    rng = np.random.default_rng(seed)

    def grad(theta):
        g = problem.gradient(theta)
        if sigma > 0:
            g = g + sigma * rng.standard_normal(g.shape[0])
        return g

    start_point = problem.default_start if initial_point is None else np.asarray(initial_point, dtype=np.float64)
    if start_point.shape != (problem.dim,):
        raise ConfigError("Initial point must have {} coordinates, got {}".format(problem.dim, start_point.shape))
    state = AdamState.initial(start_point, hyperparams)
    solutions = [] if problem.solution is None else [problem.solution]

    def distances(theta):
        return [float(np.linalg.norm(theta - s)) for s in solutions]

    record = RunRecord(optimizer, problem.label, problem.dim, solutions, schedule="lr:{!r}".format(hyperparams.lr),
                       oracle={"mode": "gaussian" if sigma > 0 else "exact", "sigma": sigma, "seed": seed},
                       record_every=record_every, initial_point=state.theta.copy(),
                       distance_kind=RunRecord.DISTANCE_NORM, metadata={"hyperparams": hyperparams.to_dict()})
    begin = time.perf_counter()
    n = 1
    for n in range(1, iterations + 1):
        theta = state.theta
        try:
            state = step_fn(state, grad)
        except NonFiniteGradient as e:
            logger.error("{} on {} aborted at step {}: {}".format(optimizer, problem.label, n, e))
            record.complete = False
            record.abort_reason = str(e)
            break
        if (n - 1) % record_every == 0:
            record.append(RecordEntry(n, hyperparams.lr, theta, state.waiting, None, distances(theta),
                                      state.evaluations))
        if np.linalg.norm(state.theta) > DIVERGENCE_NORM:
            logger.warning("{} on {} diverged at step {}".format(optimizer, problem.label, n))
            record.diverged = True
            record.complete = False
            record.abort_reason = "parameter norm exceeded {:.0e}".format(DIVERGENCE_NORM)
            n += 1
            break
    else:
        n = iterations + 1
    record.final = FinalState(n, state.theta, distances(state.theta), state.evaluations)
    record.duration = time.perf_counter() - begin
    logger.info("{} on {}: final |theta| = {:.6e}, {} gradient evaluations".format(
        optimizer, problem.label, float(np.linalg.norm(state.theta)), state.evaluations))
    return record
