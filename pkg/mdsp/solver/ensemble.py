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
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import List

from tqdm import tqdm

from mdsp.errors import ConfigError
from mdsp.mdsp_logger import logger, quieted, set_log_level
from mdsp.problems.base import Problem
from mdsp.solver.algo import RunConfig, run
from mdsp.solver.record import RunRecord


def default_workers() -> int:
    return os.cpu_count() or 1


def member_configs(config: RunConfig, runs: int) -> List[RunConfig]:
    return [config.for_run(i) for i in range(runs)]


def ships_to_workers(config: RunConfig) -> bool:
    """Only problems given by registry label can be rebuilt inside a worker process."""
    return not isinstance(config.problem, Problem)


def run_ensemble(config: RunConfig, method: str, runs: int, workers: int = 0, progress: bool = True) -> List[RunRecord]:
    """
    Independent runs sharing the problem and schedule; run i draws its oracle noise from
    (seed, i). Records come back ordered by run index whatever the completion order.

    Members run in worker processes when the problem is given by label. A problem object
    built in memory keeps all members in this process.
    """
    if runs < 1:
        raise ConfigError("Ensemble size must be positive, got {}".format(runs))
    problem = config.resolve_problem()
    workers = min(workers or default_workers(), runs)
    if not ships_to_workers(config):
        workers = 1
    logger.info("Running {} x {} on {} with {} workers".format(runs, method, problem.label, workers))

    records = [None] * runs
    # Member runs log warnings only.
    with quieted():
        if workers == 1:
            for i in tqdm(range(runs), desc="ensemble", disable=not progress):
                records[i] = run(config.with_problem(problem, config.oracle.for_run(i)), method)
            return records
        with ProcessPoolExecutor(max_workers=workers, initializer=set_log_level,
                                 initargs=(logger.level,)) as executor:
            futures = {executor.submit(run, cfg, method): i for i, cfg in enumerate(member_configs(config, runs))}
            for future in tqdm(as_completed(futures), total=runs, desc="ensemble", disable=not progress):
                records[futures[future]] = future.result()
    return records
