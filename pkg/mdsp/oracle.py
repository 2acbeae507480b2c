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
from enum import Enum
from typing import Optional

import numpy as np

from mdsp.errors import ConfigError, DomainError, NonFiniteInput
from mdsp.problems.base import Problem

QUERY_MEMBERSHIP_TOL = 1e-9


class OracleMode(Enum):
    EXACT = "exact"
    GAUSSIAN = "gaussian"

    @staticmethod
    def from_str(config_value: str) -> 'OracleMode':
        if config_value == OracleMode.EXACT.value:
            return OracleMode.EXACT
        if config_value == OracleMode.GAUSSIAN.value:
            return OracleMode.GAUSSIAN
        raise ConfigError("Unknown oracle mode string: {}".format(config_value))


class OracleConfig:
    """
    Exact gradients, or gradients perturbed by i.i.d. isotropic Gaussian noise of
    per-coordinate standard deviation `sigma`. Ensemble members share `seed` and
    differ by `run_index`, which is mixed into the seed sequence.
    """

    def __init__(self, mode: OracleMode = OracleMode.EXACT, sigma: float = 0.0, seed: int = 0,
                 run_index: Optional[int] = None):
        if sigma < 0 or not np.isfinite(sigma):
            raise ConfigError("Noise scale must be a finite nonnegative number, got {}".format(sigma))
        if mode is OracleMode.EXACT and sigma != 0:
            raise ConfigError("Exact oracle requires sigma = 0, got {}".format(sigma))
        self.mode = mode
        self.sigma = float(sigma)
        self.seed = int(seed)
        self.run_index = run_index

    @classmethod
    def exact(cls, seed: int = 0) -> 'OracleConfig':
        return cls(OracleMode.EXACT, 0.0, seed)

    @classmethod
    def gaussian(cls, sigma: float, seed: int = 0) -> 'OracleConfig':
        return cls(OracleMode.GAUSSIAN, sigma, seed)

    @classmethod
    def from_sigma(cls, sigma: float, seed: int = 0) -> 'OracleConfig':
        return cls.gaussian(sigma, seed) if sigma > 0 else cls.exact(seed)

    @property
    def is_exact(self) -> bool:
        return self.mode is OracleMode.EXACT or self.sigma == 0.0

    def for_run(self, run_index: int) -> 'OracleConfig':
        return OracleConfig(self.mode, self.sigma, self.seed, run_index)

    def make_rng(self) -> np.random.Generator:
        if self.run_index is None:
            return np.random.default_rng(self.seed)
        return np.random.default_rng([self.seed, self.run_index])

    def to_dict(self) -> dict:
        return {"mode": self.mode.value, "sigma": self.sigma, "seed": self.seed, "run_index": self.run_index}

    def __repr__(self):
        return "OracleConfig({})".format(self.to_dict())


class OracleState:
    def __init__(self, config: OracleConfig):
        self.config = config
        self.rng = config.make_rng()
        self.query_count = 0

    def query(self, problem: Problem, point: np.ndarray) -> np.ndarray:
        if not problem.set.contains(point, QUERY_MEMBERSHIP_TOL):
            raise DomainError("Oracle queried outside the feasible set at {}".format(point))
        grad = problem.gradient(point)
        if not np.all(np.isfinite(grad)):
            raise NonFiniteInput("Gradient field of {} is not finite at {}: {}".format(problem.label, point, grad))
        self.query_count += 1
        if self.config.mode is OracleMode.GAUSSIAN:
            grad = grad + self.config.sigma * self.rng.standard_normal(grad.shape[0])
        return grad


def query(state: OracleState, problem: Problem, point: np.ndarray) -> np.ndarray:
    return state.query(problem, point)


def bound_report(state: OracleState, problem: Problem, samples: int = 1000, geometry=None) -> float:
    """
    Operative mean-square bound M^2: the largest ||g(x)||_*^2 over seeded samples and the
    vertices of the set, plus dim * sigma^2. Uses its own generator, so the query stream
    of `state` is left untouched.
    """
    rng = np.random.default_rng(state.config.seed)
    points = problem.set.sample(rng, samples)
    vertices = problem.set.vertices()
    if len(vertices):
        points = np.concatenate([points, vertices])
    dual_norm = geometry.dual_norm if geometry is not None else np.linalg.norm
    sup_sq = max(float(dual_norm(problem.gradient(x))) ** 2 for x in points)
    return sup_sq + problem.dim * state.config.sigma ** 2
