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
from typing import Callable, Optional

import numpy as np

from mdsp.registry import Registry

ADAPTIVE_PROBLEMS = Registry("unconstrained problem")


class UnconstrainedProblem:
    """min over the first `split` coordinates, max over the rest, of f on all of R^dim."""

    def __init__(self, label: str, dim: int, split: int, value: Callable[[np.ndarray], float],
                 gradient_field: Callable[[np.ndarray], np.ndarray], solution: Optional[np.ndarray] = None,
                 default_start: Optional[np.ndarray] = None):
        self.label = label
        self.dim = dim
        self.split = split
        self._value = value
        self._gradient_field = gradient_field
        self.solution = solution
        self.default_start = np.ones(dim) if default_start is None else default_start

    def value(self, theta) -> float:
        return float(self._value(np.asarray(theta, dtype=np.float64)))

    def gradient(self, theta) -> np.ndarray:
        return np.asarray(self._gradient_field(np.asarray(theta, dtype=np.float64)), dtype=np.float64)


@ADAPTIVE_PROBLEMS.register("bilinear")
def bilinear() -> UnconstrainedProblem:
    """f = theta1 * theta2"""
    return UnconstrainedProblem("bilinear", 2, 1, lambda th: th[0] * th[1],
                                lambda th: np.array([th[1], -th[0]]), solution=np.zeros(2))


@ADAPTIVE_PROBLEMS.register("quadratic-saddle")
def quadratic_saddle() -> UnconstrainedProblem:
    """f = (theta1^2 - theta2^2) / 2"""
    return UnconstrainedProblem("quadratic-saddle", 2, 1, lambda th: 0.5 * (th[0] ** 2 - th[1] ** 2),
                                lambda th: np.array([th[0], th[1]]), solution=np.zeros(2))


@ADAPTIVE_PROBLEMS.register("zero")
def zero() -> UnconstrainedProblem:
    """f = 0, every point is stationary"""
    return UnconstrainedProblem("zero", 2, 1, lambda th: 0.0, lambda th: np.zeros(2))
