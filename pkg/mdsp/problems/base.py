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
from typing import Callable, Optional, Sequence

import numpy as np

from mdsp.errors import ConfigError
from mdsp.geometry.blocks import ProductSet, as_vector

MAX_GRID_POINTS = 10 ** 6


class CoherenceClass(Enum):
    STRICT = "strict"
    NULL = "null"
    COHERENT = "coherent"
    UNKNOWN = "unknown"
    # Only produced by the coherence probe.
    INCONCLUSIVE = "inconclusive"

    @staticmethod
    def from_str(config_value: str) -> 'CoherenceClass':
        for member in CoherenceClass:
            if member.value == config_value.lower():
                return member
        raise ConfigError("Unknown coherence class string: {}".format(config_value))

    def refines(self, declared: 'CoherenceClass') -> bool:
        """Whether a probe outcome is consistent with a declared class (strict and null refine coherent)."""
        if declared is CoherenceClass.UNKNOWN:
            return True
        if self is declared:
            return True
        return declared is CoherenceClass.COHERENT and self in (CoherenceClass.STRICT, CoherenceClass.NULL)


class SamplingPlan:
    """Points at which VI residuals are evaluated: a regular grid (box-only sets) or seeded samples."""

    GRID = "grid"
    RANDOM = "random"

    def __init__(self, kind: str = RANDOM, grid_points: int = 101, samples: int = 2000, seed: int = 0,
                 include_vertices: bool = True):
        if kind not in (self.GRID, self.RANDOM):
            raise ConfigError("Unknown sampling plan kind: {}".format(kind))
        if kind == self.GRID and grid_points < 2:
            raise ConfigError("A grid needs at least 2 points per axis")
        if kind == self.RANDOM and samples < 1:
            raise ConfigError("A random plan needs at least one sample")
        self.kind = kind
        self.grid_points = int(grid_points)
        self.samples = int(samples)
        self.seed = int(seed)
        self.include_vertices = include_vertices

    def points(self, product_set: ProductSet) -> np.ndarray:
        if self.kind == self.GRID:
            if self.grid_points ** product_set.dim > MAX_GRID_POINTS:
                raise ConfigError("A {}-point grid in dimension {} is too large, use random sampling".format(
                    self.grid_points, product_set.dim))
            pts = product_set.grid(self.grid_points)
        else:
            rng = np.random.default_rng(self.seed)
            pts = product_set.sample(rng, self.samples)
        if self.include_vertices:
            vertices = product_set.vertices()
            if len(vertices):
                pts = np.concatenate([pts, vertices])
        return pts

    def to_dict(self) -> dict:
        return {"kind": self.kind, "grid_points": self.grid_points, "samples": self.samples, "seed": self.seed,
                "include_vertices": self.include_vertices}


class Problem:
    """
    A saddle-point problem min_{x1} max_{x2} f(x1, x2) on a product set, described by its value
    function and by the joint gradient field g = (df/dx1, -df/dx2).

    `lipschitz` is the Lipschitz constant of g in the Euclidean pairing; `lipschitz_entropic`
    the one in the L1/Linf pairing used by entropic geometries, when it differs.
    """

    def __init__(self, label: str, product_set: ProductSet,
                 value: Callable[[np.ndarray], float],
                 gradient_field: Callable[[np.ndarray], np.ndarray],
                 solutions: Sequence[np.ndarray] = (),
                 coherence_class: CoherenceClass = CoherenceClass.UNKNOWN,
                 lipschitz: Optional[float] = None,
                 lipschitz_entropic: Optional[float] = None,
                 sampling_plan: Optional[SamplingPlan] = None,
                 description: str = "",
                 params: Optional[dict] = None):
        self.label = label
        self.set = product_set
        self._value = value
        self._gradient_field = gradient_field
        self.solutions = [as_vector(s, product_set.dim, "solution") for s in solutions]
        self.coherence_class = coherence_class
        self.lipschitz = lipschitz
        self.lipschitz_entropic = lipschitz_entropic
        if sampling_plan is None:
            all_boxes = all(b.kind == "box" for b in product_set.blocks)
            sampling_plan = SamplingPlan(SamplingPlan.GRID if all_boxes and product_set.dim <= 2
                                         else SamplingPlan.RANDOM)
        self.sampling_plan = sampling_plan
        self.description = description
        self.params = params or {}

    @property
    def dim(self) -> int:
        return self.set.dim

    def value(self, x) -> float:
        return float(self._value(as_vector(x, self.dim)))

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self._gradient_field(as_vector(x, self.dim)), dtype=np.float64)

    def vi_residual(self, x, solution) -> float:
        """<g(x), x - x*>"""
        x = as_vector(x, self.dim)
        return float(np.dot(self.gradient(x), x - solution))

    def lipschitz_for(self, geometry) -> Optional[float]:
        if any(d.name == "entropy" for d in geometry.dgfs):
            return self.lipschitz_entropic
        return self.lipschitz

    def describe(self) -> dict:
        return {"label": self.label, "dim": self.dim, "set": self.set.to_dict(),
                "coherence_class": self.coherence_class.value, "lipschitz": self.lipschitz,
                "solutions": [s.tolist() for s in self.solutions], "params": self.params}

    def __repr__(self):
        return "Problem({}, dim={}, {})".format(self.label, self.dim, self.coherence_class.value)
