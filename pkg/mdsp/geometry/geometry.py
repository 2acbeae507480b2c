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
from typing import List, Sequence

import numpy as np

from mdsp.errors import ConfigError, DimensionMismatch
from mdsp.geometry.blocks import ProductSet, Simplex, as_finite_vector, as_vector
from mdsp.geometry.dgf import DISTANCE_GENERATING_FUNCTIONS, DistanceGeneratingFunction

GEOMETRY_NAMES = ("euclidean", "entropic", "auto")


class Geometry:
    """
    A product set together with one distance-generating function per block.

    Norms combine blockwise as root-sum-of-squares, both on the primal and on the dual
    side; the aggregate strong convexity modulus is the smallest block modulus.
    """

    def __init__(self, product_set: ProductSet, dgfs: Sequence[DistanceGeneratingFunction], name: str = None):
        if len(dgfs) != len(product_set.blocks):
            raise DimensionMismatch("Got {} distance-generating functions for {} blocks".format(
                len(dgfs), len(product_set.blocks)))
        for dgf, block in zip(dgfs, product_set.blocks):
            if not dgf.supports(block):
                raise ConfigError("{} geometry cannot be attached to {}".format(dgf.name, block))
        self.set = product_set
        self.dgfs = tuple(dgfs)
        self._name = name

    @classmethod
    def from_name(cls, product_set: ProductSet, name: str = "auto") -> 'Geometry':
        """
        "euclidean" attaches 0.5||x||^2 everywhere, "entropic" attaches negative entropy to
        every block (all blocks must be simplices), "auto" uses entropy on simplices only.
        """
        euclidean = DISTANCE_GENERATING_FUNCTIONS.get("euclidean")()
        entropy = DISTANCE_GENERATING_FUNCTIONS.get("entropy")()
        if name == "euclidean":
            dgfs = [euclidean for _ in product_set.blocks]
        elif name == "entropic":
            dgfs = [entropy for _ in product_set.blocks]
        elif name == "auto":
            dgfs = [entropy if isinstance(b, Simplex) else euclidean for b in product_set.blocks]
        else:
            raise ConfigError("Unknown geometry '{}', expected one of {}".format(name, ", ".join(GEOMETRY_NAMES)))
        return cls(product_set, dgfs, name)

    @classmethod
    def from_dict(cls, data: dict) -> 'Geometry':
        """Rebuilds a geometry from the "set" and "dgfs" entries stored with a run."""
        try:
            product_set = ProductSet.from_dict(data["set"])
            dgfs = [DISTANCE_GENERATING_FUNCTIONS.get(name)() for name in data["dgfs"]]
        except KeyError as e:
            raise ConfigError("Incomplete geometry description: {}".format(e))
        return cls(product_set, dgfs, data.get("name"))

    @property
    def name(self) -> str:
        if self._name is not None:
            return self._name
        return "+".join(d.name for d in self.dgfs)

    @property
    def dim(self) -> int:
        return self.set.dim

    @property
    def block_alphas(self) -> List[float]:
        return [d.alpha for d in self.dgfs]

    @property
    def alpha(self) -> float:
        return min(self.block_alphas)

    def _parts(self):
        return zip(self.dgfs, self.set.blocks, self.set.slices)

    def h(self, x) -> float:
        x = as_vector(x, self.dim)
        return sum(dgf.value(block, x[s]) for dgf, block, s in self._parts())

    def grad_dgf(self, point) -> np.ndarray:
        point = as_vector(point, self.dim)
        return np.concatenate([dgf.gradient(block, point[s]) for dgf, block, s in self._parts()])

    def bregman(self, base, point) -> float:
        base = as_vector(base, self.dim, "Bregman base")
        point = as_vector(point, self.dim)
        return sum(dgf.divergence(block, base[s], point[s]) for dgf, block, s in self._parts())

    def check_prox_base(self, point) -> np.ndarray:
        point = as_vector(point, self.dim, "prox base")
        for dgf, block, s in self._parts():
            dgf.check_prox_base(block, point[s])
        return point

    def prox(self, base, dual) -> np.ndarray:
        base = as_vector(base, self.dim, "prox base")
        dual = as_finite_vector(dual, self.dim)
        return np.concatenate([dgf.prox(block, base[s], dual[s]) for dgf, block, s in self._parts()])

    def mirror(self, dual) -> np.ndarray:
        dual = as_finite_vector(dual, self.dim)
        return np.concatenate([dgf.mirror(block, dual[s]) for dgf, block, s in self._parts()])

    def norm(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.sqrt(sum(dgf.norm(x[s]) ** 2 for dgf, _, s in self._parts())))

    def dual_norm(self, y) -> float:
        y = as_vector(y, self.dim, "dual vector")
        return float(np.sqrt(sum(dgf.dual_norm(y[s]) ** 2 for dgf, _, s in self._parts())))

    def default_point(self) -> np.ndarray:
        return self.set.center()

    def describe(self) -> dict:
        return {"name": self.name, "dgfs": [d.name for d in self.dgfs], "alpha": self.alpha}

    def __repr__(self):
        return "Geometry({}, {})".format(self.name, self.set)


def bregman(geometry: Geometry, base, point) -> float:
    return geometry.bregman(base, point)


def prox(geometry: Geometry, base, dual) -> np.ndarray:
    return geometry.prox(base, dual)


def mirror(geometry: Geometry, dual) -> np.ndarray:
    return geometry.mirror(dual)


def grad_dgf(geometry: Geometry, point) -> np.ndarray:
    return geometry.grad_dgf(point)
