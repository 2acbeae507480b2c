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
import numpy as np
from scipy.special import entr, kl_div, softmax

from mdsp.errors import ConfigError, DomainError
from mdsp.geometry.blocks import FeasibleBlock, Simplex
from mdsp.registry import Registry

DISTANCE_GENERATING_FUNCTIONS = Registry("distance-generating function")

# Smallest coordinate an entropic prox output may take; keeps iterates in the relative interior.
ENTROPY_FLOOR = np.finfo(np.float64).tiny


class DistanceGeneratingFunction:
    """
    Blockwise strongly convex regularizer h. Implementations are stateless: every method
    receives the block it acts on, so one instance can serve any number of blocks.
    """
    name = None  # type: str
    alpha = 1.0

    def supports(self, block: FeasibleBlock) -> bool:
        raise NotImplementedError

    def value(self, block: FeasibleBlock, x: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, block: FeasibleBlock, point: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def divergence(self, block: FeasibleBlock, base: np.ndarray, point: np.ndarray) -> float:
        """D(base, point) = h(base) - h(point) - <grad h(point), base - point>"""
        raise NotImplementedError

    def prox(self, block: FeasibleBlock, base: np.ndarray, dual: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mirror(self, block: FeasibleBlock, dual: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def norm(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def dual_norm(self, y: np.ndarray) -> float:
        raise NotImplementedError

    def check_prox_base(self, block: FeasibleBlock, point: np.ndarray):
        pass


@DISTANCE_GENERATING_FUNCTIONS.register("euclidean")
class EuclideanDGF(DistanceGeneratingFunction):
    """h(x) = 0.5 * ||x||^2, 1-strongly convex for the L2 norm."""
    name = "euclidean"

    def supports(self, block):
        return True

    def value(self, block, x):
        return 0.5 * float(np.dot(x, x))

    def gradient(self, block, point):
        return point.copy()

    def divergence(self, block, base, point):
        diff = base - point
        return 0.5 * float(np.dot(diff, diff))

    def prox(self, block, base, dual):
        return block.project(base + dual)

    def mirror(self, block, dual):
        return block.project(dual)

    def norm(self, x):
        return float(np.linalg.norm(x))

    def dual_norm(self, y):
        return float(np.linalg.norm(y))


@DISTANCE_GENERATING_FUNCTIONS.register("entropy")
class NegativeEntropyDGF(DistanceGeneratingFunction):
    """
    h(x) = sum_i x_i log x_i on the simplex, 1-strongly convex for the L1 norm.
    The prox-mapping is the multiplicative weights update, evaluated in log space.
    """
    name = "entropy"

    def supports(self, block):
        return isinstance(block, Simplex)

    def _check_supported(self, block):
        if not self.supports(block):
            raise ConfigError("Negative entropy can only be attached to simplex blocks, got {}".format(block))

    def check_prox_base(self, block, point):
        self._check_supported(block)
        if np.any(point <= 0.0):
            raise DomainError("Entropic geometry needs strictly positive coordinates, got {}".format(point))

    def value(self, block, x):
        self._check_supported(block)
        if np.any(x < 0.0):
            raise DomainError("Negative entropy is undefined at {}".format(x))
        return -float(np.sum(entr(x)))

    def gradient(self, block, point):
        self.check_prox_base(block, point)
        return 1.0 + np.log(point)

    def divergence(self, block, base, point):
        self.check_prox_base(block, point)
        if np.any(base < 0.0):
            raise DomainError("Bregman base must lie in the simplex, got {}".format(base))
        # kl_div(a, b) = a log(a / b) - a + b, with 0 log 0 = 0; the linear terms cancel on the simplex.
        return float(np.sum(kl_div(base, point)))

    def prox(self, block, base, dual):
        self.check_prox_base(block, base)
        return self._normalized(softmax(np.log(base) + dual))

    def mirror(self, block, dual):
        self._check_supported(block)
        return self._normalized(softmax(dual))

    @staticmethod
    def _normalized(weights):
        if np.all(weights > 0.0):
            return weights
        weights = np.maximum(weights, ENTROPY_FLOOR)
        return weights / np.sum(weights)

    def norm(self, x):
        return float(np.sum(np.abs(x)))

    def dual_norm(self, y):
        return float(np.max(np.abs(y))) if y.size else 0.0
