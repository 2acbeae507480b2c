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

Primitive feasible blocks (box, Euclidean ball, probability simplex) and their
Cartesian product, which plays the role of the joint strategy set X = X1 x X2.
"""
import itertools
from typing import List, Sequence

import numpy as np

from mdsp.definitions import MEMBERSHIP_TOLERANCE
from mdsp.errors import ConfigError, DimensionMismatch, NonFiniteInput

# Product sets with more extreme points than this skip vertex enumeration.
MAX_ENUMERATED_VERTICES = 4096


def as_vector(x, dim: int, what: str = "point") -> np.ndarray:
    vec = np.asarray(x, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimensionMismatch("Expected a {} of dimension {}, got shape {}".format(what, dim, vec.shape))
    return vec


def as_finite_vector(x, dim: int, what: str = "dual vector") -> np.ndarray:
    vec = as_vector(x, dim, what)
    if not np.all(np.isfinite(vec)):
        raise NonFiniteInput("{} contains NaN or Inf: {}".format(what, vec))
    return vec


class FeasibleBlock:
    kind = None  # type: str

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOLERANCE) -> bool:
        raise NotImplementedError

    def project(self, z: np.ndarray) -> np.ndarray:
        """Euclidean projection of `z` onto the block."""
        raise NotImplementedError

    def center(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def vertices(self) -> np.ndarray:
        """Extreme points used to seed supremum searches; not necessarily all of them for a ball."""
        raise NotImplementedError

    def grid(self, points_per_axis: int) -> np.ndarray:
        raise ConfigError("Grid sampling is not supported on {} blocks".format(self.kind))

    def to_dict(self) -> dict:
        raise NotImplementedError


class Box(FeasibleBlock):
    kind = "box"

    def __init__(self, lower: Sequence[float], upper: Sequence[float]):
        self.lower = np.array(lower, dtype=np.float64).ravel()
        self.upper = np.array(upper, dtype=np.float64).ravel()
        if self.lower.shape != self.upper.shape:
            raise DimensionMismatch("Box bounds have different lengths: {} vs {}".format(
                self.lower.shape[0], self.upper.shape[0]))
        if not np.all(self.lower < self.upper):
            raise ConfigError("Box requires lower < upper coordinatewise, got {} and {}".format(self.lower,
                                                                                               self.upper))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, x, tol=MEMBERSHIP_TOLERANCE):
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project(self, z):
        return np.clip(z, self.lower, self.upper)

    def center(self):
        return 0.5 * (self.lower + self.upper)

    def sample(self, rng, count):
        return rng.uniform(self.lower, self.upper, size=(count, self.dim))

    def vertices(self):
        return np.array(list(itertools.product(*zip(self.lower, self.upper))), dtype=np.float64)

    def grid(self, points_per_axis):
        axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def to_dict(self):
        return {"kind": self.kind, "lower": self.lower.tolist(), "upper": self.upper.tolist()}

    def __repr__(self):
        return "Box(lower={}, upper={})".format(self.lower.tolist(), self.upper.tolist())


class Ball(FeasibleBlock):
    kind = "ball"

    def __init__(self, center: Sequence[float], radius: float):
        self._center = np.array(center, dtype=np.float64).ravel()
        self.radius = float(radius)
        if not self.radius > 0:
            raise ConfigError("Ball radius must be positive, got {}".format(radius))

    @property
    def dim(self) -> int:
        return self._center.shape[0]

    def contains(self, x, tol=MEMBERSHIP_TOLERANCE):
        return bool(np.linalg.norm(x - self._center) <= self.radius + tol)

    def project(self, z):
        offset = z - self._center
        dist = np.linalg.norm(offset)
        if dist <= self.radius:
            return z.copy()
        return self._center + offset * (self.radius / dist)

    def center(self):
        return self._center.copy()

    def sample(self, rng, count):
        directions = rng.standard_normal((count, self.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self.radius * rng.uniform(size=(count, 1)) ** (1.0 / self.dim)
        return self._center + radii * directions

    def vertices(self):
        eye = np.eye(self.dim)
        return np.concatenate([self._center + self.radius * eye, self._center - self.radius * eye])

    def to_dict(self):
        return {"kind": self.kind, "center": self._center.tolist(), "radius": self.radius}

    def __repr__(self):
        return "Ball(center={}, radius={})".format(self._center.tolist(), self.radius)


class Simplex(FeasibleBlock):
    """{x in R^d : x_i >= 0, sum_i x_i = 1}"""
    kind = "simplex"

    def __init__(self, dimension: int):
        if int(dimension) < 1:
            raise ConfigError("Simplex dimension must be a positive integer, got {}".format(dimension))
        self._dim = int(dimension)

    @property
    def dim(self) -> int:
        return self._dim

    def contains(self, x, tol=MEMBERSHIP_TOLERANCE):
        return bool(np.all(x >= -tol) and abs(np.sum(x) - 1.0) <= tol * max(1, self._dim))

    def project(self, z):
        # Sort-and-threshold projection onto the unit simplex.
        u = np.sort(z)[::-1]
        cssv = np.cumsum(u) - 1.0
        ind = np.arange(1, self._dim + 1)
        cond = u - cssv / ind > 0
        rho = ind[cond][-1]
        theta = cssv[cond][-1] / rho
        return np.maximum(z - theta, 0.0)

    def center(self):
        return np.full(self._dim, 1.0 / self._dim)

    def sample(self, rng, count):
        return rng.dirichlet(np.ones(self._dim), size=count)

    def vertices(self):
        return np.eye(self._dim)

    def to_dict(self):
        return {"kind": self.kind, "dimension": self._dim}

    def __repr__(self):
        return "Simplex({})".format(self._dim)


def block_from_dict(spec: dict) -> FeasibleBlock:
    kind = spec.get("kind")
    if kind == Box.kind:
        return Box(spec["lower"], spec["upper"])
    if kind == Ball.kind:
        return Ball(spec["center"], spec["radius"])
    if kind == Simplex.kind:
        return Simplex(spec["dimension"])
    raise ConfigError("Unknown feasible block kind: {}".format(kind))


class ProductSet:
    """
    Ordered product of feasible blocks. Each block belongs to exactly one player
    (1 minimizes, 2 maximizes); coordinates are laid out block after block.
    """

    def __init__(self, blocks: Sequence[FeasibleBlock], players: Sequence[int]):
        if not blocks:
            raise ConfigError("A product set needs at least one block")
        if len(blocks) != len(players):
            raise DimensionMismatch("Got {} blocks but {} player assignments".format(len(blocks), len(players)))
        if any(p not in (1, 2) for p in players):
            raise ConfigError("Player assignments must be 1 or 2, got {}".format(list(players)))
        self.blocks = tuple(blocks)
        self.players = tuple(int(p) for p in players)
        self.slices = []  # type: List[slice]
        offset = 0
        for block in self.blocks:
            self.slices.append(slice(offset, offset + block.dim))
            offset += block.dim
        self.dim = offset

    def split(self, x: np.ndarray) -> List[np.ndarray]:
        return [x[s] for s in self.slices]

    def player_indices(self, player: int) -> np.ndarray:
        idx = [np.arange(s.start, s.stop) for s, p in zip(self.slices, self.players) if p == player]
        if not idx:
            return np.zeros(0, dtype=int)
        return np.concatenate(idx)

    def player_signs(self) -> np.ndarray:
        """+1 on coordinates of the minimizing player, -1 on those of the maximizing one."""
        signs = np.ones(self.dim)
        signs[self.player_indices(2)] = -1.0
        return signs

    def contains(self, x, tol=MEMBERSHIP_TOLERANCE) -> bool:
        x = as_vector(x, self.dim)
        return all(block.contains(x[s], tol) for block, s in zip(self.blocks, self.slices))

    def project(self, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        return np.concatenate([block.project(z[s]) for block, s in zip(self.blocks, self.slices)])

    def center(self) -> np.ndarray:
        return np.concatenate([block.center() for block in self.blocks])

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return np.concatenate([block.sample(rng, count) for block in self.blocks], axis=1)

    def vertices(self) -> np.ndarray:
        per_block = [block.vertices() for block in self.blocks]
        total = int(np.prod([len(v) for v in per_block]))
        if total > MAX_ENUMERATED_VERTICES:
            return np.zeros((0, self.dim))
        return np.array([np.concatenate(combo) for combo in itertools.product(*per_block)])

    def grid(self, points_per_axis: int) -> np.ndarray:
        per_block = [block.grid(points_per_axis) for block in self.blocks]
        mesh = [np.concatenate(combo) for combo in itertools.product(*per_block)]
        return np.array(mesh)

    def to_dict(self) -> dict:
        return {"blocks": [b.to_dict() for b in self.blocks], "players": list(self.players)}

    @classmethod
    def from_dict(cls, spec: dict) -> 'ProductSet':
        return cls([block_from_dict(b) for b in spec["blocks"]], spec["players"])

    def __repr__(self):
        return "ProductSet({}, players={})".format(list(self.blocks), list(self.players))


def two_player_set(first: FeasibleBlock, second: FeasibleBlock) -> ProductSet:
    return ProductSet([first, second], [1, 2])
