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
from typing import List, Optional

import numpy as np


class RecordEntry:
    """
    Row n of a trajectory: the base point X_n of step n, the step size gamma_n, the half-step
    X_{n+1/2} (optimistic methods only), the distances to each listed solution measured at
    X_n, the ergodic average over X_1..X_n and the oracle queries consumed once step n is done.
    """
    __slots__ = ("n", "step", "point", "half", "average", "distances", "queries")

    def __init__(self, n: int, step: float, point: np.ndarray, half: Optional[np.ndarray],
                 average: Optional[np.ndarray], distances: List[float], queries: int):
        self.n = n
        self.step = step
        self.point = point
        self.half = half
        self.average = average
        self.distances = distances
        self.queries = queries


class FinalState:
    """The point produced by the last executed step and its distances to the solutions."""

    def __init__(self, n: int, point: np.ndarray, distances: List[float], queries: int,
                 average: Optional[np.ndarray] = None):
        self.n = n
        self.point = point
        self.distances = distances
        self.queries = queries
        self.average = average

    def to_dict(self) -> dict:
        return {"n": self.n, "point": self.point.tolist(), "distances": list(self.distances),
                "queries": self.queries, "average": None if self.average is None else self.average.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> 'FinalState':
        average = data.get("average")
        return cls(int(data["n"]), np.array(data["point"], dtype=np.float64), [float(d) for d in data["distances"]],
                   int(data["queries"]), None if average is None else np.array(average, dtype=np.float64))


class RunRecord:
    DISTANCE_BREGMAN = "bregman"
    DISTANCE_NORM = "euclidean-norm"

    def __init__(self, method: str, problem_label: str, dim: int, solutions: List[np.ndarray],
                 geometry: Optional[str] = None, schedule: Optional[str] = None, oracle: Optional[dict] = None,
                 record_every: int = 1, initial_point: Optional[np.ndarray] = None,
                 distance_kind: str = DISTANCE_BREGMAN, metadata: Optional[dict] = None):
        self.method = method
        self.problem_label = problem_label
        self.dim = dim
        self.solutions = [np.asarray(s, dtype=np.float64) for s in solutions]
        self.geometry = geometry
        self.schedule = schedule
        self.oracle = oracle or {}
        self.record_every = record_every
        self.initial_point = initial_point
        self.distance_kind = distance_kind
        self.metadata = metadata or {}
        self.entries = []  # type: List[RecordEntry]
        self.final = None  # type: Optional[FinalState]
        self.complete = True
        self.abort_reason = None  # type: Optional[str]
        self.diverged = False
        self.duration = 0.0
        self.certifications = []  # type: List[dict]
        self.flags = []  # type: List[str]

    def append(self, entry: RecordEntry):
        self.entries.append(entry)

    def flag(self, name: str):
        if name not in self.flags:
            self.flags.append(name)

    def __len__(self):
        return len(self.entries)

    @property
    def iterations(self) -> int:
        return self.final.n - 1 if self.final is not None else (self.entries[-1].n if self.entries else 0)

    @property
    def has_half_steps(self) -> bool:
        return bool(self.entries) and all(e.half is not None for e in self.entries)

    @property
    def has_averages(self) -> bool:
        return bool(self.entries) and all(e.average is not None for e in self.entries)

    def steps(self) -> np.ndarray:
        return np.array([e.step for e in self.entries])

    def points(self, with_final: bool = False) -> np.ndarray:
        pts = [e.point for e in self.entries]
        if with_final and self.final is not None:
            pts.append(self.final.point)
        return np.array(pts)

    def halves(self) -> np.ndarray:
        return np.array([e.half for e in self.entries])

    def distance_series(self, solution_index: int = 0, with_final: bool = True) -> np.ndarray:
        series = [e.distances[solution_index] for e in self.entries]
        if with_final and self.final is not None:
            series.append(self.final.distances[solution_index])
        return np.array(series)

    @property
    def final_point(self) -> Optional[np.ndarray]:
        if self.final is not None:
            return self.final.point
        return self.entries[-1].point if self.entries else None

    def final_distances(self) -> List[float]:
        if self.final is not None:
            return list(self.final.distances)
        return list(self.entries[-1].distances) if self.entries else []

    def final_average(self) -> Optional[np.ndarray]:
        if self.final is not None and self.final.average is not None:
            return self.final.average
        return self.entries[-1].average if self.entries else None

    def __repr__(self):
        return "RunRecord({}, {}, rows={}, complete={})".format(self.method, self.problem_label, len(self.entries),
                                                                self.complete)
