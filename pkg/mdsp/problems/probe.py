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

Numerical probes of a problem's gradient field: finite-difference gradient checks,
Lipschitz estimation and classification of the Minty variational inequality residual.
"""
import math
from typing import List, Optional

import numpy as np

from mdsp.definitions import PROBE_SCHEMA_VERSION
from mdsp.errors import ConfigError
from mdsp.problems.base import CoherenceClass, Problem, SamplingPlan

NULL_BAND = 1e-9
STRICT_MARGIN = 1e-6
STRICT_EXCLUSION_RADIUS = 0.05
COHERENT_TOL = 1e-9


def finite_difference_field(problem: Problem, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """(df/dx1, -df/dx2) by central differences."""
    grad = np.zeros(problem.dim)
    for i in range(problem.dim):
        shift = np.zeros(problem.dim)
        shift[i] = step
        grad[i] = (problem.value(x + shift) - problem.value(x - shift)) / (2.0 * step)
    return grad * problem.set.player_signs()


def interior_points(problem: Problem, count: int, seed: int = 0, shrink: float = 0.9) -> np.ndarray:
    rng = np.random.default_rng(seed)
    center = problem.set.center()
    pts = problem.set.sample(rng, count)
    return center + shrink * (pts - center)


def gradient_check_error(problem: Problem, samples: int = 100, seed: int = 0, step: float = 1e-5) -> float:
    """Largest relative deviation |g - g_fd| / max(1, |g|) over seeded interior points."""
    worst = 0.0
    for x in interior_points(problem, samples, seed):
        g = problem.gradient(x)
        fd = finite_difference_field(problem, x, step)
        worst = max(worst, float(np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g)))))
    return worst


def estimate_lipschitz(problem: Problem, samples: int = 1000, seed: int = 0, geometry=None) -> float:
    """
    Lower estimate of the Lipschitz constant of g: the largest ratio ||g(x) - g(x')||_* / ||x - x'||
    over seeded pairs. Half of the pairs are independent draws, half are local perturbations.
    Norms are Euclidean unless a geometry is given.
    """
    if samples < 2:
        raise ConfigError("Lipschitz estimation needs at least 2 samples, got {}".format(samples))
    norm = geometry.norm if geometry is not None else np.linalg.norm
    dual_norm = geometry.dual_norm if geometry is not None else np.linalg.norm
    rng = np.random.default_rng(seed)
    far = samples // 2
    first = problem.set.sample(rng, samples)
    local = [problem.set.project(x + 1e-2 * rng.standard_normal(problem.dim)) for x in first[far:]]
    second = np.concatenate([problem.set.sample(rng, far), np.array(local)])
    best = 0.0
    for x, y in zip(first, second):
        dist = float(norm(x - y))
        if dist < 1e-12:
            continue
        best = max(best, float(dual_norm(problem.gradient(x) - problem.gradient(y))) / dist)
    return best


class SolutionResiduals:
    def __init__(self, solution: np.ndarray, residuals: np.ndarray, off_ball: np.ndarray):
        self.solution = solution
        self.min = float(np.min(residuals))
        self.max = float(np.max(residuals))
        self.mean = math.fsum(np.sort(residuals)) / len(residuals)
        self.max_abs = float(np.max(np.abs(residuals)))
        self.min_off_ball = float(np.min(residuals[off_ball])) if np.any(off_ball) else None
        self.argmin = int(np.argmin(residuals))

    def to_dict(self) -> dict:
        return {"solution": self.solution.tolist(), "min": self.min, "max": self.max, "mean": self.mean,
                "max_abs": self.max_abs, "min_off_ball": self.min_off_ball}


class ProbeReport:
    def __init__(self, label: str, plan: SamplingPlan, point_count: int, per_solution: List[SolutionResiduals],
                 classification: CoherenceClass, declared: CoherenceClass):
        self.label = label
        self.plan = plan
        self.point_count = point_count
        self.per_solution = per_solution
        self.classification = classification
        self.declared = declared

    @property
    def matches_declared(self) -> bool:
        return self.classification.refines(self.declared)

    @property
    def max_abs(self) -> float:
        return max(s.max_abs for s in self.per_solution)

    @property
    def min(self) -> float:
        return min(s.min for s in self.per_solution)

    def summary(self) -> str:
        if self.classification is CoherenceClass.NULL:
            return "Null (max |residual| = {:.1e})".format(self.max_abs)
        return "{} (min residual = {:.3e})".format(self.classification.value.capitalize(), self.min)

    def to_dict(self) -> dict:
        return {
            "schema": PROBE_SCHEMA_VERSION,
            "problem": self.label,
            "plan": self.plan.to_dict(),
            "points": self.point_count,
            "classification": self.classification.value,
            "declared": self.declared.value,
            "matches_declared": self.matches_declared,
            "thresholds": {"null_band": NULL_BAND, "strict_margin": STRICT_MARGIN,
                           "strict_exclusion_radius": STRICT_EXCLUSION_RADIUS, "coherent_tol": COHERENT_TOL},
            "solutions": [s.to_dict() for s in self.per_solution],
        }


def coherence_probe(problem: Problem, plan: Optional[SamplingPlan] = None) -> ProbeReport:
    if not problem.solutions:
        raise ConfigError("Problem {} lists no solutions to probe against".format(problem.label))
    if plan is None:
        plan = problem.sampling_plan
    points = plan.points(problem.set)
    gradients = np.array([problem.gradient(x) for x in points])
    solutions = np.array(problem.solutions)
    dist_to_solutions = np.min(np.linalg.norm(points[:, None, :] - solutions[None, :, :], axis=2), axis=1)
    off_ball = dist_to_solutions > STRICT_EXCLUSION_RADIUS

    per_solution = []
    for solution in problem.solutions:
        residuals = np.einsum("ij,ij->i", gradients, points - solution)
        per_solution.append(SolutionResiduals(solution, residuals, off_ball))

    if all(s.max_abs <= NULL_BAND for s in per_solution):
        classification = CoherenceClass.NULL
    elif all(s.min >= -COHERENT_TOL for s in per_solution):
        strict = all(s.min_off_ball is not None and s.min_off_ball >= STRICT_MARGIN for s in per_solution)
        classification = CoherenceClass.STRICT if strict else CoherenceClass.COHERENT
    else:
        classification = CoherenceClass.INCONCLUSIVE
    return ProbeReport(problem.label, plan, len(points), per_solution, classification, problem.coherence_class)
