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

Conformance checks over recorded trajectories and statistics over ensembles of runs.

Every check is a pure function of the records and the constants it is given, so a stored
record can be re-audited and reproduces the same report.
"""
import math
from typing import List, Optional, Sequence

import numpy as np
from addict import Dict
from scipy.stats import norm
from texttable import Texttable

from mdsp.definitions import REPORT_SCHEMA_VERSION
from mdsp.errors import ConfigError, EmptyEnsemble, MissingHalfStep, MissingSolution
from mdsp.geometry.geometry import Geometry
from mdsp.registry import Registry
from mdsp.schedulers import StepSchedule, parse_schedule
from mdsp.solver.record import RunRecord

CONFORMANCE_CLAIMS = Registry("conformance claim")

DESCENT_TOL = 1e-9
NONDECREASE_TOL = 1e-12
IDENTITY_TOL = 1e-9
BOUND_TOL = 1e-9
DEFAULT_ERGODIC_RADIUS = 0.05
DEFAULT_CONVERGENCE_THRESHOLD = 1e-3
DEFAULT_REQUIRED_FRACTION = 0.9


class ClaimResult:
    def __init__(self, claim: str, passed: bool, margin: float, location: Optional[int] = None,
                 detail: str = "", record: Optional[str] = None):
        self.claim = claim
        self.passed = bool(passed)
        self.margin = float(margin)
        self.location = location
        self.detail = detail
        self.record = record

    def to_dict(self) -> dict:
        return {"claim": self.claim, "passed": self.passed, "margin": self.margin, "location": self.location,
                "detail": self.detail, "record": self.record}

    def __repr__(self):
        return "{}: {} (margin {:.3e} at {})".format(self.claim, "pass" if self.passed else "FAIL", self.margin,
                                                     self.location)


class ConformanceReport:
    def __init__(self, results: Sequence[ClaimResult] = ()):
        self.results = list(results)

    def add(self, result: ClaimResult):
        self.results.append(result)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"schema": REPORT_SCHEMA_VERSION, "all_passed": self.all_passed,
                "claims": [r.to_dict() for r in self.results]}

    def draw(self) -> str:
        table = Texttable(max_width=120)
        table.set_cols_dtype(["t", "t", "t", "t", "t"])
        table.header(["Claim", "Record", "Result", "Margin", "Location"])
        for r in self.results:
            table.add_row([r.claim, r.record or "", "pass" if r.passed else "FAIL", "{:.6e}".format(r.margin),
                           "" if r.location is None else str(r.location)])
        return table.draw()


def _require_solutions(record: RunRecord):
    if not record.solutions:
        raise MissingSolution("Record of {} on {} has no solution to measure against".format(
            record.method, record.problem_label))


def _require_per_step(record: RunRecord, claim: str):
    if record.record_every != 1:
        raise ConfigError("{} needs every iteration recorded, got record_every={}".format(claim, record.record_every))


def _increments(record: RunRecord) -> np.ndarray:
    """Array of shape (solutions, steps) with D_{n+1} - D_n."""
    _require_solutions(record)
    series = np.array([record.distance_series(j) for j in range(len(record.solutions))])
    if series.shape[1] < 2:
        raise ConfigError("Need at least two recorded distances, got {}".format(series.shape[1]))
    return np.diff(series, axis=1)


def _row_n(record: RunRecord, k: int) -> int:
    """Iteration index of element k of a distance series; the element past the last row is the final state."""
    if k < len(record.entries):
        return record.entries[k].n
    return record.final.n if record.final is not None else record.entries[-1].n + record.record_every


def check_monotone_descent(record: RunRecord, tol: float = DESCENT_TOL) -> ClaimResult:
    """Passes iff no distance to a solution grows by more than `tol` over one step."""
    _require_per_step(record, "MonotoneDescent")
    increments = _increments(record)
    j, k = np.unravel_index(np.argmax(increments), increments.shape)
    worst = float(increments[j, k])
    return ClaimResult("MonotoneDescent", worst <= tol, worst, _row_n(record, int(k)),
                       "max D_(n+1) - D_n for solution {}".format(j))


def check_null_nondecrease(record: RunRecord, tol: float = NONDECREASE_TOL) -> ClaimResult:
    _require_per_step(record, "NullNondecrease")
    increments = _increments(record)
    j, k = np.unravel_index(np.argmin(increments), increments.shape)
    worst = float(increments[j, k])
    return ClaimResult("NullNondecrease", worst >= -tol, worst, _row_n(record, int(k)),
                       "min D_(n+1) - D_n for solution {}".format(j))


def record_geometry(record: RunRecord) -> Geometry:
    return Geometry.from_dict({"set": record.metadata.get("set"), "dgfs": record.metadata.get("dgfs"),
                               "name": record.geometry})


def check_null_identity(record: RunRecord, tol: float = IDENTITY_TOL) -> ClaimResult:
    """D(x*, X_{n+1}) - D(x*, X_n) = D(X_n, X_{n+1}) per step, for null-coherent problems."""
    _require_per_step(record, "NullIdentity")
    increments = _increments(record)
    geometry = record_geometry(record)
    points = record.points(with_final=True)
    step_divergence = np.array([geometry.bregman(points[k], points[k + 1]) for k in range(len(points) - 1)])
    deviation = np.abs(increments - step_divergence[None, :])
    j, k = np.unravel_index(np.argmax(deviation), deviation.shape)
    worst = float(deviation[j, k])
    return ClaimResult("NullIdentity", worst <= tol, worst, _row_n(record, int(k)),
                       "max |D_(n+1) - D_n - D(X_n, X_(n+1))| for solution {}".format(j))


def check_descent_inequality(record: RunRecord, alpha: float, lipschitz: float,
                             tol: float = DESCENT_TOL) -> ClaimResult:
    """
    D(x*, X_{n+1}) <= D(x*, X_n) - (alpha - gamma_n^2 L^2 / alpha) / 2 * ||X_{n+1/2} - X_n||^2
    Reports the largest violation; negative margins are slack.
    """
    _require_per_step(record, "PerStepDescentInequality")
    if not record.has_half_steps:
        raise MissingHalfStep("Record of {} carries no half-steps".format(record.method))
    increments = _increments(record)
    geometry = record_geometry(record)
    gammas = record.steps()
    gaps = np.array([geometry.norm(e.half - e.point) ** 2 for e in record.entries])
    coefficient = 0.5 * (alpha - gammas ** 2 * lipschitz ** 2 / alpha)
    lhs = increments + (coefficient * gaps)[None, :]
    j, k = np.unravel_index(np.argmax(lhs), lhs.shape)
    worst = float(lhs[j, k])
    return ClaimResult("PerStepDescentInequality", worst <= tol, worst, _row_n(record, int(k)),
                       "max of D_(n+1) - D_n + c_n ||X_(n+1/2) - X_n||^2 for solution {}".format(j))


def bounded_orbit_bound(initial_distance: float, schedule: StepSchedule, m_squared: float, alpha: float) -> float:
    return initial_distance + m_squared / (2.0 * alpha) * schedule.sum_of_squares()


def check_bounded_orbit(record: RunRecord, schedule: StepSchedule, m_squared: float, alpha: float,
                        tol: float = BOUND_TOL) -> ClaimResult:
    """sup_n D(x*, X_n) <= D(x*, X_1) + M^2 / (2 alpha) * sum_n gamma_n^2, with the sum taken exactly."""
    _require_solutions(record)
    worst_margin, location, worst_bound = -math.inf, None, None
    for j in range(len(record.solutions)):
        series = record.distance_series(j)
        bound = bounded_orbit_bound(float(series[0]), schedule, m_squared, alpha)
        k = int(np.argmax(series))
        margin = float(series[k]) - bound
        if margin > worst_margin:
            worst_margin, location, worst_bound = margin, k, bound
    return ClaimResult("BoundedOrbit", worst_margin <= tol, worst_margin, _row_n(record, location),
                       "sup D - bound, bound = {:.6e}".format(worst_bound))


def check_ergodic_convergence(record: RunRecord, radius: float = DEFAULT_ERGODIC_RADIUS) -> ClaimResult:
    _require_solutions(record)
    average = record.final_average()
    if average is None:
        raise ConfigError("Record of {} carries no ergodic average".format(record.method))
    distance = min(float(np.linalg.norm(average - s)) for s in record.solutions)
    return ClaimResult("ErgodicConvergence", distance <= radius, distance - radius, record.iterations,
                       "||avg - x*|| = {:.6e} vs radius {}".format(distance, radius))


class EnsembleStats:
    def __init__(self, successes: int, total: int, low: float, high: float, threshold: float):
        self.successes = successes
        self.total = total
        self.low = low
        self.high = high
        self.threshold = threshold

    @property
    def fraction(self) -> float:
        return self.successes / self.total

    def to_dict(self) -> dict:
        return {"successes": self.successes, "total": self.total, "fraction": self.fraction,
                "wilson_95": [self.low, self.high], "threshold": self.threshold}


def wilson_interval(successes: int, total: int, confidence: float = 0.95):
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = successes / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z * z / (4.0 * total * total)) / denom
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == total else min(1.0, center + half)
    return low, high


def ensemble_stats(records: Sequence[RunRecord], threshold: float = DEFAULT_CONVERGENCE_THRESHOLD) -> EnsembleStats:
    """Fraction of runs whose final distance to the nearest listed solution is below `threshold`."""
    if len(records) < 2:
        raise EmptyEnsemble("Ensemble statistics need at least two runs, got {}".format(len(records)))
    for record in records:
        _require_solutions(record)
    successes = sum(1 for r in records if min(r.final_distances()) < threshold)
    low, high = wilson_interval(successes, len(records))
    return EnsembleStats(successes, len(records), low, high, threshold)


def check_ensemble_fraction(records: Sequence[RunRecord], threshold: float = DEFAULT_CONVERGENCE_THRESHOLD,
                            required: float = DEFAULT_REQUIRED_FRACTION) -> ClaimResult:
    stats = ensemble_stats(records, threshold)
    return ClaimResult("EnsembleConvergenceFraction", stats.fraction >= required, stats.fraction - required,
                       None, "{}/{} runs below {} (Wilson 95%: [{:.4f}, {:.4f}])".format(
                           stats.successes, stats.total, threshold, stats.low, stats.high))


def _given(constants: Dict, key: str, default: float) -> float:
    value = constants.get(key)
    return default if value is None else value


def _constant(constants: Dict, record: RunRecord, key: str):
    value = constants.get(key)
    if value is None:
        value = record.metadata.get(key)
    if value is None:
        raise ConfigError("Claim needs constant '{}', which is neither given nor stored with the record".format(key))
    return value


@CONFORMANCE_CLAIMS.register("MonotoneDescent")
def _monotone_descent(records, constants):
    return [check_monotone_descent(r) for r in records]


@CONFORMANCE_CLAIMS.register("NullNondecrease")
def _null_nondecrease(records, constants):
    return [check_null_nondecrease(r) for r in records]


@CONFORMANCE_CLAIMS.register("NullIdentity")
def _null_identity(records, constants):
    return [check_null_identity(r) for r in records]


@CONFORMANCE_CLAIMS.register("PerStepDescentInequality")
def _descent_inequality(records, constants):
    return [check_descent_inequality(r, _constant(constants, r, "alpha"), _constant(constants, r, "lipschitz"))
            for r in records]


@CONFORMANCE_CLAIMS.register("BoundedOrbit")
def _bounded_orbit(records, constants):
    results = []
    for r in records:
        schedule = constants.schedule if constants.schedule else parse_schedule(r.schedule)
        if isinstance(schedule, str):
            schedule = parse_schedule(schedule)
        results.append(check_bounded_orbit(r, schedule, _constant(constants, r, "m_squared"),
                                           _constant(constants, r, "alpha")))
    return results


@CONFORMANCE_CLAIMS.register("ErgodicConvergence")
def _ergodic_convergence(records, constants):
    radius = _given(constants, "ergodic_radius", DEFAULT_ERGODIC_RADIUS)
    return [check_ergodic_convergence(r, radius) for r in records]


@CONFORMANCE_CLAIMS.register("EnsembleConvergenceFraction")
def _ensemble_fraction(records, constants):
    threshold = _given(constants, "threshold", DEFAULT_CONVERGENCE_THRESHOLD)
    required = _given(constants, "required_fraction", DEFAULT_REQUIRED_FRACTION)
    return [check_ensemble_fraction(records, threshold, required)]


def run_checks(records: Sequence[RunRecord], claims: Sequence[str], constants: Optional[dict] = None,
               names: Optional[List[str]] = None) -> ConformanceReport:
    """
    Evaluates each claim on every record (the ensemble claim on all of them at once).
    Constants not given fall back to the values stored with each record.
    """
    constants = Dict(constants or {})
    report = ConformanceReport()
    for claim in claims:
        try:
            check = CONFORMANCE_CLAIMS.get(claim)
        except KeyError as e:
            raise ConfigError(str(e))
        for i, result in enumerate(check(records, constants)):
            if result.record is None and names is not None and claim != "EnsembleConvergenceFraction":
                result.record = names[i]
            report.add(result)
    return report
