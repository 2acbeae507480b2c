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
import json
from enum import Enum
from typing import Optional

import jstyleson
import numpy as np
from scipy.special import zeta

from mdsp.errors import ConfigError, Uncertifiable
from mdsp.registry import Registry

STEP_SCHEDULES = Registry("step schedule family")


class StepSchedule:
    """
    Step-size sequence gamma_n, n >= 1. Summability facts are known symbolically per family;
    `None` marks a fact the family cannot state.
    """
    family = None  # type: str

    def __init__(self, params: dict = None):
        self._params = params or {}

    def step_at(self, n: int) -> float:
        if n < 1:
            raise IndexError("Step sizes are indexed from 1, got {}".format(n))
        return self._step_at(n)

    def _step_at(self, n: int) -> float:
        raise NotImplementedError

    @property
    def sum_diverges(self) -> Optional[bool]:
        return None

    @property
    def sum_squares_converges(self) -> Optional[bool]:
        return None

    @property
    def bounded_above_by(self) -> Optional[float]:
        return None

    @property
    def bounded_below_by(self) -> Optional[float]:
        return None

    def sum_of_squares(self) -> float:
        """Exact value of sum_n gamma_n^2."""
        raise Uncertifiable("{} schedule has no analytic sum of squares".format(self.to_spec()))

    def flags(self) -> dict:
        return {"sum_diverges": self.sum_diverges, "sum_squares_converges": self.sum_squares_converges,
                "bounded_above_by": self.bounded_above_by, "bounded_below_by": self.bounded_below_by}

    def to_spec(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return "StepSchedule({})".format(self.to_spec())


@STEP_SCHEDULES.register("const")
class ConstantSchedule(StepSchedule):
    family = "const"

    def __init__(self, params=None):
        super().__init__(params)
        self.gamma = float(self._params.get("gamma", 0.1))
        if not self.gamma > 0:
            raise ConfigError("Constant step size must be positive, got {}".format(self.gamma))

    def _step_at(self, n):
        return self.gamma

    @property
    def sum_diverges(self):
        return True

    @property
    def sum_squares_converges(self):
        return False

    @property
    def bounded_above_by(self):
        return self.gamma

    @property
    def bounded_below_by(self):
        return self.gamma

    def to_spec(self):
        return "const:{!r}".format(self.gamma)


@STEP_SCHEDULES.register("power")
class PowerSchedule(StepSchedule):
    """gamma_n = c / n^p with 0 < p <= 1."""
    family = "power"

    def __init__(self, params=None):
        super().__init__(params)
        self.c = float(self._params.get("c", 1.0))
        self.p = float(self._params.get("p", 1.0))
        if not self.c > 0:
            raise ConfigError("Power schedule scale must be positive, got {}".format(self.c))
        if not 0 < self.p <= 1:
            raise ConfigError("Power schedule exponent must lie in (0, 1], got {}".format(self.p))

    def _step_at(self, n):
        return self.c / n ** self.p

    @property
    def sum_diverges(self):
        return self.p <= 1

    @property
    def sum_squares_converges(self):
        return self.p > 0.5

    @property
    def bounded_above_by(self):
        return self.c

    @property
    def bounded_below_by(self):
        return 0.0

    def sum_of_squares(self):
        if not self.sum_squares_converges:
            raise Uncertifiable("Sum of squares of {} diverges".format(self.to_spec()))
        return self.c ** 2 * float(zeta(2 * self.p))

    def partial_sum_of_squares(self, n: int) -> float:
        """sum_{k <= n} gamma_k^2 through the Hurwitz zeta tail."""
        if not self.sum_squares_converges:
            return float(sum(self._step_at(k) ** 2 for k in range(1, n + 1)))
        return self.c ** 2 * float(zeta(2 * self.p) - zeta(2 * self.p, n + 1))

    def to_spec(self):
        return "power:c={!r},p={!r}".format(self.c, self.p)


@STEP_SCHEDULES.register("custom")
class CustomSchedule(StepSchedule):
    """Explicit finite list; nonnegative entries are allowed, so gamma = 0 freezes the iteration."""
    family = "custom"

    def __init__(self, params=None):
        super().__init__(params)
        self.steps = [float(v) for v in self._params.get("steps", [])]
        if not self.steps:
            raise ConfigError("Custom schedule needs at least one step size")
        if any(not np.isfinite(v) or v < 0 for v in self.steps):
            raise ConfigError("Custom step sizes must be finite and nonnegative, got {}".format(self.steps))

    def _step_at(self, n):
        if n > len(self.steps):
            raise IndexError("Custom schedule has {} steps, step {} requested".format(len(self.steps), n))
        return self.steps[n - 1]

    def sum_of_squares(self):
        return float(np.sum(np.square(self.steps)))

    def to_spec(self):
        return "custom:{}".format(json.dumps(self.steps))


def _parse_kv(body: str) -> dict:
    params = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError("Expected key=value in step schedule, got '{}'".format(item))
        params[key.strip()] = float(value)
    return params


def parse_schedule(spec: str) -> StepSchedule:
    """Parses "const:0.1", "power:c=1,p=1" or "custom:[0.1, 0.05]"."""
    family, sep, body = spec.strip().partition(":")
    if not sep:
        raise ConfigError("Step schedule must look like '<family>:<params>', got '{}'".format(spec))
    if family not in STEP_SCHEDULES:
        raise ConfigError("Unknown step schedule family '{}' (known: {})".format(
            family, ", ".join(STEP_SCHEDULES.names())))
    try:
        if family == "const":
            params = {"gamma": float(body)}
        elif family == "power":
            params = _parse_kv(body)
            unknown = set(params) - {"c", "p"}
            if unknown:
                raise ConfigError("Unknown power schedule parameters: {}".format(sorted(unknown)))
        elif family == "custom":
            steps = jstyleson.loads(body)
            if not isinstance(steps, list):
                raise ConfigError("Custom schedule expects a JSON list, got '{}'".format(body))
            params = {"steps": steps}
        else:
            params = {}
    except ValueError as e:
        raise ConfigError("Malformed step schedule '{}': {}".format(spec, e))
    return STEP_SCHEDULES.get(family)(params)


def step_at(schedule: StepSchedule, n: int) -> float:
    return schedule.step_at(n)


class CertificationStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    UNCERTIFIABLE = "uncertifiable"


class Requirement:
    name = None  # type: str

    def check(self, schedule: StepSchedule) -> 'Certification':
        raise NotImplementedError


class RobbinsMonro(Requirement):
    """sum gamma_n = inf and sum gamma_n^2 < inf"""
    name = "RobbinsMonro"

    def check(self, schedule):
        if schedule.sum_diverges is None or schedule.sum_squares_converges is None:
            return Certification(self, CertificationStatus.UNCERTIFIABLE,
                                 "summability of {} is unknown".format(schedule.family))
        if not schedule.sum_diverges:
            return Certification(self, CertificationStatus.FAIL, "sum of step sizes converges")
        if not schedule.sum_squares_converges:
            return Certification(self, CertificationStatus.FAIL, "sum of squared step sizes diverges")
        return Certification(self, CertificationStatus.PASS)


class OMDWindow(Requirement):
    """0 < inf gamma_n <= sup gamma_n < alpha / L"""
    name = "OMDWindow"

    def __init__(self, alpha: float, lipschitz: float):
        if not (alpha > 0 and lipschitz > 0):
            raise ConfigError("OMD window needs alpha > 0 and L > 0, got alpha={}, L={}".format(alpha, lipschitz))
        self.alpha = alpha
        self.lipschitz = lipschitz

    @property
    def limit(self) -> float:
        return self.alpha / self.lipschitz

    def check(self, schedule):
        if schedule.bounded_below_by is None or schedule.bounded_above_by is None:
            return Certification(self, CertificationStatus.UNCERTIFIABLE,
                                 "bounds of {} are unknown".format(schedule.family))
        if not schedule.bounded_below_by > 0:
            return Certification(self, CertificationStatus.FAIL, "inf step size is 0")
        if not schedule.bounded_above_by < self.limit:
            return Certification(self, CertificationStatus.FAIL, "sup step size {!r} >= alpha/L = {!r}".format(
                schedule.bounded_above_by, self.limit))
        return Certification(self, CertificationStatus.PASS)


class Certification:
    def __init__(self, requirement: Requirement, status: CertificationStatus, violated: Optional[str] = None):
        self.requirement = requirement
        self.status = status
        self.violated = violated

    @property
    def passed(self) -> bool:
        return self.status is CertificationStatus.PASS

    def to_dict(self) -> dict:
        return {"requirement": self.requirement.name, "status": self.status.value, "violated": self.violated}

    def __repr__(self):
        suffix = "" if self.violated is None else " ({})".format(self.violated)
        return "{}: {}{}".format(self.requirement.name, self.status.value, suffix)


def certify(schedule: StepSchedule, requirement: Requirement) -> Certification:
    return requirement.check(schedule)
