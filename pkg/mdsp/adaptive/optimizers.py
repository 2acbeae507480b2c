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
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from mdsp.errors import ConfigError, NonFiniteGradient
from mdsp.registry import Registry

ADAPTIVE_OPTIMIZERS = Registry("adaptive optimizer")

GradientFn = Callable[[np.ndarray], np.ndarray]


class AdamHyperparams(NamedTuple):
    beta1: float = 0.0
    beta2: float = 0.9
    eps: float = 1e-8
    lr: float = 1e-4
    lr2: Optional[float] = None
    # Reproduces the printed second-pass recursion: v' mixes with (1 - beta1) and both
    # second-pass moments are bias-corrected by 1 - beta1^t.
    paper_literal: bool = False

    @property
    def second_lr(self) -> float:
        return self.lr if self.lr2 is None else self.lr2

    def validate(self) -> 'AdamHyperparams':
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("beta1 and beta2 must lie in [0, 1), got {} and {}".format(self.beta1, self.beta2))
        if not self.eps > 0:
            raise ConfigError("eps must be positive, got {}".format(self.eps))
        if not (self.lr > 0 and self.second_lr > 0):
            raise ConfigError("Learning rates must be positive, got {} and {}".format(self.lr, self.second_lr))
        return self

    def to_dict(self) -> dict:
        return {"beta1": self.beta1, "beta2": self.beta2, "eps": self.eps, "lr": self.lr, "lr2": self.second_lr,
                "paper_literal": self.paper_literal}


class AdamState(NamedTuple):
    """
    Parameters and the two disjoint moment pairs: (m, v) drive the waiting step,
    (m_extra, v_extra) drive the step taken from theta with the re-queried gradient.
    """
    theta: np.ndarray
    m: np.ndarray
    v: np.ndarray
    m_extra: np.ndarray
    v_extra: np.ndarray
    t: int
    hyperparams: AdamHyperparams
    waiting: Optional[np.ndarray] = None
    evaluations: int = 0

    @classmethod
    def initial(cls, theta, hyperparams: AdamHyperparams = AdamHyperparams()) -> 'AdamState':
        theta = np.array(theta, dtype=np.float64)
        zeros = np.zeros_like(theta)
        return cls(theta, zeros, zeros.copy(), zeros.copy(), zeros.copy(), 0, hyperparams.validate())


def _evaluate(grad: GradientFn, theta: np.ndarray) -> np.ndarray:
    g = np.asarray(grad(theta), dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise NonFiniteGradient("Gradient is not finite at {}: {}".format(theta, g))
    return g


def adam_moment_update(m: np.ndarray, v: np.ndarray, g: np.ndarray, t: int, beta1: float, beta2: float,
                       literal: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Returns (m, v, m_hat, v_hat) after mixing in gradient `g` at timestep `t` >= 1."""
    m = beta1 * m + (1.0 - beta1) * g
    if literal:
        v = beta2 * v + (1.0 - beta1) * g * g
        correction = 1.0 - beta1 ** t
        return m, v, m / correction, v / correction
    v = beta2 * v + (1.0 - beta2) * g * g
    return m, v, m / (1.0 - beta1 ** t), v / (1.0 - beta2 ** t)


def _direction(m_hat, v_hat, eps):
    return m_hat / (np.sqrt(v_hat) + eps)


@ADAPTIVE_OPTIMIZERS.register("adam")
def adam_step(state: AdamState, grad: GradientFn) -> AdamState:
    hp = state.hyperparams
    t = state.t + 1
    g = _evaluate(grad, state.theta)
    m, v, m_hat, v_hat = adam_moment_update(state.m, state.v, g, t, hp.beta1, hp.beta2)
    theta = state.theta - hp.lr * _direction(m_hat, v_hat, hp.eps)
    return state._replace(theta=theta, m=m, v=v, t=t, waiting=None, evaluations=state.evaluations + 1)


@ADAPTIVE_OPTIMIZERS.register("optimistic-adam")
def optimistic_adam_step(state: AdamState, grad: GradientFn) -> AdamState:
    """
    theta'  = theta - lr  * m_hat  / (sqrt(v_hat)  + eps)   with (m, v) fed grad(theta)
    theta_t = theta - lr2 * m_hat' / (sqrt(v_hat') + eps)   with (m', v') fed grad(theta')
    """
    hp = state.hyperparams
    t = state.t + 1
    g = _evaluate(grad, state.theta)
    m, v, m_hat, v_hat = adam_moment_update(state.m, state.v, g, t, hp.beta1, hp.beta2)
    waiting = state.theta - hp.lr * _direction(m_hat, v_hat, hp.eps)

    g_extra = _evaluate(grad, waiting)
    m_extra, v_extra, m_hat_extra, v_hat_extra = adam_moment_update(state.m_extra, state.v_extra, g_extra, t,
                                                                    hp.beta1, hp.beta2, hp.paper_literal)
    theta = state.theta - hp.second_lr * _direction(m_hat_extra, v_hat_extra, hp.eps)
    return state._replace(theta=theta, m=m, v=v, m_extra=m_extra, v_extra=v_extra, t=t, waiting=waiting,
                          evaluations=state.evaluations + 2)


@ADAPTIVE_OPTIMIZERS.register("rmsprop")
def rmsprop_step(state: AdamState, grad: GradientFn) -> AdamState:
    """Second moment only, no bias correction; beta1 is unused."""
    hp = state.hyperparams
    g = _evaluate(grad, state.theta)
    v = hp.beta2 * state.v + (1.0 - hp.beta2) * g * g
    theta = state.theta - hp.lr * _direction(g, v, hp.eps)
    return state._replace(theta=theta, v=v, t=state.t + 1, waiting=None, evaluations=state.evaluations + 1)


@ADAPTIVE_OPTIMIZERS.register("optimistic-rmsprop")
def optimistic_rmsprop_step(state: AdamState, grad: GradientFn) -> AdamState:
    hp = state.hyperparams
    g = _evaluate(grad, state.theta)
    v = hp.beta2 * state.v + (1.0 - hp.beta2) * g * g
    waiting = state.theta - hp.lr * _direction(g, v, hp.eps)

    g_extra = _evaluate(grad, waiting)
    v_extra = hp.beta2 * state.v_extra + (1.0 - hp.beta2) * g_extra * g_extra
    theta = state.theta - hp.second_lr * _direction(g_extra, v_extra, hp.eps)
    return state._replace(theta=theta, v=v, v_extra=v_extra, t=state.t + 1, waiting=waiting,
                          evaluations=state.evaluations + 2)


OPTIMISTIC_OPTIMIZERS = ("optimistic-adam", "optimistic-rmsprop")
