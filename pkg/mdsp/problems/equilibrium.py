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

Equilibria of zero-sum matrix games f(x1, x2) = x1^T A x2, where player 1 (rows)
minimizes and player 2 (columns) maximizes.
"""
import itertools
from typing import List, Tuple

import numpy as np
from scipy.optimize import linprog

from mdsp.errors import ConfigError
from mdsp.mdsp_logger import logger

SUPPORT_ENUMERATION_MAX_DIM = 4
EQUILIBRIUM_TOL = 1e-9


def _indifference(payoff: np.ndarray, rows, cols):
    """Mixed strategy on `cols` making every row in `rows` yield the same value, or None."""
    k = len(rows)
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = payoff[np.ix_(rows, cols)]
    system[:k, k] = -1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.any(solution[:k] < -EQUILIBRIUM_TOL):
        return None
    return np.clip(solution[:k], 0.0, None), solution[k]


def support_enumeration(payoff: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """All equilibria with equal-size supports; complete for nondegenerate games."""
    payoff = np.asarray(payoff, dtype=np.float64)
    n_rows, n_cols = payoff.shape
    found = []
    for k in range(1, min(n_rows, n_cols) + 1):
        for rows in itertools.combinations(range(n_rows), k):
            for cols in itertools.combinations(range(n_cols), k):
                col_part = _indifference(payoff, rows, cols)
                row_part = _indifference(payoff.T, cols, rows)
                if col_part is None or row_part is None:
                    continue
                x2 = np.zeros(n_cols)
                x2[list(cols)] = col_part[0]
                x1 = np.zeros(n_rows)
                x1[list(rows)] = row_part[0]
                value = float(x1 @ payoff @ x2)
                # Row player minimizes, so no row may do better than the game value; symmetrically for columns.
                if np.min(payoff @ x2) < value - EQUILIBRIUM_TOL:
                    continue
                if np.max(payoff.T @ x1) > value + EQUILIBRIUM_TOL:
                    continue
                if not any(np.allclose(x1, f1) and np.allclose(x2, f2) for f1, f2 in found):
                    found.append((x1, x2))
    return found


def linear_program_equilibrium(payoff: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One equilibrium from the pair of minimax linear programs."""
    payoff = np.asarray(payoff, dtype=np.float64)
    n_rows, n_cols = payoff.shape

    # Column player: maximize v s.t. A x2 >= v, x2 in the simplex.
    c = np.zeros(n_cols + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-payoff, np.ones((n_rows, 1))])
    a_eq = np.hstack([np.ones((1, n_cols)), np.zeros((1, 1))])
    bounds = [(0, None)] * n_cols + [(None, None)]
    cols = linprog(c, A_ub=a_ub, b_ub=np.zeros(n_rows), A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")

    # Row player: minimize w s.t. A^T x1 <= w, x1 in the simplex.
    c = np.zeros(n_rows + 1)
    c[-1] = 1.0
    a_ub = np.hstack([payoff.T, -np.ones((n_cols, 1))])
    a_eq = np.hstack([np.ones((1, n_rows)), np.zeros((1, 1))])
    bounds = [(0, None)] * n_rows + [(None, None)]
    rows = linprog(c, A_ub=a_ub, b_ub=np.zeros(n_cols), A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")

    if not (cols.success and rows.success):
        raise ConfigError("Linear programming failed to solve the game: {} / {}".format(rows.message, cols.message))
    x1 = np.clip(rows.x[:n_rows], 0.0, None)
    x2 = np.clip(cols.x[:n_cols], 0.0, None)
    return x1 / x1.sum(), x2 / x2.sum()


def solve_zero_sum(payoff: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    payoff = np.asarray(payoff, dtype=np.float64)
    if max(payoff.shape) <= SUPPORT_ENUMERATION_MAX_DIM:
        equilibria = support_enumeration(payoff)
        if equilibria:
            return equilibria
        logger.debug("Support enumeration found no equilibrium of a degenerate game, using linear programming")
    return [linear_program_equilibrium(payoff)]


def is_interior(profile: Tuple[np.ndarray, np.ndarray], tol: float = EQUILIBRIUM_TOL) -> bool:
    return all(bool(np.all(part > tol)) for part in profile)
