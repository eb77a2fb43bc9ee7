"""Reference solvers for linear complementarity problems on the orthant.

These are brute force routines (support enumeration, principal minors,
feasibility programs) meant to cross check the cone solvers on small
instances, not to be fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

__all__ = ["lcp_enumerate", "p_matrix_minor_test", "lcp_zero_unique",
           "MinorReport", "LcpSolution"]

_MAX_N = 16


@dataclass
class LcpSolution:
    x: np.ndarray
    y: np.ndarray
    support: tuple

    def __iter__(self):
        return iter((self.x, self.y, self.support))


@dataclass
class MinorReport:
    is_p_matrix: bool
    min_minor: float
    witness: tuple | None


def _supports(n):
    for k in range(n + 1):
        yield from combinations(range(n), k)


def lcp_enumerate(M, q, tol=1e-9):
    """All solutions of x >= 0, Mx + q >= 0, x (Mx + q) = 0 by support
    enumeration over the 2^n complementary bases."""
    M = np.asarray(M, dtype=float)
    q = np.asarray(q, dtype=float)
    n = q.size
    if M.shape != (n, n):
        raise ValueError("matrix and vector shapes disagree")
    if n > _MAX_N:
        raise ValueError("enumeration limited to n <= %d" % _MAX_N)
    sols = []
    seen = set()
    for S in _supports(n):
        x = np.zeros(n)
        if S:
            idx = np.array(S)
            try:
                xs = np.linalg.solve(M[np.ix_(idx, idx)], -q[idx])
            except np.linalg.LinAlgError:
                continue
            if (xs < -tol).any():
                continue
            x[idx] = np.maximum(xs, 0.0)
        y = M @ x + q
        if (y < -tol).any():
            continue
        if abs(x @ y) > tol * max(1.0, np.linalg.norm(x) * np.linalg.norm(y)):
            continue
        key = tuple(np.round(x, 9))
        if key not in seen:
            seen.add(key)
            sols.append(LcpSolution(x, y, S))
    return sols


def p_matrix_minor_test(M, tol=0.0):
    """P-matrix check: every principal minor must exceed tol."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n > _MAX_N:
        raise ValueError("minor enumeration limited to n <= %d" % _MAX_N)
    worst = np.inf
    witness = None
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            idx = np.array(S)
            d = float(np.linalg.det(M[np.ix_(idx, idx)]))
            if d < worst:
                worst = d
                witness = S
    return MinorReport(worst > tol, worst, witness)


def lcp_zero_unique(M, tol=1e-9):
    """Whether LCP(M, 0) admits only the zero solution.

    For each nonempty support S this solves the feasibility program
    M_SS x_S = 0, M_{S^c S} x_S >= 0, x_S >= 0, sum x_S = 1; any feasible
    point scales to a nonzero LCP solution.  Returns (unique, witness).
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n > _MAX_N:
        raise ValueError("support enumeration limited to n <= %d" % _MAX_N)
    for S in _supports(n):
        if not S:
            continue
        idx = np.array(S)
        rest = np.array([i for i in range(n) if i not in S], dtype=int)
        k = len(S)
        A_eq = np.vstack([M[np.ix_(idx, idx)], np.ones((1, k))])
        b_eq = np.concatenate([np.zeros(k), [1.0]])
        if rest.size:
            A_ub = -M[np.ix_(rest, idx)]
            b_ub = np.zeros(rest.size)
        else:
            A_ub = None
            b_ub = None
        res = linprog(np.zeros(k), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq,
                      b_eq=b_eq, bounds=[(0.0, None)] * k, method="highs")
        if res.status == 0:
            x = np.zeros(n)
            x[idx] = res.x
            y = M @ x
            if (x >= -tol).all() and (y >= -tol).all() \
                    and abs(x @ y) <= max(tol, 1e-7) * max(1.0, x @ x):
                return False, x
    return True, None
