"""Min-weight rectangular assignment (shortest augmenting path).

Solves min sum(cost[i, col[i]]) over injective col for an n x m cost
matrix with n <= m.  Ties are broken toward the lowest column index,
which the caller relies on for deterministic slot filling.

The same loop-level source is used for both backends: under numba it is
JIT-compiled; without numba it runs as plain Python (fine at the problem
sizes seen here, n <= a few hundred).
"""
from __future__ import annotations

import numpy as np

from . import NUMBA_ENABLED

_INF = np.inf


def _solve(cost):
    n, m = cost.shape
    u = np.zeros(n)
    v = np.zeros(m + 1)
    match = np.full(m + 1, -1, dtype=np.int64)  # match[j] = row on column j
    way = np.zeros(m + 1, dtype=np.int64)

    for i in range(n):
        match[m] = i  # virtual column hosts the row being inserted
        j0 = m
        minv = np.full(m, _INF)
        used = np.zeros(m + 1, dtype=np.bool_)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = _INF
            j1 = -1
            for j in range(m):
                if not used[j]:
                    cur = cost[i0, j] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:  # strict: lowest j wins ties
                        delta = minv[j]
                        j1 = j
            for j in range(m):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            u[match[m]] += delta
            v[m] -= delta
            j0 = j1
            if match[j0] < 0:
                break
        while j0 != m:  # augment along the alternating path
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1

    col = np.full(n, -1, dtype=np.int64)
    for j in range(m):
        if match[j] >= 0:
            col[match[j]] = j
    return col


_solve_py = _solve

if NUMBA_ENABLED:
    from numba import njit

    _solve = njit(cache=True)(_solve)


def min_weight_assignment(cost: np.ndarray) -> np.ndarray:
    """Column index per row of the minimum-total-weight assignment."""
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = cost.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if n > m:
        raise ValueError(f"need at least as many columns as rows, got {n}x{m}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    return _solve(cost)
