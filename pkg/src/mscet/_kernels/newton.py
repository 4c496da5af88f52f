"""Damped-Newton maximizer for the barrier-smoothed resource subproblem.

Maximizes, over per-vehicle compute allocations f (cycles/s),

    sum_i [ -lin_cost*f_i + qos_weight*log2(qos_base_i - work_i/f_i) ]
    - r*sum_i 1/s_i - r/s_B

with slacks s_i = deadline_i - comm_i - work_i/f_i (delay headroom) and
s_B = budget - sum(f) (capacity headroom), for a decaying barrier weight
r.  The Hessian is diagonal-plus-rank-one, so each Newton step is solved
in closed form via Sherman-Morrison.

The objective is strictly concave on the open feasible box, hence the
inner loop converges to the unique stage optimum; stages stop once the
iterate moves less than ``step_tol`` between barrier weights.

Single source for both backends: JIT-compiled under numba, executed as
plain numpy otherwise (the body is array expressions, so the fallback is
already vectorized).
"""
from __future__ import annotations

import numpy as np

from . import NUMBA_ENABLED

_LN2 = float(np.log(2.0))
_TINY = 1e-12


def _asum(a):
    # Naive left-to-right accumulation: numba lowers loops (and its own
    # np.sum) to exactly this order, while numpy's runtime np.sum is
    # pairwise — summing explicitly keeps both backends bit-identical.
    total = 0.0
    for i in range(a.shape[0]):
        total += a[i]
    return total


def _solve(comm, work, deadline, qos_base, lin_cost, qos_weight, budget,
           f_floor, r0, decay, step_tol, max_stages, max_newton):
    n = comm.shape[0]
    headroom = budget - _asum(f_floor)
    f = f_floor + 0.9 * headroom / n

    r = r0
    stages = 0
    converged = False
    for _ in range(max_stages):
        stages += 1
        f_prev = f.copy()
        for _ in range(max_newton):
            inv_f = 1.0 / f
            load = work * inv_f
            s = deadline - comm - load
            q = qos_base - load
            s_b = budget - _asum(f)

            # Spelled-out powers: numpy's integer-power fast path and the
            # compiled pow disagree in the last ulp, explicit products
            # do not.
            inv_f3 = inv_f * inv_f * inv_f
            inv_f4 = inv_f3 * inv_f
            grad = (-lin_cost
                    + qos_weight * work * inv_f * inv_f / (q * _LN2)
                    + r * work * inv_f * inv_f / (s * s)
                    - r / (s_b * s_b))
            d = (-qos_weight * work / _LN2 * (2.0 * inv_f3 / q
                                              + work * inv_f4 / (q * q))
                 - 2.0 * r * work * (inv_f3 / (s * s)
                                     + work * inv_f4 / (s * s * s)))
            c = -2.0 * r / (s_b * s_b * s_b)

            # Newton step for H = diag(d) + c*1*1^T (Sherman-Morrison)
            gd = grad / d
            denom = 1.0 + c * _asum(1.0 / d)
            step = -(gd - (c * _asum(gd) / denom) / d)

            phi0 = (_asum(-lin_cost * f + qos_weight * np.log2(q))
                    - r * _asum(1.0 / s) - r / s_b)
            t = 1.0
            ok = False
            for _ in range(60):
                f_try = f + t * step
                s_try = deadline - comm - work / f_try
                sb_try = budget - _asum(f_try)
                if np.all(f_try > f_floor) and np.all(s_try > _TINY) and sb_try > _TINY:
                    q_try = qos_base - work / f_try
                    phi_try = (_asum(-lin_cost * f_try
                                     + qos_weight * np.log2(q_try))
                               - r * _asum(1.0 / s_try) - r / sb_try)
                    if phi_try >= phi0:
                        ok = True
                        break
                t *= 0.5
            if not ok:
                break
            f = f + t * step
            if t * np.max(np.abs(step)) <= 0.01 * step_tol:
                break
        if np.max(np.abs(f - f_prev)) <= step_tol:
            converged = True
            break
        r *= decay
    return f, converged, stages


_solve_py = _solve

if NUMBA_ENABLED:
    from numba import njit

    _asum = njit(cache=True)(_asum)
    _solve = njit(cache=True)(_solve)


def barrier_newton(comm, work, deadline, qos_base, lin_cost, qos_weight,
                   budget, f_floor, r0=1.0, decay=0.1, step_tol=None,
                   max_stages=30, max_newton=50):
    """Barrier solve; returns (f, converged, stages).

    Callers must pass a strictly feasible instance: deadline - comm > 0
    per vehicle and sum(f_floor) < budget.
    """
    comm = np.ascontiguousarray(comm, dtype=np.float64)
    work = np.ascontiguousarray(work, dtype=np.float64)
    deadline = np.ascontiguousarray(deadline, dtype=np.float64)
    qos_base = np.ascontiguousarray(qos_base, dtype=np.float64)
    f_floor = np.ascontiguousarray(f_floor, dtype=np.float64)
    if step_tol is None:
        step_tol = 1e-4 * budget
    if np.sum(f_floor) >= budget:
        raise ValueError("floor allocations already exceed the budget")
    if np.any(deadline - comm <= 0.0):
        raise ValueError("some vehicle has no delay headroom at f -> inf")
    return _solve(comm, work, deadline, qos_base, float(lin_cost),
                  float(qos_weight), float(budget), f_floor, float(r0),
                  float(decay), float(step_tol), int(max_stages),
                  int(max_newton))
