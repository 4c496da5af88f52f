"""Brute-force reference implementations used to validate the solvers.

Everything here trades speed for transparency: uniform grids, exhaustive
enumeration, and a from-scratch restatement of the delay/utility model
that deliberately shares no code with the production solver paths.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .types import OffloadDecision, Rsu, Scenario, Vehicle
from .latency import move_time
from .radio import pool_rate_table, rate_table
from .utility import UtilityReport, system_utility

__all__ = [
    "grid_search_1d",
    "brute_force_matching",
    "exhaustive_small_schedule",
]

#: Largest square dimension ``brute_force_matching`` will enumerate.
ENUMERATION_LIMIT = 6

#: Largest vehicle count ``exhaustive_small_schedule`` will grid.
EXHAUSTIVE_VEHICLE_LIMIT = 2


def grid_search_1d(
    objective: Callable[[float], float],
    lower: float,
    upper: float,
    points: int = 10_000,
) -> Tuple[float, float]:
    """Maximize a scalar objective on a uniform grid over ``[lower, upper]``.

    Returns ``(argmax, max)`` with ties resolved to the smallest grid
    point.  The objective may be vectorized (accepting an ndarray) or a
    plain scalar function; non-finite values are treated as minus
    infinity so a partially undefined objective simply loses those grid
    points.
    """
    if points < 2:
        raise ValueError("grid needs at least 2 points")
    if lower > upper:
        raise ValueError("lower bound exceeds upper bound")
    xs = np.linspace(lower, upper, points)
    vals: Optional[np.ndarray] = None
    try:
        cand = np.asarray(objective(xs), dtype=float)
        if cand.shape == xs.shape:
            vals = cand
    except Exception:
        vals = None
    if vals is None:
        vals = np.fromiter(
            (float(objective(float(x))) for x in xs), dtype=float, count=points
        )
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    best = int(np.argmax(vals))
    return float(xs[best]), float(vals[best])


def brute_force_matching(weights: np.ndarray) -> Tuple[np.ndarray, float]:
    """Minimum-weight row-to-column assignment by full enumeration.

    Returns ``(columns, total)`` where ``columns[i]`` is the column
    assigned to row ``i``.  Ties go to the lexicographically smallest
    column tuple, which makes the result deterministic.  Only instances
    with at most ``ENUMERATION_LIMIT`` rows and columns are accepted.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("weight matrix must be 2-D")
    n, m = w.shape
    if n > m:
        raise ValueError("more rows than columns; no complete assignment exists")
    if n > ENUMERATION_LIMIT or m > ENUMERATION_LIMIT:
        raise ValueError(
            f"matrix {n}x{m} exceeds the enumeration limit "
            f"({ENUMERATION_LIMIT}x{ENUMERATION_LIMIT})"
        )
    best_cols: Optional[Tuple[int, ...]] = None
    best_total = np.inf
    rows = np.arange(n)
    for perm in itertools.permutations(range(m), n):
        total = float(w[rows, list(perm)].sum())
        if total < best_total:
            best_total = total
            best_cols = perm
    assert best_cols is not None
    return np.asarray(best_cols, dtype=np.int64), best_total


def _grid_axis(upper: float, points: int) -> np.ndarray:
    return np.linspace(0.0, max(0.0, upper), points)


def _candidate_values(
    vehicle: Vehicle,
    scenario: Scenario,
    rate: float,
    rsu: Optional[Rsu],
    budget: float,
    points: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Best utility and its grid indices for each resource-axis point.

    Evaluates the full (edge share, cloud share) grid at every resource
    level and reduces over the shares, so budget coupling between two
    vehicles on the same server can be resolved afterwards on the
    resource axis alone.  Returns ``(best, picks)`` where ``best[k]`` is
    the top utility at resource point ``k`` (``-inf`` when nothing is
    feasible there) and ``picks[k]`` flattens the winning share indices.
    """
    task = vehicle.task
    econ = scenario.econ
    bits = task.data_bits
    cycles = task.cycles
    move = move_time(vehicle, rsu) if rsu is not None else 0.0

    shares = np.linspace(0.0, 1.0, points)
    a_e = shares[:, None, None]
    a_c = shares[None, :, None]
    f = _grid_axis(budget, points)[None, None, :]

    with np.errstate(divide="ignore", invalid="ignore"):
        upload = a_e * bits / rate if rate > 0.0 else np.full_like(a_e, np.inf)
        t_local = (1.0 - a_e - a_c) * cycles / vehicle.local_compute
        t_edge = np.where(a_e > 0.0, move + upload + a_e * cycles / f, 0.0)
        relay = np.where(a_e > 0.0, move + upload, 0.0)
        t_cloud = np.where(
            a_c > 0.0,
            relay
            + a_c * bits / scenario.radio.cloud_rate
            + a_c * cycles / econ.cloud_compute,
            0.0,
        )
        delay = np.maximum(np.maximum(t_local, t_edge), t_cloud)
        ok = (a_e + a_c <= 1.0 + 1e-12) & (delay <= task.max_delay)
        gain = (
            econ.revenue_per_cycle * (a_e + a_c) * cycles
            - econ.resource_price * (f + econ.cloud_compute)
        )
        qos = np.log2(np.maximum(1.0 + econ.qos_window - delay, 1e-300))
        util = econ.beta_profit * gain + econ.beta_qos * qos

    util = np.where(ok, util, -np.inf)
    flat = util.reshape(points * points, points)
    picks = np.argmax(flat, axis=0)
    best = flat[picks, np.arange(points)]
    return best, picks


def _decision_from_pick(
    pick: int,
    f_index: int,
    vehicle: Vehicle,
    rsu: Optional[Rsu],
    budget: float,
    points: int,
) -> OffloadDecision:
    shares = np.linspace(0.0, 1.0, points)
    f_axis = _grid_axis(budget, points)
    i_e, i_c = divmod(int(pick), points)
    return OffloadDecision(
        alpha_edge=float(shares[i_e]),
        alpha_cloud=float(shares[i_c]),
        resource=float(f_axis[f_index]),
        rsu_id=None if rsu is None else rsu.rid,
    )


def _flagged(vehicle: Vehicle, rsu: Optional[Rsu]) -> OffloadDecision:
    return OffloadDecision(
        alpha_edge=0.0,
        alpha_cloud=0.0,
        resource=0.0,
        rsu_id=None if rsu is None else rsu.rid,
        feasible=False,
    )


def exhaustive_small_schedule(
    scenario: Scenario, resolution: int = 50
) -> Tuple[Dict[int, OffloadDecision], UtilityReport]:
    """Globally best schedule of a tiny instance by exhaustive gridding.

    Grids every vehicle's (edge share, cloud share, resource) box at
    ``resolution`` points per axis, tries every server attachment for
    vehicles that must pick one, honours shared resource budgets when
    two vehicles land on the same server, and lets any vehicle fall
    back to an flagged zero decision worth exactly nothing.  Instances
    are limited to ``EXHAUSTIVE_VEHICLE_LIMIT`` vehicles.
    """
    vehicles = scenario.vehicles
    if len(vehicles) > EXHAUSTIVE_VEHICLE_LIMIT:
        raise ValueError(
            f"instance has {len(vehicles)} vehicles; the exhaustive oracle "
            f"accepts at most {EXHAUSTIVE_VEHICLE_LIMIT}"
        )
    if resolution < 2:
        raise ValueError("resolution must be at least 2")

    pool_rates = pool_rate_table(scenario) if scenario.pool is not None else {}
    pool_budget = scenario.pool_capacity() if scenario.pool is not None else 0.0

    # Per vehicle, enumerate its attachment options: every roadside
    # server for selection-bound vehicles, the shared pool otherwise.
    options: Dict[int, list] = {}
    for veh in vehicles:
        if veh.in_pool_region:
            options[veh.vid] = [None]
        else:
            options[veh.vid] = list(scenario.rsus)

    best_value = -np.inf
    best_decisions: Optional[Dict[int, OffloadDecision]] = None

    for combo in itertools.product(*(options[v.vid] for v in vehicles)):
        assignment = {
            veh.vid: (rsu.rid if rsu is not None else None)
            for veh, rsu in zip(vehicles, combo)
        }
        general_rates = rate_table(
            scenario,
            {vid: rid for vid, rid in assignment.items() if rid is not None},
        )

        per_vehicle: Dict[int, Tuple[np.ndarray, np.ndarray, Optional[Rsu], float]] = {}
        combo_rates: Dict[int, float] = {}
        for veh, rsu in zip(vehicles, combo):
            if rsu is None:
                rate = pool_rates.get(veh.vid, 0.0)
                budget = pool_budget
            else:
                rate = general_rates[veh.vid]
                budget = rsu.capacity
            combo_rates[veh.vid] = rate
            best, picks = _candidate_values(
                veh, scenario, rate, rsu, budget, resolution
            )
            per_vehicle[veh.vid] = (best, picks, rsu, budget)

        def settle(veh: Vehicle, idx: int, cap: float) -> Tuple[OffloadDecision, float]:
            """Vehicle's decision and value at resource index ``idx``,
            falling back to the worthless flagged decision whenever the
            gridded best there is absent or below zero."""
            bv, pv, rv, _ = per_vehicle[veh.vid]
            val = float(bv[idx])
            if np.isfinite(val) and val >= 0.0:
                return _decision_from_pick(pv[idx], idx, veh, rv, cap, resolution), val
            return _flagged(veh, rv), 0.0

        decisions: Dict[int, OffloadDecision] = {}
        total = 0.0
        va = vehicles[0]
        ra = per_vehicle[va.vid][2]
        vb = vehicles[1] if len(vehicles) == 2 else None
        rb = per_vehicle[vb.vid][2] if vb is not None else None
        shared_pool = (
            vb is not None and ra is None and rb is None and scenario.pool is not None
        )
        same_server = shared_pool or (
            vb is not None and ra is not None and rb is not None and ra.rid == rb.rid
        )
        if vb is not None and same_server:
            cap = pool_budget if shared_pool else ra.capacity
            f_axis = _grid_axis(cap, resolution)
            # A flagged vehicle consumes no resource, so it competes with
            # real decisions only at the zero point of the resource axis.
            ua = per_vehicle[va.vid][0].copy()
            ub = per_vehicle[vb.vid][0].copy()
            ua[0] = max(ua[0], 0.0)
            ub[0] = max(ub[0], 0.0)
            pair = ua[:, None] + ub[None, :]
            pair = np.where(
                f_axis[:, None] + f_axis[None, :] <= cap + 1e-9 * max(cap, 1.0),
                pair,
                -np.inf,
            )
            ia, ib = np.unravel_index(int(np.argmax(pair)), pair.shape)
            for veh, idx in ((va, int(ia)), (vb, int(ib))):
                dec, val = settle(veh, idx, cap)
                decisions[veh.vid] = dec
                total += val
        else:
            for veh in vehicles:
                bv, _, _, cv = per_vehicle[veh.vid]
                idx = int(np.argmax(bv))
                dec, val = settle(veh, idx, cv)
                decisions[veh.vid] = dec
                total += val

        if total > best_value:
            best_value = total
            best_decisions = decisions
            best_rates = combo_rates

    assert best_decisions is not None
    report = system_utility(best_decisions, scenario, rates=best_rates)
    return best_decisions, report
