"""Operator utility: offloading revenue minus resource cost plus a
logarithmic timeliness reward, and feasibility reporting for a full
schedule.

A vehicle flagged infeasible contributes exactly zero to the system
utility; its constraint residuals are not charged against the schedule
because the flag already concedes the point.
"""
from __future__ import annotations

import math
from typing import Dict, Mapping, NamedTuple, Optional, Tuple

from .latency import processing_delay
from .radio import nearest_member
from .types import EconParams, OffloadDecision, QosDomainError, Scenario

RESIDUAL_TOL = 1e-6


def qos_utility(delay: float, econ: EconParams) -> float:
    """Timeliness reward: grows as the task finishes further ahead of the
    satisfaction horizon."""
    margin = 1.0 + econ.qos_window - delay
    if margin <= 0.0:
        raise QosDomainError(
            f"delay {delay:.6g}s leaves no satisfaction margin "
            f"(window {econ.qos_window:.6g}s)"
        )
    return math.log2(margin)


def vehicle_utility(
    decision: OffloadDecision,
    vehicle,
    scenario: Scenario,
    rate: Optional[float] = None,
) -> float:
    """Utility one vehicle earns the operator under the given decision."""
    if not decision.feasible:
        return 0.0
    econ = scenario.econ
    task = vehicle.task
    revenue = econ.revenue_per_cycle * decision.total_offloaded * task.cycles
    cost = econ.resource_price * (decision.resource + econ.cloud_compute)
    profit = econ.beta_profit * (revenue - cost)
    delay = processing_delay(decision, vehicle, scenario, rate)
    return profit + econ.beta_qos * qos_utility(delay, econ)


class UtilityReport(NamedTuple):
    total: float
    per_vehicle: Dict[int, float]
    infeasible: Tuple[int, ...]


def system_utility(
    decisions: Mapping[int, OffloadDecision],
    scenario: Scenario,
    rates: Optional[Mapping[int, float]] = None,
) -> UtilityReport:
    """Sum of per-vehicle utilities over a complete schedule."""
    rates = rates or {}
    per: Dict[int, float] = {}
    infeasible = []
    for vehicle in scenario.vehicles:
        decision = decisions[vehicle.vid]
        if not decision.feasible:
            per[vehicle.vid] = 0.0
            infeasible.append(vehicle.vid)
            continue
        per[vehicle.vid] = vehicle_utility(
            decision, vehicle, scenario, rates.get(vehicle.vid)
        )
    return UtilityReport(
        total=float(sum(per.values())),
        per_vehicle=per,
        infeasible=tuple(infeasible),
    )


class ConstraintReport(NamedTuple):
    ok: bool
    max_residual: float
    worst: str
    residuals: Dict[str, float]


def _relative_excess(value: float, limit: float) -> float:
    if limit <= 0:
        return 0.0 if value <= 0 else math.inf
    return max(0.0, (value - limit) / limit)


def check_constraints(
    decisions: Mapping[int, OffloadDecision],
    scenario: Scenario,
    rates: Optional[Mapping[int, float]] = None,
    tol: float = RESIDUAL_TOL,
) -> ConstraintReport:
    """Constraint residuals of a schedule, largest first.

    Families: per-task deadline, offload-ratio box and sum, one server per
    attached vehicle, per-server resource budgets, and the shared pool
    budget. Vehicles flagged infeasible are exempt (the flag is the
    concession); everything else must sit within ``tol`` relative slack.
    """
    rates = rates or {}
    residuals: Dict[str, float] = {
        "deadline": 0.0,
        "ratio_sum": 0.0,
        "edge_ratio": 0.0,
        "cloud_ratio": 0.0,
        "selection": 0.0,
        "single_server": 0.0,
        "server_budget": 0.0,
        "pool_budget": 0.0,
    }
    rsu_ids = {r.rid for r in scenario.rsus}
    server_load: Dict[int, float] = {r.rid: 0.0 for r in scenario.rsus}
    pool_load = 0.0

    for vehicle in scenario.vehicles:
        decision = decisions[vehicle.vid]
        if decision.rsu_id is not None and decision.rsu_id not in rsu_ids:
            residuals["selection"] = max(residuals["selection"], 1.0)
        if vehicle.in_pool_region:
            pool_load += decision.resource
            if scenario.pool is not None and not scenario.pool.pooled:
                member = nearest_member(vehicle.position, scenario)
                server_load[member.rid] += decision.resource
        elif decision.rsu_id is not None:
            server_load[decision.rsu_id] += decision.resource

        if not decision.feasible:
            continue

        a_e, a_c = decision.alpha_edge, decision.alpha_cloud
        residuals["edge_ratio"] = max(
            residuals["edge_ratio"], max(0.0, -a_e), max(0.0, a_e - 1.0)
        )
        residuals["cloud_ratio"] = max(
            residuals["cloud_ratio"], max(0.0, -a_c), max(0.0, a_c - 1.0)
        )
        residuals["ratio_sum"] = max(residuals["ratio_sum"], max(0.0, a_e + a_c - 1.0))
        if not vehicle.in_pool_region and decision.rsu_id is None:
            residuals["single_server"] = max(residuals["single_server"], 1.0)

        if a_e + a_c <= 1.0 + 1e-9:
            delay = processing_delay(
                decision, vehicle, scenario, rates.get(vehicle.vid)
            )
            residuals["deadline"] = max(
                residuals["deadline"],
                _relative_excess(delay, vehicle.task.max_delay),
            )

    for rsu in scenario.rsus:
        residuals["server_budget"] = max(
            residuals["server_budget"],
            _relative_excess(server_load[rsu.rid], rsu.capacity),
        )
    if scenario.pool is not None and scenario.pool.pooled:
        residuals["pool_budget"] = _relative_excess(
            pool_load, scenario.pool_capacity()
        )

    worst = max(residuals, key=lambda k: residuals[k])
    worst_val = residuals[worst]
    return ConstraintReport(
        ok=worst_val <= tol,
        max_residual=worst_val,
        worst=worst,
        residuals=dict(residuals),
    )
