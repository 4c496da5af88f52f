"""The four comparison schedules.

Each baseline restricts or replaces part of the full method so the
experiments can attribute utility to the pieces: a static split that
only picks servers, a nearest-server variant of the full optimizer, and
the two single-backend modes (cloud-only and edge-only).
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Dict, List, NamedTuple, Optional, Tuple

from .assignment import nearest_rsu
from .latency import processing_delay
from .radio import (
    channel_gain,
    effective_position,
    nearest_member,
    pool_rate_table,
    shannon_rate,
)
from .schedule import run_pipeline
from .solvers import SolverConfig
from .types import MscetError, OffloadDecision, Rsu, Scenario, Vehicle
from .utility import UtilityReport, system_utility, vehicle_utility

__all__ = [
    "BaselineResult",
    "run_sgrr",
    "run_nearby",
    "run_cloud_terminal",
    "run_edge_terminal",
]


class BaselineResult(NamedTuple):
    decisions: Dict[int, OffloadDecision]
    report: UtilityReport


def _solo_rate(vehicle: Vehicle, rsu: Rsu, scenario: Scenario) -> float:
    """Interference-free uplink rate from the vehicle's transmit point."""
    gain = channel_gain(
        rsu.position - effective_position(vehicle, rsu), scenario.radio
    )
    return shannon_rate(vehicle.tx_power, gain, scenario.radio, 0.0)


def _fixed_decision(
    vehicle: Vehicle,
    rsu_id: Optional[int],
    shares: Tuple[float, float],
    grant: float,
    scenario: Scenario,
    rate: Optional[float],
) -> Tuple[OffloadDecision, float]:
    """A static split at the given server, judged by its true delay.

    Returns the (possibly flagged) decision and its utility.
    """
    decision = OffloadDecision(
        alpha_edge=shares[0],
        alpha_cloud=shares[1],
        resource=grant,
        rsu_id=rsu_id,
    )
    try:
        delay = processing_delay(decision, vehicle, scenario, rate)
    except (MscetError, ValueError):
        delay = math.inf
    limit = vehicle.task.max_delay
    if delay > limit or delay >= 1.0 + scenario.econ.qos_window:
        return replace(decision, feasible=False), 0.0
    return decision, vehicle_utility(decision, vehicle, scenario, rate)


def run_sgrr(
    scenario: Scenario,
    config: Optional[SolverConfig] = None,
    shares: Tuple[float, float] = (1.0 / 3.0, 1.0 / 3.0),
) -> BaselineResult:
    """Static split, greedy server choice.

    Shares and grants stay fixed (symmetric thirds and an equal split of
    each server's capacity unless overridden); the only freedom is which
    server each vehicle takes.  Vehicles choose in id order, each taking
    the utility-maximizing server whose remaining budget still covers
    the fixed grant; vehicles with no workable server are flagged and
    reserve nothing.
    """
    del config  # static baseline: nothing to solve
    general = scenario.general_vehicles
    slots = max(1, math.ceil(len(general) / max(1, len(scenario.rsus))))
    remaining = {r.rid: r.capacity for r in scenario.rsus}

    decisions: Dict[int, OffloadDecision] = {}
    rates: Dict[int, float] = {}

    for vehicle in sorted(general, key=lambda v: v.vid):
        best: Optional[Tuple[float, int, OffloadDecision, float]] = None
        for rsu in sorted(scenario.rsus, key=lambda r: r.rid):
            grant = rsu.capacity / slots
            if remaining[rsu.rid] < grant * (1.0 - 1e-12):
                continue
            rate = _solo_rate(vehicle, rsu, scenario)
            decision, value = _fixed_decision(
                vehicle, rsu.rid, shares, grant, scenario, rate
            )
            if not decision.feasible:
                continue
            if best is None or value > best[0]:
                best = (value, rsu.rid, decision, rate)
        if best is None:
            fallback = nearest_rsu(vehicle.position, scenario.rsus)
            decisions[vehicle.vid] = OffloadDecision(
                shares[0], shares[1], 0.0, fallback.rid, feasible=False
            )
            rates[vehicle.vid] = _solo_rate(vehicle, fallback, scenario)
            continue
        value, rid, decision, rate = best
        remaining[rid] -= decision.resource
        decisions[vehicle.vid] = decision
        rates[vehicle.vid] = rate

    pool_vehicles = scenario.pool_vehicles
    if pool_vehicles:
        pool_rates = pool_rate_table(scenario)
        rates.update(pool_rates)
        pooled = scenario.pool is not None and scenario.pool.pooled
        for vehicle in sorted(pool_vehicles, key=lambda v: v.vid):
            member = nearest_member(vehicle.position, scenario)
            if pooled:
                grant = scenario.pool_capacity() / len(pool_vehicles)
            else:
                grant = member.capacity / max(
                    1, math.ceil(len(pool_vehicles) / len(scenario.pool.member_ids))
                )
            decision, _ = _fixed_decision(
                vehicle, None, shares, grant, scenario, pool_rates[vehicle.vid]
            )
            decisions[vehicle.vid] = decision

    report = system_utility(decisions, scenario, rates=rates)
    return BaselineResult(decisions, report)


def run_nearby(
    scenario: Scenario,
    config: Optional[SolverConfig] = None,
) -> BaselineResult:
    """Full optimizer, but every vehicle attaches to its nearest server
    instead of using the minimum-distance matching — so a crowd piles
    onto one server and overload becomes possible."""
    attach = {
        v.vid: nearest_rsu(v.position, scenario.rsus).rid
        for v in scenario.general_vehicles
    }
    result = run_pipeline(scenario, config, assignment=attach)
    return BaselineResult(result.decisions, result.report)


def run_cloud_terminal(
    scenario: Scenario,
    config: Optional[SolverConfig] = None,
) -> BaselineResult:
    """Terminal-plus-cloud only: edge shares and grants pinned to zero,
    no server attachment and no driving — the cloud link is available
    from anywhere."""
    result = run_pipeline(
        scenario,
        config,
        allow_cloud=True,
        allow_edge=False,
        move=False,
    )
    return BaselineResult(result.decisions, result.report)


def run_edge_terminal(
    scenario: Scenario,
    config: Optional[SolverConfig] = None,
) -> BaselineResult:
    """Terminal-plus-edge only: cloud shares pinned to zero, and nothing
    is streamed to the cloud while driving toward coverage."""
    result = run_pipeline(scenario, config, allow_cloud=False, allow_edge=True)
    return BaselineResult(result.decisions, result.report)
