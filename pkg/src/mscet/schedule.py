"""End-to-end schedule construction: selection, in-transit work, and the
three-level alternating optimization.

The run proceeds in phases.  Selection-bound vehicles are matched to
servers by minimum total distance; each then sheds work while driving
into coverage (streamed to the cloud and crunched on board).  The
residual tasks enter an alternating loop: a genetic pass over every
cloud share, then an inner loop pairing a joint interior-point solve of
the compute grants with a closed-form pass over the edge shares.  Every
iterate is scored by the true composed delay, and the best-scoring
snapshot is what the run returns — the alternating scheme itself is not
guaranteed monotone, so the memo guards against oscillation.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .assignment import cloud_terminal_update, match_general, nearest_rsu
from .latency import cs_upper_bound, es_upper_bound, processing_delay
from .radio import pool_rate_table, rate_table
from .solvers import (
    AlphaProblem,
    ResourceProblem,
    SolverConfig,
    ga_solve_alpha_c,
    ipm_solve_f,
    kkt_solve_alpha_e,
    minimum_resources,
)
from .types import (
    InfeasibleBudgetError,
    InvalidRateError,
    OffloadDecision,
    QosDomainError,
    Scenario,
    TaskExpiredError,
    TaskSpec,
    Vehicle,
    ZeroAllocationError,
)
from .utility import UtilityReport, check_constraints, system_utility

__all__ = [
    "TraceRecord",
    "ScheduleResult",
    "default_init",
    "frozen_rates",
    "run_mscet",
    "run_pipeline",
]

_DELAY_SLACK = 1e-9  # relative headroom when judging deadlines


class TraceRecord(NamedTuple):
    """One scored iterate: loop counters, phase label, and its score."""

    outer: int
    mid: int
    phase: str
    utility: float
    max_residual: float
    infeasible: int


class ScheduleResult(NamedTuple):
    decisions: Dict[int, OffloadDecision]
    report: UtilityReport
    trace: List[TraceRecord]


class _Slot(NamedTuple):
    """Static per-vehicle facts the optimization loop works against."""

    vehicle: Vehicle
    rsu_id: Optional[int]
    rate: float
    task: TaskSpec  # residual work and remaining deadline
    move_time: float
    pre_cloud: float
    pre_local: float
    residual: float
    group: object  # budget-sharing key


class _FixedDecision(NamedTuple):
    vid: int
    decision: OffloadDecision


def _judge(
    decision: OffloadDecision,
    vehicle: Vehicle,
    scenario: Scenario,
    rate: Optional[float],
) -> OffloadDecision:
    """Stamp the decision's flag from its true composed delay."""
    try:
        delay = processing_delay(decision, vehicle, scenario, rate)
    except (QosDomainError, InvalidRateError, ZeroAllocationError, ValueError):
        return replace(decision, feasible=False)
    limit = vehicle.task.max_delay * (1.0 + _DELAY_SLACK)
    ok = delay <= limit and delay < 1.0 + scenario.econ.qos_window
    return decision if decision.feasible == ok else replace(decision, feasible=ok)


def _prepare(
    scenario: Scenario,
    use_cloud_during_move: bool = True,
    move: bool = True,
    assignment: Optional[Dict[int, int]] = None,
) -> Tuple[List[_Slot], List[_FixedDecision], Dict[int, float], Dict[int, int]]:
    """Selection and in-transit phases shared by every optimizing schedule.

    Returns the optimizable slots, the decisions already settled by the
    drive (tasks completed in transit or expired on the road), the
    frozen uplink rates, and the selection map.  ``move=False`` skips
    selection and the drive entirely: every vehicle stays where it is
    and talks to the cloud over the direct link only.  ``assignment``
    overrides the minimum-distance matching with a caller-chosen
    vehicle-to-server map.
    """
    if not move:
        # No driving and no uplink: every share but the cloud's is pinned
        # upstream.  Selection-bound vehicles still record their nearest
        # server so the one-server-per-vehicle constraint holds (the
        # attachment is pure bookkeeping at zero edge share and grant).
        slots = [
            _Slot(
                veh,
                None
                if veh.in_pool_region
                else nearest_rsu(veh.position, scenario.rsus).rid,
                0.0,
                veh.task,
                0.0,
                0.0,
                0.0,
                1.0,
                "unattached",
            )
            for veh in scenario.vehicles
        ]
        return slots, [], {}, {}

    if assignment is None:
        assignment = match_general(scenario)
    rates: Dict[int, float] = {}
    if assignment:
        rates.update(rate_table(scenario, assignment))
    pool_vehicles = scenario.pool_vehicles
    if pool_vehicles:
        rates.update(pool_rate_table(scenario))

    pooled = scenario.pool is not None and scenario.pool.pooled
    slots: List[_Slot] = []
    fixed: List[_FixedDecision] = []

    for veh in scenario.vehicles:
        if veh.in_pool_region:
            if pooled:
                group: object = "pool"
            else:
                group = ("rsu", nearest_rsu(veh.position, scenario.rsus).rid)
            slots.append(
                _Slot(veh, None, rates.get(veh.vid, 0.0), veh.task, 0.0, 0.0, 0.0, 1.0, group)
            )
            continue

        rid = assignment[veh.vid]
        rsu = scenario.rsu_by_id(rid)
        try:
            update = cloud_terminal_update(
                veh, rsu, scenario.radio, use_cloud_link=use_cloud_during_move
            )
        except TaskExpiredError:
            fixed.append(
                _FixedDecision(
                    veh.vid,
                    OffloadDecision(0.0, 0.0, 0.0, rid, feasible=False),
                )
            )
            continue
        if update.completed:
            fixed.append(
                _FixedDecision(
                    veh.vid,
                    OffloadDecision(
                        0.0,
                        0.0,
                        0.0,
                        rid,
                        feasible=True,
                        move_time=update.move_time,
                        pre_cloud=update.pre_cloud,
                        pre_local=update.pre_local,
                        residual=0.0,
                    ),
                )
            )
            continue
        assert update.residual_task is not None
        slots.append(
            _Slot(
                veh,
                rid,
                rates[veh.vid],
                update.residual_task,
                update.move_time,
                update.pre_cloud,
                update.pre_local,
                update.residual,
                ("rsu", rid),
            )
        )
    return slots, fixed, rates, assignment


def frozen_rates(scenario: Scenario) -> Dict[int, float]:
    """The uplink rates a schedule run freezes per vehicle: matched-server
    rates for selection-bound vehicles, nearest-member rates in the shared
    region.  Useful for re-checking a returned schedule's constraints."""
    rates: Dict[int, float] = {}
    assignment = match_general(scenario)
    if assignment:
        rates.update(rate_table(scenario, assignment))
    if scenario.pool_vehicles:
        rates.update(pool_rate_table(scenario))
    return rates


def _group_budget(scenario: Scenario, group: object) -> float:
    if group == "pool":
        return scenario.pool_capacity()
    assert isinstance(group, tuple)
    return scenario.rsu_by_id(group[1]).capacity


def _build_decisions(
    slots: Sequence[_Slot],
    alpha_e: Sequence[float],
    alpha_c: Sequence[float],
    grants: Sequence[float],
    fixed: Sequence[_FixedDecision],
    scenario: Scenario,
) -> Dict[int, OffloadDecision]:
    decisions: Dict[int, OffloadDecision] = {}
    for vid, dec in fixed:
        decisions[vid] = dec
    for slot, ae, ac, f in zip(slots, alpha_e, alpha_c, grants):
        dec = OffloadDecision(
            alpha_edge=float(ae),
            alpha_cloud=float(ac),
            resource=float(f),
            rsu_id=slot.rsu_id,
            move_time=slot.move_time,
            pre_cloud=slot.pre_cloud,
            pre_local=slot.pre_local,
            residual=slot.residual,
        )
        decisions[slot.vehicle.vid] = _judge(
            dec, slot.vehicle, scenario, slot.rate if slot.rate > 0.0 else None
        )
    return decisions


def default_init(
    scenario: Scenario,
    shares: Tuple[float, float] = (1.0 / 3.0, 1.0 / 3.0),
) -> Dict[int, OffloadDecision]:
    """Starting point: symmetric shares and an equal budget split.

    Every vehicle opens at the given (edge, cloud) shares; each budget
    group's capacity is split equally among its vehicles.  Decisions
    whose true delay already misses the deadline are flagged rather
    than repaired further, so the returned point always passes the
    constraint check.
    """
    if not 0.0 <= shares[0] <= 1.0 or not 0.0 <= shares[1] <= 1.0:
        raise ValueError("shares must lie in [0, 1]")
    if shares[0] + shares[1] > 1.0:
        raise ValueError("shares must sum to at most 1")
    slots, fixed, _, _ = _prepare(scenario)
    counts: Dict[object, int] = {}
    for slot in slots:
        counts[slot.group] = counts.get(slot.group, 0) + 1
    alpha_e = [shares[0]] * len(slots)
    alpha_c = [shares[1]] * len(slots)
    grants = [
        _group_budget(scenario, slot.group) / counts[slot.group] for slot in slots
    ]
    return _build_decisions(slots, alpha_e, alpha_c, grants, fixed, scenario)


def _solve_grants(
    slots: Sequence[_Slot],
    alpha_e: List[float],
    alpha_c: List[float],
    scenario: Scenario,
    config: SolverConfig,
) -> List[float]:
    """Per-group interior-point grants with load shedding.

    When a group's minimum needs exceed its budget, the hungriest
    vehicle is pushed off the edge path (share and grant zeroed) and the
    solve retries — the schedule never aborts for one vehicle.
    """
    grants = [0.0] * len(slots)
    groups: Dict[object, List[int]] = {}
    for i, slot in enumerate(slots):
        groups.setdefault(slot.group, []).append(i)

    for group, members in groups.items():
        budget = _group_budget(scenario, group)
        live = list(members)
        while True:
            problems = [
                ResourceProblem(
                    alpha_edge=alpha_e[i],
                    data_bits=slots[i].task.data_bits,
                    cycles_per_bit=slots[i].task.cycles_per_bit,
                    deadline=slots[i].task.max_delay,
                    rate=slots[i].rate,
                )
                for i in live
            ]
            try:
                result = ipm_solve_f(problems, budget, scenario.econ, config)
            except InfeasibleBudgetError:
                floors = minimum_resources(problems, scenario.econ)
                victim = int(max(range(len(live)), key=lambda j: floors[j]))
                shed = live.pop(victim)
                alpha_e[shed] = 0.0
                grants[shed] = 0.0
                if not live:
                    break
                continue
            for j, i in enumerate(live):
                grants[i] = float(result.resources[j])
            break
    return grants


def run_pipeline(
    scenario: Scenario,
    config: Optional[SolverConfig] = None,
    init: Optional[Dict[int, OffloadDecision]] = None,
    *,
    allow_cloud: bool = True,
    allow_edge: bool = True,
    use_cloud_during_move: Optional[bool] = None,
    move: bool = True,
    assignment: Optional[Dict[int, int]] = None,
) -> ScheduleResult:
    """Shared alternating-optimization pipeline.

    ``allow_cloud=False`` pins every cloud share to zero (and skips the
    genetic pass); ``allow_edge=False`` pins edge shares and grants to
    zero (and skips the grant/edge-share inner loop).  The full method
    leaves both on.  ``move``/``assignment`` pass through to scenario
    preparation so restricted variants can skip the drive or force a
    different vehicle-to-server map.
    """
    config = config or SolverConfig()
    if use_cloud_during_move is None:
        use_cloud_during_move = allow_cloud
    slots, fixed, rates, _ = _prepare(scenario, use_cloud_during_move, move, assignment)

    alpha_e = [1.0 / 3.0 if allow_edge else 0.0] * len(slots)
    alpha_c = [1.0 / 3.0 if allow_cloud else 0.0] * len(slots)
    counts: Dict[object, int] = {}
    for slot in slots:
        counts[slot.group] = counts.get(slot.group, 0) + 1
    grants = [
        _group_budget(scenario, slot.group) / counts[slot.group] if allow_edge else 0.0
        for slot in slots
    ]
    if init is not None:
        by_vid = {slot.vehicle.vid: i for i, slot in enumerate(slots)}
        for vid, dec in init.items():
            i = by_vid.get(vid)
            if i is None:
                continue
            alpha_e[i] = dec.alpha_edge if allow_edge else 0.0
            alpha_c[i] = dec.alpha_cloud if allow_cloud else 0.0
            grants[i] = dec.resource if allow_edge else 0.0

    trace: List[TraceRecord] = []
    best_value = -float("inf")
    best_decisions: Dict[int, OffloadDecision] = {}
    best_report: Optional[UtilityReport] = None

    def score(outer: int, mid: int, phase: str) -> float:
        nonlocal best_value, best_decisions, best_report
        decisions = _build_decisions(slots, alpha_e, alpha_c, grants, fixed, scenario)
        report = system_utility(decisions, scenario, rates=rates)
        residual = check_constraints(decisions, scenario, rates=rates).max_residual
        trace.append(
            TraceRecord(
                outer, mid, phase, report.total, residual, len(report.infeasible)
            )
        )
        if report.total > best_value:
            best_value = report.total
            best_decisions = decisions
            best_report = report
        return report.total

    prev_outer = score(0, 0, "init")

    for s in range(1, config.max_outer_iters + 1):
        if allow_cloud and slots:
            problems = []
            for i, slot in enumerate(slots):
                bound = cs_upper_bound(
                    alpha_e[i],
                    grants[i],
                    slot.task,
                    slot.vehicle.local_compute,
                    slot.rate if slot.rate > 0.0 else 1.0,
                    scenario.radio,
                    scenario.econ,
                )
                problems.append(
                    AlphaProblem(
                        omega=bound.omega,
                        delta=bound.delta,
                        fixed_share=alpha_e[i],
                        cycles=slot.task.cycles,
                        deadline=slot.task.max_delay,
                    )
                )
            for i, res in enumerate(ga_solve_alpha_c(problems, scenario.econ, config, stage=s)):
                alpha_c[i] = res.alpha
        current = score(s, 0, "cloud-share")

        if allow_edge and slots:
            prev_mid: Optional[float] = None
            for z in range(1, config.max_mid_iters + 1):
                grants = _solve_grants(slots, alpha_e, alpha_c, scenario, config)

                kkt_rows: List[int] = []
                kkt_problems: List[AlphaProblem] = []
                for i, slot in enumerate(slots):
                    if grants[i] <= 0.0 or slot.rate <= 0.0:
                        alpha_e[i] = 0.0
                        continue
                    bound = es_upper_bound(
                        alpha_c[i],
                        grants[i],
                        slot.task,
                        slot.vehicle.local_compute,
                        slot.rate,
                        scenario.radio,
                        scenario.econ,
                    )
                    kkt_rows.append(i)
                    kkt_problems.append(
                        AlphaProblem(
                            omega=bound.omega,
                            delta=bound.delta,
                            fixed_share=alpha_c[i],
                            cycles=slot.task.cycles,
                            deadline=slot.task.max_delay,
                        )
                    )
                for i, res in zip(kkt_rows, kkt_solve_alpha_e(kkt_problems, scenario.econ)):
                    alpha_e[i] = res.alpha

                current = score(s, z, "resources")
                if prev_mid is not None and abs(current - prev_mid) < config.outer_tolerance:
                    break
                prev_mid = current

        if abs(current - prev_outer) < config.outer_tolerance:
            break
        prev_outer = current

    assert best_report is not None
    return ScheduleResult(best_decisions, best_report, trace)


def run_mscet(
    scenario: Scenario,
    config: Optional[SolverConfig] = None,
    init: Optional[Dict[int, OffloadDecision]] = None,
) -> ScheduleResult:
    """The full multi-scenario schedule: selection, in-transit work, and
    the three-level alternating optimization, scored by true delay."""
    return run_pipeline(scenario, config, init, allow_cloud=True, allow_edge=True)
