"""Subproblem solvers for the alternating schedule optimization.

Three blocks are optimized in rotation, each with the other two held
fixed: the cloud share of every vehicle (genetic search, with an exact
bisection cross-check), the per-vehicle edge compute grants under a
shared budget (inverse-barrier interior-point solve), and the edge
share (closed-form candidate enumeration from the stationarity
conditions).  Share subproblems are separable per vehicle and use a
linear surrogate bound for the deadline, so each is a concave scalar
maximization on an interval.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ._kernels import barrier_newton, evolve_scalar_ga
from .types import EconParams, InfeasibleBudgetError

__all__ = [
    "SolverConfig",
    "solver_config_from_dict",
    "AlphaProblem",
    "AlphaResult",
    "ResourceProblem",
    "IpmResult",
    "KktResult",
    "feasible_interval",
    "share_objective",
    "ga_solve_alpha_c",
    "bisection_solve_alpha_c",
    "minimum_resources",
    "ipm_solve_f",
    "resource_objective",
    "kkt_solve_alpha_e",
]

_LN2 = math.log(2.0)
_QOS_FLOOR = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the three solvers and the surrounding loop caps."""

    ga_population: int = 64
    ga_generations: int = 100
    ga_crossover_rate: float = 0.9
    ga_mutation_rate: float = 0.1
    ga_tournament: int = 3
    ga_mutation_sigma: float = 0.05
    ga_elites: int = 2
    penalty_r0: float = 1.0
    penalty_decay: float = 0.1
    ipm_tolerance: float = 1e-4  # fraction of the budget scale
    outer_tolerance: float = 1e-3  # utility scale
    max_outer_iters: int = 10
    max_mid_iters: int = 20
    max_inner_iters: int = 30
    seed: int = 0

    def __post_init__(self):
        counts = (
            ("ga_population", self.ga_population),
            ("ga_generations", self.ga_generations),
            ("ga_tournament", self.ga_tournament),
            ("ga_elites", self.ga_elites),
            ("max_outer_iters", self.max_outer_iters),
            ("max_mid_iters", self.max_mid_iters),
            ("max_inner_iters", self.max_inner_iters),
        )
        for name, val in counts:
            if int(val) != val or val < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name, val in (
            ("ga_crossover_rate", self.ga_crossover_rate),
            ("ga_mutation_rate", self.ga_mutation_rate),
        ):
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name, val in (
            ("ga_mutation_sigma", self.ga_mutation_sigma),
            ("penalty_r0", self.penalty_r0),
            ("ipm_tolerance", self.ipm_tolerance),
            ("outer_tolerance", self.outer_tolerance),
        ):
            if val <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.penalty_decay < 1.0:
            raise ValueError("penalty_decay must lie in (0, 1)")

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def solver_config_from_dict(data: Dict[str, object]) -> SolverConfig:
    """Build a SolverConfig from a JSON-style mapping, rejecting unknown keys."""
    known = {f for f in SolverConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown solver config keys: {sorted(unknown)}")
    return SolverConfig(**data)  # type: ignore[arg-type]


class AlphaProblem(NamedTuple):
    """One vehicle's scalar share subproblem against a linear delay bound.

    The optimized share ``x`` must keep ``omega * x + delta`` within the
    deadline and the total split within the unit box, where
    ``fixed_share`` is the complementary share currently held fixed.
    ``cycles`` sizes the revenue earned per unit share.
    """

    omega: float
    delta: float
    fixed_share: float
    cycles: float
    deadline: float


class AlphaResult(NamedTuple):
    """Solved share; ``infeasible`` marks an empty feasible interval."""

    alpha: float
    objective: float
    infeasible: bool


class ResourceProblem(NamedTuple):
    """One vehicle's stake in the shared compute budget.

    ``alpha_edge`` and the task figures define the upload time and the
    cycle count the grant must absorb before ``deadline``.
    """

    alpha_edge: float
    data_bits: float
    cycles_per_bit: float
    deadline: float
    rate: float


class IpmResult(NamedTuple):
    resources: np.ndarray
    converged: bool
    stages: int


class KktResult(NamedTuple):
    """Closed-form share choice with its diagnostic multiplier sign."""

    alpha: float
    objective: float
    infeasible: bool
    case: str
    zeta: Optional[float]


def feasible_interval(
    omega: float, delta: float, deadline: float, hi_box: float
) -> Optional[Tuple[float, float]]:
    """Share interval where the linear bound stays within the deadline.

    Intersects ``omega * x + delta <= deadline`` with ``0 <= x <= hi_box``;
    returns ``None`` when the intersection is empty.
    """
    if hi_box < 0.0:
        return None
    if omega > 0.0:
        hi = min(hi_box, (deadline - delta) / omega)
        return (0.0, hi) if hi >= 0.0 else None
    if omega < 0.0:
        lo = max(0.0, (deadline - delta) / omega)
        return (lo, hi_box) if lo <= hi_box else None
    return (0.0, hi_box) if delta <= deadline else None


def share_objective(problem: AlphaProblem, econ: EconParams, alpha: float) -> float:
    """Share-dependent utility terms: offload revenue plus delay reward.

    Terms constant in the optimized share (the fixed share's revenue and
    the resource bill) are omitted, so solver and grid oracle compare
    exactly the quantity being optimized.
    """
    revenue = econ.beta_profit * econ.revenue_per_cycle * problem.cycles * alpha
    arg = 1.0 + econ.qos_window - (problem.omega * alpha + problem.delta)
    return revenue + econ.beta_qos * math.log2(max(arg, _QOS_FLOOR))


def _stage_seed(config: SolverConfig, stage: int) -> int:
    return int(
        np.random.SeedSequence([config.seed, stage]).generate_state(1, np.uint64)[0]
    )


def ga_solve_alpha_c(
    problems: Sequence[AlphaProblem],
    econ: EconParams,
    config: SolverConfig,
    stage: int = 0,
) -> List[AlphaResult]:
    """Genetic search for each vehicle's cloud share.

    Every vehicle's subproblem is a concave scalar maximization on its
    feasible interval, so the whole batch evolves in one seeded run.
    Vehicles whose interval is empty (the bound exceeds the deadline at
    every admissible share) come back flagged with a zero share, which
    lets the surrounding loop keep going instead of aborting.
    """
    results: List[Optional[AlphaResult]] = [None] * len(problems)
    rows: List[int] = []
    los: List[float] = []
    his: List[float] = []
    lins: List[float] = []
    bases: List[float] = []
    slopes: List[float] = []

    for i, prob in enumerate(problems):
        interval = feasible_interval(
            prob.omega, prob.delta, prob.deadline, 1.0 - prob.fixed_share
        )
        if interval is None:
            results[i] = AlphaResult(0.0, share_objective(prob, econ, 0.0), True)
            continue
        lo, hi = interval
        if hi - lo <= 0.0:
            results[i] = AlphaResult(lo, share_objective(prob, econ, lo), False)
            continue
        rows.append(i)
        los.append(lo)
        his.append(hi)
        lins.append(econ.beta_profit * econ.revenue_per_cycle * prob.cycles)
        bases.append(1.0 + econ.qos_window - prob.delta)
        slopes.append(prob.omega)

    if rows:
        n = len(rows)
        best_x, best_val = evolve_scalar_ga(
            np.array(los),
            np.array(his),
            np.array(lins),
            np.full(n, econ.beta_qos),
            np.array(bases),
            np.array(slopes),
            np.zeros(n),
            population=config.ga_population,
            generations=config.ga_generations,
            tournament=config.ga_tournament,
            crossover_rate=config.ga_crossover_rate,
            mutation_rate=config.ga_mutation_rate,
            mutation_sigma=config.ga_mutation_sigma,
            elites=config.ga_elites,
            seed=_stage_seed(config, stage),
        )
        for j, i in enumerate(rows):
            results[i] = AlphaResult(float(best_x[j]), float(best_val[j]), False)

    return [r for r in results if r is not None]


def bisection_solve_alpha_c(
    problems: Sequence[AlphaProblem],
    econ: EconParams,
    tol: float = 1e-12,
) -> List[AlphaResult]:
    """Exact counterpart of the genetic share search.

    Exploits concavity directly: the derivative is strictly decreasing,
    so the maximizer is a face of the interval or the derivative's root,
    found by sign bisection to machine precision.
    """
    out: List[AlphaResult] = []
    for prob in problems:
        interval = feasible_interval(
            prob.omega, prob.delta, prob.deadline, 1.0 - prob.fixed_share
        )
        if interval is None:
            out.append(AlphaResult(0.0, share_objective(prob, econ, 0.0), True))
            continue
        lo, hi = interval
        lin = econ.beta_profit * econ.revenue_per_cycle * prob.cycles
        base = 1.0 + econ.qos_window - prob.delta

        def slope_at(x: float) -> float:
            arg = base - prob.omega * x
            return lin - econ.beta_qos * prob.omega / (max(arg, _QOS_FLOOR) * _LN2)

        if hi - lo <= 0.0 or slope_at(lo) <= 0.0:
            x = lo
        elif slope_at(hi) >= 0.0:
            x = hi
        else:
            a, b = lo, hi
            while b - a > tol * max(1.0, abs(hi)):
                mid = 0.5 * (a + b)
                if slope_at(mid) > 0.0:
                    a = mid
                else:
                    b = mid
            x = 0.5 * (a + b)
        out.append(AlphaResult(x, share_objective(prob, econ, x), False))
    return out


def minimum_resources(
    problems: Sequence[ResourceProblem], econ: EconParams
) -> np.ndarray:
    """Smallest grant meeting each vehicle's deadline (``inf`` if none).

    Vehicles with no edge work need nothing and get 0.
    """
    floors = np.zeros(len(problems))
    for i, p in enumerate(problems):
        volume = p.alpha_edge * p.data_bits
        if volume <= 0.0:
            continue
        if p.rate <= 0.0:
            floors[i] = math.inf
            continue
        slack = p.deadline - volume / p.rate
        floors[i] = volume * p.cycles_per_bit / slack if slack > 0.0 else math.inf
    return floors


def ipm_solve_f(
    problems: Sequence[ResourceProblem],
    budget: float,
    econ: EconParams,
    config: SolverConfig,
) -> IpmResult:
    """Joint compute grants under one shared budget.

    Maximizes the summed grant cost / delay reward tradeoff with an
    inverse-barrier on every deadline slack and on the budget slack,
    decaying the barrier weight until iterates settle.  Vehicles with no
    edge work are granted exactly zero.  Raises ``InfeasibleBudgetError``
    when even the minimum grants cannot fit the budget, so the caller
    can shed load and retry.
    """
    if budget <= 0.0:
        raise InfeasibleBudgetError("resource budget must be positive")
    n = len(problems)
    grants = np.zeros(n)
    if n == 0:
        return IpmResult(grants, True, 0)

    floors = minimum_resources(problems, econ)
    active = [i for i, p in enumerate(problems) if p.alpha_edge * p.data_bits > 0.0]
    if not active:
        return IpmResult(grants, True, 0)

    act_floors = floors[active]
    if not np.isfinite(act_floors).all():
        bad = [active[j] for j in np.nonzero(~np.isfinite(act_floors))[0]]
        raise InfeasibleBudgetError(
            f"vehicles {bad} cannot meet their deadlines at any grant"
        )
    if float(act_floors.sum()) >= budget:
        raise InfeasibleBudgetError(
            f"minimum grants total {act_floors.sum():.6g} against a "
            f"budget of {budget:.6g}"
        )

    comm = np.array(
        [problems[i].alpha_edge * problems[i].data_bits / problems[i].rate for i in active]
    )
    work = np.array(
        [
            problems[i].alpha_edge * problems[i].data_bits * problems[i].cycles_per_bit
            for i in active
        ]
    )
    deadline = np.array([problems[i].deadline for i in active])
    qos_base = 1.0 + econ.qos_window - comm

    f_act, converged, stages = barrier_newton(
        comm,
        work,
        deadline,
        qos_base,
        lin_cost=econ.beta_profit * econ.resource_price,
        qos_weight=econ.beta_qos,
        budget=budget,
        f_floor=act_floors,
        r0=config.penalty_r0,
        decay=config.penalty_decay,
        step_tol=config.ipm_tolerance * budget,
        max_stages=config.max_inner_iters,
    )
    grants[active] = f_act
    return IpmResult(grants, bool(converged), int(stages))


def resource_objective(
    problems: Sequence[ResourceProblem], econ: EconParams, grants: Sequence[float]
) -> float:
    """Grant-dependent utility terms summed over vehicles with edge work."""
    total = 0.0
    for p, f in zip(problems, grants):
        volume = p.alpha_edge * p.data_bits
        if volume <= 0.0:
            continue
        delay = volume / p.rate + volume * p.cycles_per_bit / f
        arg = 1.0 + econ.qos_window - delay
        total += -econ.beta_profit * econ.resource_price * f + econ.beta_qos * math.log2(
            max(arg, _QOS_FLOOR)
        )
    return total


def kkt_solve_alpha_e(
    problems: Sequence[AlphaProblem],
    econ: EconParams,
) -> List[KktResult]:
    """Closed-form edge share from the stationarity system.

    The concave scalar objective is maximized by one of: the interval
    faces (keep-everything-local, or fill the split to the unit box),
    the deadline-active share where the bound meets the deadline, or the
    interior stationary share where marginal revenue balances marginal
    delay reward.  All candidates are enumerated and the best feasible
    one wins, ties toward the smaller share.  ``zeta`` reports the
    multiplier sign test separating the deadline-active regime from the
    interior one.
    """
    out: List[KktResult] = []
    for prob in problems:
        hi_box = 1.0 - prob.fixed_share
        lin = econ.beta_profit * econ.revenue_per_cycle * prob.cycles
        zeta: Optional[float] = None
        if prob.omega != 0.0:
            zeta = econ.beta_qos / (
                (1.0 + econ.qos_window - prob.deadline) * _LN2
            ) - lin / prob.omega

        interval = feasible_interval(prob.omega, prob.delta, prob.deadline, hi_box)
        if interval is None:
            out.append(
                KktResult(
                    0.0, share_objective(prob, econ, 0.0), True, "infeasible", zeta
                )
            )
            continue
        lo, hi = interval

        if prob.omega == 0.0:
            alpha = hi if lin > 0.0 else lo
            out.append(
                KktResult(
                    alpha, share_objective(prob, econ, alpha), False, "degenerate", zeta
                )
            )
            continue

        candidates = [lo, hi]
        if prob.omega > 0.0 and lin > 0.0:
            base = 1.0 + econ.qos_window - prob.delta
            stationary = (base - econ.beta_qos * prob.omega / (lin * _LN2)) / prob.omega
            if lo < stationary < hi:
                candidates.append(stationary)

        best_alpha = lo
        best_val = -math.inf
        for cand in sorted(set(candidates)):
            val = share_objective(prob, econ, cand)
            if val > best_val:
                best_val = val
                best_alpha = cand

        root = (prob.deadline - prob.delta) / prob.omega if prob.omega != 0.0 else None
        if best_alpha == 0.0:
            case = "full-cloud-local" if prob.fixed_share >= 1.0 else "all-local"
        elif best_alpha == hi_box:
            case = "fill-split"
        elif root is not None and abs(best_alpha - root) <= 1e-15 * max(1.0, abs(root)):
            case = "deadline-active"
        else:
            case = "interior"
        out.append(KktResult(best_alpha, best_val, False, case, zeta))
    return out
