"""Experiment driver: the four desk-scale studies and a single-run report.

Each command generates seed-averaged scenarios, runs the requested
schedules, and renders a CSV whose rows are reproducible byte for byte
from (config, seed) — parallel workers only spread the load, never the
row order.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .baselines import (
    run_cloud_terminal,
    run_edge_terminal,
    run_nearby,
    run_sgrr,
)
from .scenario import (
    GenConfig,
    generate_scenario,
    genconfig_from_dict,
    scenario_to_dict,
)
from .schedule import default_init, frozen_rates, run_mscet
from .solvers import SolverConfig, solver_config_from_dict
from .types import ResourcePool, Rsu, Scenario
from .utility import check_constraints

__all__ = [
    "HarnessConfig",
    "load_config",
    "cmd_convergence",
    "cmd_radius_sweep",
    "cmd_vehicle_sweep",
    "cmd_pool_compare",
    "cmd_simulate",
]

_FMT = "%.10g"


@dataclass(frozen=True)
class HarnessConfig:
    """Everything an experiment run depends on."""

    gen: GenConfig = field(default_factory=GenConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    seeds_per_point: int = 10
    workers: int = 1
    convergence_inits: int = 3
    radius_grid: Tuple[float, ...] = (20.0, 40.0, 60.0, 80.0, 100.0, 120.0)
    radius_n_vehicles: int = 12
    vehicle_grid: Tuple[int, ...] = (4, 8, 12, 16, 20)
    limited_capacity: float = 1e8

    def __post_init__(self):
        if self.seeds_per_point < 1:
            raise ValueError("seeds_per_point must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.convergence_inits < 2:
            raise ValueError("convergence needs at least 2 initial points")

    def seeds(self) -> List[int]:
        return [self.seed + k for k in range(self.seeds_per_point)]


def load_config(
    raw: Optional[dict] = None,
    *,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    seeds_per_point: Optional[int] = None,
) -> HarnessConfig:
    """Build a HarnessConfig from a parsed config document plus CLI
    overrides.  Unknown keys are rejected so typos fail loudly."""
    raw = dict(raw or {})
    gen = genconfig_from_dict(raw.pop("scenario", {}))
    solver = solver_config_from_dict(raw.pop("solver", {}))
    experiment = dict(raw.pop("experiment", {}))
    if raw:
        raise ValueError(f"unknown config sections: {sorted(raw)}")
    known = {
        "seed",
        "seeds_per_point",
        "workers",
        "convergence_inits",
        "radius_grid",
        "radius_n_vehicles",
        "vehicle_grid",
        "limited_capacity",
    }
    unknown = set(experiment) - known
    if unknown:
        raise ValueError(f"unknown experiment fields: {sorted(unknown)}")
    for key in ("radius_grid", "vehicle_grid"):
        if key in experiment:
            experiment[key] = tuple(experiment[key])
    cfg = HarnessConfig(gen=gen, solver=solver, **experiment)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if workers is not None:
        overrides["workers"] = workers
    if seeds_per_point is not None:
        overrides["seeds_per_point"] = seeds_per_point
    return replace(cfg, **overrides) if overrides else cfg


# ------------------------------------------------------------------ running

_SCHEDULES: Dict[str, Callable] = {
    "mscet": lambda scn, solver: run_mscet(scn, solver).report,
    "sgrr": lambda scn, solver: run_sgrr(scn, solver).report,
    "nearby": lambda scn, solver: run_nearby(scn, solver).report,
    "cloud-terminal": lambda scn, solver: run_cloud_terminal(scn, solver).report,
    "edge-terminal": lambda scn, solver: run_edge_terminal(scn, solver).report,
}


def _apply_pool_variant(scenario: Scenario, variant: str, limited: float) -> Scenario:
    """Scale member-server capacities for the pool study."""
    n_limited = {"rich": 0, "one-limited": 1, "three-limited": 3}[variant]
    rsus = tuple(
        replace(r, capacity=limited) if j < n_limited else r
        for j, r in enumerate(scenario.rsus)
    )
    return replace(scenario, rsus=rsus)


def _run_point(task: tuple) -> Tuple[float, int]:
    """One (scenario, schedule) execution — shaped for worker pools."""
    (gen, solver, seed, schedule, variant, limited, pooled) = task
    scenario = generate_scenario(gen, seed)
    if variant is not None:
        scenario = _apply_pool_variant(scenario, variant, limited)
    if pooled is not None and scenario.pool is not None:
        scenario = replace(
            scenario,
            pool=ResourcePool(scenario.pool.member_ids, pooled=pooled),
        )
    report = _SCHEDULES[schedule](scenario, solver)
    return float(report.total), len(report.infeasible)


def _run_all(tasks: Sequence[tuple], workers: int) -> List[Tuple[float, int]]:
    if workers <= 1 or len(tasks) <= 1:
        return [_run_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, tasks))


def _aggregate(
    results: Sequence[Tuple[float, int]],
) -> Tuple[float, float, float]:
    totals = np.array([r[0] for r in results], dtype=float)
    infeasible = np.array([r[1] for r in results], dtype=float)
    return (
        float(totals.mean()),
        float(totals.std()),
        float(infeasible.mean()),
    )


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    def cell(v) -> str:
        if isinstance(v, float):
            return _FMT % v
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- experiments

def cmd_convergence(config: HarnessConfig) -> str:
    """Utility per outer iteration for several distinct starting points,
    all on the same scenario."""
    scenario = generate_scenario(config.gen, config.seed)
    rng = np.random.default_rng(config.seed)
    share_pairs = [(1.0 / 3.0, 1.0 / 3.0)]
    while len(share_pairs) < config.convergence_inits:
        draw = rng.uniform(0.05, 0.48, size=2)
        share_pairs.append((float(draw[0]), float(draw[1])))

    rows = []
    for init_id, shares in enumerate(share_pairs):
        init = default_init(scenario, shares=shares)
        result = run_mscet(scenario, config.solver, init=init)
        last_by_outer: Dict[int, tuple] = {}
        for rec in result.trace:
            if rec.outer >= 1:
                last_by_outer[rec.outer] = rec
        for outer in sorted(last_by_outer):
            rec = last_by_outer[outer]
            rows.append(
                (init_id, outer, rec.utility, rec.infeasible, rec.max_residual)
            )
    return _csv(
        ["init_id", "iteration", "utility", "infeasible", "max_residual"], rows
    )


def _sweep(
    config: HarnessConfig,
    points: Sequence,
    schedules: Sequence[str],
    gen_for_point: Callable[[object], GenConfig],
    label: str,
    variants: Optional[Sequence[Tuple[str, bool]]] = None,
) -> str:
    """Shared sweep driver: cartesian (point × schedule × seed) runs,
    aggregated to mean/std rows in deterministic order."""
    tasks = []
    keys = []
    variant_list = variants if variants is not None else [(None, None)]
    for point in points:
        gen = gen_for_point(point)
        for variant, pooled in variant_list:
            for schedule in schedules:
                for seed in config.seeds():
                    tasks.append(
                        (
                            gen,
                            config.solver,
                            seed,
                            schedule,
                            variant,
                            config.limited_capacity,
                            pooled,
                        )
                    )
                keys.append((point, variant, pooled, schedule))

    results = _run_all(tasks, config.workers)
    rows = []
    per = config.seeds_per_point
    for idx, (point, variant, pooled, schedule) in enumerate(keys):
        chunk = results[idx * per : (idx + 1) * per]
        mean, std, infeasible = _aggregate(chunk)
        if variants is None:
            rows.append((point, schedule, mean, std, infeasible))
        else:
            rows.append(
                (variant, "yes" if pooled else "no", point, mean, std, infeasible)
            )
    if variants is None:
        header = [label, "schedule", "utility_mean", "utility_std", "infeasible_mean"]
    else:
        header = [
            "variant",
            "pooled",
            label,
            "utility_mean",
            "utility_std",
            "infeasible_mean",
        ]
    return _csv(header, rows)


def cmd_radius_sweep(config: HarnessConfig) -> str:
    """Utility of the selection-sensitive schedules as coverage grows.
    The same seeds recur at every radius so differences are purely
    radius-driven."""
    return _sweep(
        config,
        points=list(config.radius_grid),
        schedules=("mscet", "sgrr", "nearby"),
        gen_for_point=lambda r: replace(
            config.gen, rsu_radius=float(r), n_vehicles=config.radius_n_vehicles
        ),
        label="radius",
    )


def cmd_vehicle_sweep(config: HarnessConfig) -> str:
    """Utility of the three offloading modes as the vehicle count grows."""
    return _sweep(
        config,
        points=[int(n) for n in config.vehicle_grid],
        schedules=("mscet", "cloud-terminal", "edge-terminal"),
        gen_for_point=lambda n: replace(config.gen, n_vehicles=int(n)),
        label="n_vehicles",
    )


def cmd_pool_compare(config: HarnessConfig) -> str:
    """Pooled vs per-server budgets across three capacity mixes in the
    shared region, at the configured population size."""
    variants = [
        ("rich", True),
        ("rich", False),
        ("one-limited", True),
        ("one-limited", False),
        ("three-limited", True),
        ("three-limited", False),
    ]
    return _sweep(
        config,
        points=[int(config.gen.n_vehicles)],
        schedules=("mscet",),
        gen_for_point=lambda n: replace(
            config.gen, n_vehicles=int(n), region="overlapping"
        ),
        label="n_vehicles",
        variants=variants,
    )


def cmd_simulate(config: HarnessConfig) -> str:
    """One full schedule, reported as JSON: scenario, decisions, trace,
    and the constraint check."""
    scenario = generate_scenario(config.gen, config.seed)
    result = run_mscet(scenario, config.solver)
    rates = frozen_rates(scenario)
    constraints = check_constraints(result.decisions, scenario, rates=rates)
    doc = {
        "scenario": scenario_to_dict(scenario),
        "solver": config.solver.to_dict(),
        "utility": {
            "total": result.report.total,
            "per_vehicle": {str(k): v for k, v in result.report.per_vehicle.items()},
            "infeasible": list(result.report.infeasible),
        },
        "decisions": {
            str(vid): {
                "alpha_edge": d.alpha_edge,
                "alpha_cloud": d.alpha_cloud,
                "resource": d.resource,
                "rsu_id": d.rsu_id,
                "feasible": d.feasible,
                "move_time": d.move_time,
                "pre_cloud": d.pre_cloud,
                "pre_local": d.pre_local,
                "residual": d.residual,
            }
            for vid, d in sorted(result.decisions.items())
        },
        "trace": [rec._asdict() for rec in result.trace],
        "constraints": {
            "ok": constraints.ok,
            "max_residual": constraints.max_residual,
            "worst": constraints.worst,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
