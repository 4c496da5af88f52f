"""Scenario generation and JSON round-tripping."""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict, field, fields, replace
from typing import Optional

import numpy as np

from .types import (
    EconParams,
    KMH_TO_MS,
    MB_BITS,
    RadioParams,
    ResourcePool,
    Rsu,
    Scenario,
    TaskSpec,
    Vehicle,
)


@dataclass(frozen=True)
class GenConfig:
    """Knobs for random scenario generation.

    Defaults describe the reference setup: a 250 m road served by five
    0.5 GHz roadside servers, 40 km/h traffic, 10-15 MB tasks with 4-6 s
    deadlines and 12.5 MHz of on-board compute, which makes local-only
    processing hopeless and forces offloading.
    """

    n_vehicles: int = 10
    region: str = "general"  # general | overlapping
    road_length: float = 250.0
    n_rsus: int = 5
    rsu_radius: float = 20.0
    es_capacity: float = 5e8
    speed_kmh: float = 40.0
    local_compute: float = 1.25e7
    tx_power: float = 0.2
    data_bits_range: tuple = (10 * MB_BITS, 15 * MB_BITS)
    cycles_per_bit_range: tuple = (2.0, 4.0)
    max_delay_range: tuple = (4.0, 6.0)
    placement: str = "uniform"  # uniform | clustered | even
    cluster_center: float = 60.0
    cluster_width: float = 70.0
    pooled: bool = True
    radio: RadioParams = field(default_factory=RadioParams)
    econ: EconParams = field(default_factory=EconParams)

    def __post_init__(self):
        if self.n_vehicles < 1:
            raise ValueError("need at least one vehicle")
        if self.region not in ("general", "overlapping"):
            raise ValueError("region must be general or overlapping")
        if self.placement not in ("uniform", "clustered", "even"):
            raise ValueError("placement must be uniform, clustered, or even")
        if self.n_rsus < 1 or self.road_length <= 0:
            raise ValueError("bad road geometry")
        lo, hi = self.data_bits_range
        if not (0 < lo <= hi):
            raise ValueError("bad data_bits_range")


def _rsu_positions(cfg: GenConfig) -> np.ndarray:
    # even spacing with half-gap margins: 5 over 250 m lands at 25..225
    gap = cfg.road_length / cfg.n_rsus
    return gap / 2 + gap * np.arange(cfg.n_rsus)


def _vehicle_positions(cfg: GenConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.placement == "even":
        # Deterministic stratified spacing: one vehicle at the centre of each
        # equal slice of the road, so no access point's neighbourhood ever
        # holds more vehicles than it has assignment slots.
        step = cfg.road_length / cfg.n_vehicles
        return step * (np.arange(cfg.n_vehicles) + 0.5)
    if cfg.placement == "clustered":
        lo = max(0.0, cfg.cluster_center - cfg.cluster_width / 2)
        hi = min(cfg.road_length, cfg.cluster_center + cfg.cluster_width / 2)
    else:
        lo, hi = 0.0, cfg.road_length
    return rng.uniform(lo, hi, size=cfg.n_vehicles)


def generate_scenario(cfg: GenConfig, seed: int) -> Scenario:
    """Draw a random scenario. The same (cfg, seed) always yields the same
    scenario, bit for bit."""
    rng = np.random.default_rng(seed)
    xs = np.sort(_vehicle_positions(cfg, rng))
    data = rng.uniform(*cfg.data_bits_range, size=cfg.n_vehicles)
    work = rng.uniform(*cfg.cycles_per_bit_range, size=cfg.n_vehicles)
    deadline = rng.uniform(*cfg.max_delay_range, size=cfg.n_vehicles)

    pool_region = cfg.region == "overlapping"
    if pool_region:
        # members co-cover the road so every vehicle can reach the pool
        radius = max(cfg.rsu_radius, cfg.road_length)
    else:
        radius = cfg.rsu_radius

    rsus = tuple(
        Rsu(rid=j, position=float(p), radius=float(radius), capacity=cfg.es_capacity)
        for j, p in enumerate(_rsu_positions(cfg))
    )
    vehicles = tuple(
        Vehicle(
            vid=i,
            position=float(xs[i]),
            speed=cfg.speed_kmh * KMH_TO_MS,
            local_compute=cfg.local_compute,
            tx_power=cfg.tx_power,
            in_pool_region=pool_region,
            task=TaskSpec(
                data_bits=float(data[i]),
                cycles_per_bit=float(work[i]),
                max_delay=float(deadline[i]),
            ),
        )
        for i in range(cfg.n_vehicles)
    )
    pool = None
    if pool_region:
        pool = ResourcePool(member_ids=tuple(r.rid for r in rsus), pooled=cfg.pooled)
    return Scenario(
        road_length=cfg.road_length,
        vehicles=vehicles,
        rsus=rsus,
        radio=cfg.radio,
        econ=cfg.econ,
        pool=pool,
        seed=int(seed),
    )


# ---------------------------------------------------------------- JSON I/O

def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "road_length": sc.road_length,
        "seed": sc.seed,
        "radio": asdict(sc.radio),
        "econ": asdict(sc.econ),
        "pool": None
        if sc.pool is None
        else {"member_ids": list(sc.pool.member_ids), "pooled": sc.pool.pooled},
        "rsus": [asdict(r) for r in sc.rsus],
        "vehicles": [
            {
                "vid": v.vid,
                "position": v.position,
                "speed": v.speed,
                "local_compute": v.local_compute,
                "tx_power": v.tx_power,
                "in_pool_region": v.in_pool_region,
                "task": asdict(v.task),
            }
            for v in sc.vehicles
        ],
    }


def scenario_from_dict(d: dict) -> Scenario:
    pool = None
    if d.get("pool") is not None:
        pool = ResourcePool(
            member_ids=tuple(d["pool"]["member_ids"]),
            pooled=bool(d["pool"].get("pooled", True)),
        )
    return Scenario(
        road_length=d["road_length"],
        vehicles=tuple(
            Vehicle(
                vid=v["vid"],
                position=v["position"],
                speed=v["speed"],
                local_compute=v["local_compute"],
                tx_power=v["tx_power"],
                in_pool_region=v["in_pool_region"],
                task=TaskSpec(**v["task"]),
            )
            for v in d["vehicles"]
        ),
        rsus=tuple(Rsu(**r) for r in d["rsus"]),
        radio=RadioParams(**d["radio"]),
        econ=EconParams(**d["econ"]),
        pool=pool,
        seed=int(d.get("seed", 0)),
    )


def scenario_to_json(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True)


def scenario_from_json(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))


def genconfig_from_dict(d: dict) -> GenConfig:
    """Build a GenConfig from a plain dict, tolerating nested param dicts."""
    d = dict(d)
    if "radio" in d and isinstance(d["radio"], dict):
        d["radio"] = RadioParams(**d["radio"])
    if "econ" in d and isinstance(d["econ"], dict):
        d["econ"] = EconParams(**d["econ"])
    for key in ("data_bits_range", "cycles_per_bit_range", "max_delay_range"):
        if key in d:
            d[key] = tuple(d[key])
    known = {f.name for f in fields(GenConfig)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown scenario config fields: {sorted(unknown)}")
    return GenConfig(**d)


def with_overrides(cfg: GenConfig, **kw) -> GenConfig:
    return replace(cfg, **kw)
