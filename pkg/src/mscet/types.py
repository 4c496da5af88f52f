"""Core domain types for the cloud-edge-terminal offloading model.

Positions are meters along a straight road segment, speeds m/s, data sizes
bits, compute capacities cycles/s, delays seconds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

MB_BITS = 8e6  # 1 MB = 8e6 bits
KMH_TO_MS = 1.0 / 3.6


class MscetError(Exception):
    """Base class for model and solver errors."""


class QosDomainError(MscetError):
    """QoS term undefined: delay exceeds the satisfaction window."""


class InvalidRateError(MscetError):
    """Upload rate is zero or negative for a link that carries traffic."""


class ZeroAllocationError(MscetError):
    """Edge work assigned but no server resource allocated."""


class TaskExpiredError(MscetError):
    """Movement alone consumes the whole delay budget."""


class InfeasibleSubproblemError(MscetError):
    """A per-vehicle subproblem has an empty feasible set."""


class InfeasibleBudgetError(MscetError):
    """Minimum per-vehicle resource needs exceed the shared budget."""


class InfeasibleMatchingError(MscetError):
    """More vehicles than server attachment slots."""


@dataclass(frozen=True)
class TaskSpec:
    """One computation task: size, per-bit work, and deadline."""

    data_bits: float
    cycles_per_bit: float
    max_delay: float

    def __post_init__(self):
        if self.data_bits < 0:
            raise ValueError("data_bits must be >= 0")
        if self.cycles_per_bit <= 0:
            raise ValueError("cycles_per_bit must be > 0")
        if self.max_delay <= 0:
            raise ValueError("max_delay must be > 0")

    @property
    def cycles(self) -> float:
        return self.data_bits * self.cycles_per_bit


@dataclass(frozen=True)
class Vehicle:
    """A vehicle terminal with one task per scheduling slot."""

    vid: int
    position: float
    speed: float
    local_compute: float  # cycles/s available on board
    tx_power: float  # W
    in_pool_region: bool
    task: TaskSpec

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("speed must be > 0")
        if self.local_compute <= 0:
            raise ValueError("local_compute must be > 0")
        if self.tx_power <= 0:
            raise ValueError("tx_power must be > 0")


@dataclass(frozen=True)
class Rsu:
    """Roadside unit with an attached edge server."""

    rid: int
    position: float
    radius: float
    capacity: float  # edge server cycles/s

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if self.capacity <= 0:
            raise ValueError("capacity must be > 0")

    def covers(self, position: float) -> bool:
        return abs(position - self.position) <= self.radius


@dataclass(frozen=True)
class ResourcePool:
    """Aggregated edge capacity shared by vehicles in the overlap region.

    When ``pooled`` is False the member servers keep their individual
    budgets and each vehicle draws only from its nearest member.
    """

    member_ids: tuple
    pooled: bool = True

    def capacity(self, rsus) -> float:
        by_id = {r.rid: r for r in rsus}
        return float(sum(by_id[m].capacity for m in self.member_ids))


@dataclass(frozen=True)
class RadioParams:
    """Uplink radio model parameters."""

    bandwidth: float = 1e8  # Hz
    noise_power: float = 1.1e-4  # W
    reference_gain: float = 1.0  # gain at 1 m
    path_loss_exponent: float = 2.0
    cloud_rate: float = 1e8  # fixed vehicle-to-cloud uplink, bits/s
    interference_scope: str = "none"  # none | region | all

    def __post_init__(self):
        if self.bandwidth <= 0 or self.noise_power <= 0:
            raise ValueError("bandwidth and noise_power must be > 0")
        if self.path_loss_exponent < 2.0:
            raise ValueError("path_loss_exponent must be >= 2")
        if self.cloud_rate <= 0:
            raise ValueError("cloud_rate must be > 0")
        if self.interference_scope not in ("none", "region", "all"):
            raise ValueError("interference_scope must be none, region or all")


@dataclass(frozen=True)
class EconParams:
    """Utility weights, prices, and cloud-side service constants."""

    beta_profit: float = 1.0
    beta_qos: float = 0.1
    revenue_per_cycle: float = 5e-8  # paid per offloaded cycle
    resource_price: float = 1e-12  # paid per cycle/s of server resource
    qos_window: float = 16.0  # satisfaction horizon, must cover every deadline
    cloud_compute: float = 1.8e6  # cycles/s the cloud grants each task
    bound_scale: float = 1.0  # >= 1, relaxation divisor on the edge delay bound

    def __post_init__(self):
        if self.beta_profit < 0 or self.beta_qos < 0:
            raise ValueError("utility weights must be >= 0")
        if self.revenue_per_cycle < 0 or self.resource_price < 0:
            raise ValueError("prices must be >= 0")
        if self.cloud_compute <= 0:
            raise ValueError("cloud_compute must be > 0")
        if self.bound_scale < 1.0:
            raise ValueError("bound_scale must be >= 1")


@dataclass(frozen=True)
class Scenario:
    """One scheduling slot: road, vehicles, servers, and model parameters."""

    road_length: float
    vehicles: tuple
    rsus: tuple
    radio: RadioParams = field(default_factory=RadioParams)
    econ: EconParams = field(default_factory=EconParams)
    pool: Optional[ResourcePool] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        object.__setattr__(self, "rsus", tuple(self.rsus))
        self.validate()

    def validate(self):
        vids = [v.vid for v in self.vehicles]
        if len(set(vids)) != len(vids):
            raise ValueError("duplicate vehicle ids")
        rids = [r.rid for r in self.rsus]
        if len(set(rids)) != len(rids):
            raise ValueError("duplicate rsu ids")
        positions = [r.position for r in self.rsus]
        if positions != sorted(positions):
            raise ValueError("rsus must be sorted by position ascending")
        if any(v.in_pool_region for v in self.vehicles) and self.pool is None:
            raise ValueError("vehicles marked for the pool region but no pool defined")
        if self.pool is not None:
            known = {r.rid for r in self.rsus}
            for m in self.pool.member_ids:
                if m not in known:
                    raise ValueError(f"pool member {m} is not an rsu id")
        worst = max((v.task.max_delay for v in self.vehicles), default=0.0)
        if self.econ.qos_window < worst:
            raise ValueError("qos_window must cover the largest task deadline")

    @property
    def general_vehicles(self) -> tuple:
        return tuple(v for v in self.vehicles if not v.in_pool_region)

    @property
    def pool_vehicles(self) -> tuple:
        return tuple(v for v in self.vehicles if v.in_pool_region)

    def rsu_by_id(self, rid: int) -> Rsu:
        for r in self.rsus:
            if r.rid == rid:
                return r
        raise KeyError(f"no rsu with id {rid}")

    def pool_capacity(self) -> float:
        if self.pool is None:
            raise ValueError("scenario has no resource pool")
        return self.pool.capacity(self.rsus)


@dataclass
class OffloadDecision:
    """Per-vehicle offloading decision.

    ``alpha_edge`` and ``alpha_cloud`` split the task bits that remain once
    the vehicle reaches its server (the whole task when it does not move).
    ``rsu_id`` is None for pool-region vehicles and for schedules that never
    touch an edge server; otherwise it names the single attached RSU.

    Movement bookkeeping: ``move_time`` is driving time before uplink
    transmission starts (cut short if the task finishes en route),
    ``pre_cloud`` / ``pre_local`` are the shares of the *original* task bits
    consumed during that drive by the direct cloud link and the onboard
    processor, and ``residual`` is the share still pending on arrival.
    """

    alpha_edge: float = 0.0
    alpha_cloud: float = 0.0
    resource: float = 0.0  # server cycles/s granted to this vehicle
    rsu_id: Optional[int] = None
    feasible: bool = True
    move_time: float = 0.0
    pre_cloud: float = 0.0
    pre_local: float = 0.0
    residual: float = 1.0

    def __post_init__(self):
        if self.alpha_edge < 0 or self.alpha_cloud < 0:
            raise ValueError("offload ratios must be >= 0")
        if self.resource < 0:
            raise ValueError("resource must be >= 0")
        if self.move_time < 0:
            raise ValueError("move_time must be >= 0")
        if self.pre_cloud < 0 or self.pre_local < 0 or self.residual < 0:
            raise ValueError("movement shares must be >= 0")

    @property
    def alpha_local(self) -> float:
        return 1.0 - self.alpha_edge - self.alpha_cloud

    @property
    def total_edge(self) -> float:
        """Edge share of the original task bits."""
        return self.alpha_edge * self.residual

    @property
    def total_cloud(self) -> float:
        """Cloud share of the original task bits, pre-offload included."""
        return self.pre_cloud + self.alpha_cloud * self.residual

    @property
    def total_offloaded(self) -> float:
        return self.total_edge + self.total_cloud
