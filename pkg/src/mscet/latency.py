"""Task completion delay: per-branch terms, their composition, and the
linear upper bounds the per-vehicle solvers optimize against.

The three processing routes run concurrently, so the task finishes when the
slowest active route finishes. Server routes wait for the drive to coverage
(when there is one) and the cloud route additionally waits for the
vehicle-to-server upload to clear the shared uplink before relaying.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .radio import cloud_comm_delay, edge_comm_delay
from .types import (
    EconParams,
    InvalidRateError,
    OffloadDecision,
    RadioParams,
    Rsu,
    Scenario,
    TaskSpec,
    Vehicle,
    ZeroAllocationError,
)

_RATIO_SLACK = 1e-9


def local_delay(
    alpha_edge: float, alpha_cloud: float, task: TaskSpec, local_compute: float
) -> float:
    """Onboard processing time of the share kept at the terminal."""
    share = 1.0 - alpha_edge - alpha_cloud
    if share < -_RATIO_SLACK:
        raise ValueError("offload ratios exceed 1")
    share = max(share, 0.0)
    return share * task.cycles / local_compute


def edge_comp_delay(alpha_edge: float, task: TaskSpec, resource: float) -> float:
    """Server processing time of the edge share under the granted resource."""
    if alpha_edge < 0:
        raise ValueError("alpha_edge must be >= 0")
    work = alpha_edge * task.cycles
    if work == 0.0:
        return 0.0
    if resource <= 0:
        raise ZeroAllocationError("edge work assigned but no server resource granted")
    return work / resource


def cloud_comp_delay(alpha_cloud: float, task: TaskSpec, econ: EconParams) -> float:
    """Cloud processing time of the cloud share."""
    if alpha_cloud < 0:
        raise ValueError("alpha_cloud must be >= 0")
    work = alpha_cloud * task.cycles
    if work == 0.0:
        return 0.0
    return work / econ.cloud_compute


def move_time(vehicle: Vehicle, rsu: Rsu) -> float:
    """Drive time until the vehicle enters the server's coverage."""
    gap = rsu.position - vehicle.position - rsu.radius
    return max(0.0, gap) / vehicle.speed


def processing_delay(
    decision: OffloadDecision,
    vehicle: Vehicle,
    scenario: Scenario,
    rate: Optional[float] = None,
) -> float:
    """Completion time of the whole task under the given decision.

    ``rate`` is the frozen vehicle-to-server uplink rate; it is required
    exactly when the decision sends bits to an edge server. Movement comes
    from the attached RSU's geometry unless the decision carries in-transit
    bookkeeping (then its recorded ``move_time`` is authoritative, since an
    en-route completion ends the drive early).
    """
    task = vehicle.task
    if decision.alpha_edge + decision.alpha_cloud > 1.0 + _RATIO_SLACK:
        raise ValueError("offload ratios exceed 1")

    res = decision.residual
    edge_bits = decision.alpha_edge * res * task.data_bits
    cloud_bits = decision.alpha_cloud * res * task.data_bits

    pre = decision.pre_cloud + decision.pre_local
    if pre > 0.0 or decision.rsu_id is None:
        move = decision.move_time
    else:
        move = move_time(vehicle, scenario.rsu_by_id(decision.rsu_id))

    if edge_bits > 0.0 and decision.rsu_id is None and not vehicle.in_pool_region:
        raise ValueError("edge share assigned but no server selected")

    local_share = max(0.0, 1.0 - decision.alpha_edge - decision.alpha_cloud)
    local_bits = (decision.pre_local + local_share * res) * task.data_bits
    t_local = 0.0
    if local_bits > 0.0:
        t_local = local_bits * task.cycles_per_bit / vehicle.local_compute

    edge_upload = 0.0
    if edge_bits > 0.0:
        if rate is None or rate <= 0.0:
            raise InvalidRateError("edge share assigned but uplink rate is not positive")
        edge_upload = edge_bits / rate

    t_edge = 0.0
    if edge_bits > 0.0:
        work = edge_bits * task.cycles_per_bit
        if decision.resource <= 0.0:
            raise ZeroAllocationError(
                "edge work assigned but no server resource granted"
            )
        t_edge = move + edge_upload + work / decision.resource

    t_cloud = 0.0
    if cloud_bits > 0.0:
        # The cloud share rides the always-available direct uplink, so a
        # pure-cloud decision starts transmitting immediately.  It queues
        # behind the drive and the edge upload only when those actually
        # occupy the radio first (recorded in-transit work, or an edge
        # share sharing the same uplink).
        prefix = move + edge_upload if (edge_bits > 0.0 or pre > 0.0) else 0.0
        t_cloud = (
            prefix
            + cloud_bits / scenario.radio.cloud_rate
            + cloud_bits * task.cycles_per_bit / scenario.econ.cloud_compute
        )

    return max(t_local, t_edge, t_cloud)


class LinearBound(NamedTuple):
    """Delay bound of the form ``omega * alpha + delta``."""

    omega: float
    delta: float

    def value(self, alpha: float) -> float:
        return self.omega * alpha + self.delta


def cs_upper_bound(
    alpha_edge: float,
    resource: float,
    task: TaskSpec,
    local_compute: float,
    rate: float,
    radio: RadioParams,
    econ: EconParams,
) -> LinearBound:
    """Linear-in-``alpha_cloud`` bound that dominates the composed delay
    while the edge share and its compute grant are held fixed.

    Sums all three routes — local time, the edge upload and compute under
    the fixed grant, and both cloud terms — so it is linear in the cloud
    share and conservative for every branch of the true delay.
    """
    if not 0.0 <= alpha_edge <= 1.0:
        raise ValueError("alpha_edge must lie in [0, 1]")
    if rate <= 0.0:
        raise InvalidRateError("cs bound needs a positive uplink rate")
    d = task.data_bits
    unit_local = task.cycles / local_compute
    edge_comp = 0.0
    if alpha_edge > 0.0:
        edge_comp = (
            alpha_edge * task.cycles / resource if resource > 0.0 else math.inf
        )
    omega = d / radio.cloud_rate + task.cycles / econ.cloud_compute - unit_local
    delta = alpha_edge * d / rate + edge_comp + (1.0 - alpha_edge) * unit_local
    return LinearBound(omega, delta)


def es_upper_bound(
    alpha_cloud: float,
    resource: float,
    task: TaskSpec,
    local_compute: float,
    rate: float,
    radio: RadioParams,
    econ: EconParams,
) -> LinearBound:
    """Linear-in-``alpha_edge`` bound that dominates the composed delay
    while the cloud share is held fixed.

    Sums all three routes (the edge upload appears twice because the cloud
    relay waits behind it), then relaxes by the configured divisor.
    """
    if not 0.0 <= alpha_cloud <= 1.0:
        raise ValueError("alpha_cloud must lie in [0, 1]")
    if rate <= 0.0:
        raise InvalidRateError("es bound needs a positive uplink rate")
    if resource <= 0.0:
        raise ZeroAllocationError("es bound needs a positive server grant")
    lam = econ.bound_scale
    d = task.data_bits
    unit_local = task.cycles / local_compute
    omega = (2.0 * d / rate + task.cycles / resource - unit_local) / lam
    delta = (
        alpha_cloud * (d / radio.cloud_rate + task.cycles / econ.cloud_compute)
        + (1.0 - alpha_cloud) * unit_local
    ) / lam
    return LinearBound(omega, delta)
