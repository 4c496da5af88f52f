"""Uplink radio model: path loss, Shannon rates, and communication delays.

Rates are computed once per scheduling slot, after vehicles are attached to
servers, and stay frozen while the optimizer runs. A vehicle that starts
outside its server's coverage transmits from the coverage boundary (it keeps
driving until the link exists), so its rate is evaluated at that effective
position rather than at the slot-start position.
"""
from __future__ import annotations

import math
from typing import Dict, Mapping, Optional

from .types import InvalidRateError, RadioParams, Rsu, Scenario, Vehicle

MIN_PATH_DISTANCE = 1.0  # meters; path loss saturates below this


def channel_gain(distance: float, radio: RadioParams) -> float:
    """Power gain of the vehicle-to-server link at the given distance."""
    d = max(abs(distance), MIN_PATH_DISTANCE)
    return radio.reference_gain * d ** (-radio.path_loss_exponent)


def shannon_rate(
    tx_power: float,
    gain: float,
    radio: RadioParams,
    interference: float = 0.0,
) -> float:
    """Achievable uplink bit rate for one vehicle-to-server link.

    ``interference`` is the summed received power of simultaneously
    transmitting vehicles at the same server.
    """
    if tx_power <= 0 or gain <= 0:
        raise ValueError("tx_power and gain must be > 0")
    if interference < 0:
        raise ValueError("interference must be >= 0")
    sinr = tx_power * gain / (radio.noise_power + interference)
    return radio.bandwidth * math.log2(1.0 + sinr)


def effective_position(vehicle: Vehicle, rsu: Rsu) -> float:
    """Where the vehicle transmits from: its own position once covered,
    else the near edge of the server's coverage."""
    return max(vehicle.position, rsu.position - rsu.radius)


def edge_comm_delay(alpha_edge: float, data_bits: float, rate: float) -> float:
    """Upload time of the edge share over the vehicle-to-server link."""
    if alpha_edge < 0:
        raise ValueError("alpha_edge must be >= 0")
    volume = alpha_edge * data_bits
    if volume == 0.0:
        return 0.0
    if rate <= 0:
        raise InvalidRateError("edge share assigned but uplink rate is not positive")
    return volume / rate


def cloud_comm_delay(alpha_cloud: float, data_bits: float, radio: RadioParams) -> float:
    """Upload time of the cloud share over the constant-rate cloud link."""
    if alpha_cloud < 0:
        raise ValueError("alpha_cloud must be >= 0")
    volume = alpha_cloud * data_bits
    if volume == 0.0:
        return 0.0
    return volume / radio.cloud_rate


def nearest_member(position: float, scenario: Scenario) -> Rsu:
    """Pool member whose antenna is closest to the given position."""
    if scenario.pool is None:
        raise ValueError("scenario has no resource pool")
    members = [scenario.rsu_by_id(m) for m in scenario.pool.member_ids]
    return min(members, key=lambda r: (abs(r.position - position), r.rid))


def _received_power(vehicle: Vehicle, from_pos: float, at: Rsu, radio: RadioParams) -> float:
    return vehicle.tx_power * channel_gain(at.position - from_pos, radio)


def rate_table(
    scenario: Scenario,
    assignment: Mapping[int, Optional[int]],
) -> Dict[int, float]:
    """Frozen uplink rate for every assigned vehicle.

    ``assignment`` maps vehicle id to the attached RSU id (None entries and
    unlisted vehicles get no rate). Interference follows
    ``radio.interference_scope``:

    - ``"none"``: each vehicle is scheduled alone on its channel,
    - ``"region"``: vehicles attached to the same server interfere,
    - ``"all"``: every other assigned vehicle interferes.
    """
    radio = scenario.radio
    by_vid = {v.vid: v for v in scenario.vehicles}
    active = [(vid, rid) for vid, rid in assignment.items() if rid is not None]
    positions = {
        vid: effective_position(by_vid[vid], scenario.rsu_by_id(rid))
        for vid, rid in active
    }
    rates: Dict[int, float] = {}
    for vid, rid in active:
        rsu = scenario.rsu_by_id(rid)
        vehicle = by_vid[vid]
        interference = 0.0
        if radio.interference_scope != "none":
            for other_vid, other_rid in active:
                if other_vid == vid:
                    continue
                if radio.interference_scope == "region" and other_rid != rid:
                    continue
                interference += _received_power(
                    by_vid[other_vid], positions[other_vid], rsu, radio
                )
        gain = channel_gain(rsu.position - positions[vid], radio)
        rates[vid] = shannon_rate(vehicle.tx_power, gain, radio, interference)
    return rates


def pool_rate_table(scenario: Scenario) -> Dict[int, float]:
    """Frozen uplink rate for every pool-region vehicle, served by its
    nearest pool member under the configured interference scope."""
    radio = scenario.radio
    vehicles = scenario.pool_vehicles
    serving = {v.vid: nearest_member(v.position, scenario) for v in vehicles}
    rates: Dict[int, float] = {}
    for v in vehicles:
        rsu = serving[v.vid]
        interference = 0.0
        if radio.interference_scope != "none":
            for other in vehicles:
                if other.vid == v.vid:
                    continue
                if (
                    radio.interference_scope == "region"
                    and serving[other.vid].rid != rsu.rid
                ):
                    continue
                interference += _received_power(other, other.position, rsu, radio)
        gain = channel_gain(rsu.position - v.position, radio)
        rates[v.vid] = shannon_rate(v.tx_power, gain, radio, interference)
    return rates
