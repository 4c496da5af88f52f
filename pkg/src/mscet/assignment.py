"""Server selection for vehicles outside the shared pool, plus the
work consumed while a vehicle drives toward its selected server.

Selection is a minimum total-distance bipartite matching.  The matcher
is one-to-one, so each roadside unit is replicated into identical
capacity slots, letting several vehicles share a server while keeping
the matching exact.
"""

from __future__ import annotations

import math
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from ._kernels import min_weight_assignment
from .latency import move_time
from .types import (
    InfeasibleMatchingError,
    RadioParams,
    Rsu,
    Scenario,
    TaskExpiredError,
    TaskSpec,
    Vehicle,
)

__all__ = [
    "build_weight_matrix",
    "km_min_weight_matching",
    "match_general",
    "nearest_rsu",
    "Phase2Update",
    "cloud_terminal_update",
]


def build_weight_matrix(
    vehicles: Sequence[Vehicle], rsus: Sequence[Rsu], slots: Optional[int] = None
) -> np.ndarray:
    """Center-to-center distance matrix with slot-replicated columns.

    Column ``j`` belongs to server ``j // slots``; all of a server's
    slot columns carry identical weights.  ``slots`` defaults to the
    smallest count that admits a complete matching, ``ceil(N / M)``.
    """
    if not rsus:
        raise ValueError("at least one roadside server is required")
    if slots is None:
        slots = max(1, math.ceil(len(vehicles) / len(rsus)))
    if slots < 1:
        raise ValueError("slots must be >= 1")
    positions = np.array([v.position for v in vehicles], dtype=float)
    centers = np.array([r.position for r in rsus], dtype=float)
    base = np.abs(centers[None, :] - positions[:, None])
    return np.repeat(base, slots, axis=1)


def km_min_weight_matching(weights: np.ndarray) -> np.ndarray:
    """Minimum-total-weight column choice per row (one column each).

    Ties between equal-weight columns resolve to the lowest column
    index, which makes replicated slots deterministic.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("weight matrix must be 2-D")
    n, m = w.shape
    if n > m:
        raise InfeasibleMatchingError(
            f"{n} vehicles exceed the {m} available server slots"
        )
    if not np.isfinite(w).all():
        raise ValueError("weights must be finite")
    return min_weight_assignment(w)


def match_general(scenario: Scenario, slots: Optional[int] = None) -> Dict[int, int]:
    """Assign every selection-bound vehicle to a server.

    Returns a vehicle-id to server-id mapping minimizing the summed
    center distances, with servers replicated into capacity slots.
    """
    vehicles = scenario.general_vehicles
    if not vehicles:
        return {}
    rsus = scenario.rsus
    if slots is None:
        slots = max(1, math.ceil(len(vehicles) / len(rsus)))
    weights = build_weight_matrix(vehicles, rsus, slots)
    cols = km_min_weight_matching(weights)
    return {
        veh.vid: rsus[int(col) // slots].rid for veh, col in zip(vehicles, cols)
    }


def nearest_rsu(position: float, rsus: Sequence[Rsu]) -> Rsu:
    """Server with the smallest center distance; ties take the lower id."""
    if not rsus:
        raise ValueError("at least one roadside server is required")
    return min(rsus, key=lambda r: (abs(r.position - position), r.rid))


class Phase2Update(NamedTuple):
    """Bookkeeping of the work a task sheds while its vehicle drives.

    ``pre_cloud`` and ``pre_local`` are fractions of the original data
    handled during the drive (streamed up the direct link and crunched
    on board, respectively); ``residual`` is what remains for the
    scheduler.  ``move_time`` is the recorded drive time — the full
    drive, or the earlier moment the task finished in transit when
    ``completed`` is set.  ``residual_task`` restates the leftover work
    as a task with the shrunken size and deadline (absent when the task
    completed on the way).
    """

    move_time: float
    pre_cloud: float
    pre_local: float
    residual: float
    completed: bool
    residual_task: Optional[TaskSpec]


def cloud_terminal_update(
    vehicle: Vehicle,
    assigned_rsu: Rsu,
    radio: RadioParams,
    use_cloud_link: bool = True,
) -> Phase2Update:
    """Work consumed while the vehicle drives into its server's coverage.

    During the drive the task streams to the cloud over the direct
    link (rate ``radio.cloud_rate``) and is processed on board in
    parallel, shrinking both the data and the remaining deadline.  With
    ``use_cloud_link=False`` only the on-board processor consumes work,
    which models schedules that never touch the cloud.  Raises
    ``TaskExpiredError`` when the residual work has no time left, or
    when a task that finished in transit did so past its deadline.
    """
    task = vehicle.task
    drive = move_time(vehicle, assigned_rsu)
    if drive <= 0.0:
        return Phase2Update(0.0, 0.0, 0.0, 1.0, False, task)

    local_rate = vehicle.local_compute / task.cycles_per_bit  # bits/s on board
    cloud_rate = radio.cloud_rate if use_cloud_link else 0.0
    burn = local_rate + cloud_rate

    done_at = task.data_bits / burn if burn > 0.0 else math.inf
    if done_at <= drive:
        if done_at > task.max_delay:
            raise TaskExpiredError(
                f"task finished in transit at {done_at:.3f}s, past its "
                f"{task.max_delay:.3f}s deadline"
            )
        pre_cloud = cloud_rate * done_at / task.data_bits
        return Phase2Update(done_at, pre_cloud, 1.0 - pre_cloud, 0.0, True, None)

    deadline_left = task.max_delay - drive
    if deadline_left <= 0.0:
        raise TaskExpiredError(
            f"drive of {drive:.3f}s leaves no time before the "
            f"{task.max_delay:.3f}s deadline"
        )
    pre_cloud = drive * cloud_rate / task.data_bits
    pre_local = drive * local_rate / task.data_bits
    residual = max(0.0, 1.0 - pre_cloud - pre_local)
    residual_task = TaskSpec(
        data_bits=residual * task.data_bits,
        cycles_per_bit=task.cycles_per_bit,
        max_delay=deadline_left,
    )
    return Phase2Update(drive, pre_cloud, pre_local, residual, False, residual_task)
