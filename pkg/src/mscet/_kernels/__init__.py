"""Hot numeric kernels with a numba fast path and a plain numpy fallback.

Set MSCET_NO_NUMBA=1 to force the numpy path (useful on platforms where
numba is unavailable or for A/B timing; see benchmarks/bench_kernels.py).
The fallback is semantically identical, only slower.
"""
from __future__ import annotations

import os


def _flag_disabled() -> bool:
    return os.environ.get("MSCET_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

NUMBA_ENABLED = HAS_NUMBA and not _flag_disabled()
BACKEND = "numba" if NUMBA_ENABLED else "numpy"

from .hungarian import min_weight_assignment  # noqa: E402
from .ga import evolve_scalar_ga  # noqa: E402
from .newton import barrier_newton  # noqa: E402

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "NUMBA_ENABLED",
    "min_weight_assignment",
    "evolve_scalar_ga",
    "barrier_newton",
    "warmup",
]


def warmup():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    import numpy as np

    min_weight_assignment(np.array([[1.0, 2.0], [2.0, 1.0]]))
    evolve_scalar_ga(
        lo=np.zeros(1),
        hi=np.ones(1),
        lin=np.ones(1),
        qos_weight=np.ones(1),
        qos_base=np.full(1, 4.0),
        slope=np.ones(1),
        offset=np.zeros(1),
        population=8,
        generations=3,
        tournament=2,
        crossover_rate=0.9,
        mutation_rate=0.1,
        mutation_sigma=0.05,
        elites=1,
        seed=0,
    )
    barrier_newton(
        comm=np.array([0.1]),
        work=np.array([1e8]),
        deadline=np.array([4.0]),
        qos_base=np.array([10.9]),
        lin_cost=1e-10,
        qos_weight=1.0,
        budget=5e8,
        f_floor=np.array([1e8 / 3.9]),
        r0=1.0,
        decay=0.1,
        step_tol=1e-4 * 5e8,
        max_stages=10,
        max_newton=50,
    )
