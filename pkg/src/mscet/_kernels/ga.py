"""Genetic search over independent scalar decision variables.

Evolves, for each of n vehicles in parallel, a population of candidate
ratios x in [lo_i, hi_i] maximizing the concave-per-vehicle objective

    obj_i(x) = lin_i*x + qos_weight_i*log2(qos_base_i - slope_i*x) + offset_i

with tournament selection, arithmetic crossover, Gaussian mutation,
clip repair, and elitism.  All random draws are generated up front from
a single seed and consumed identically by both backends, so numba and
numpy runs follow the same trajectory.
"""
from __future__ import annotations

import numpy as np

from . import NUMBA_ENABLED

_LN2 = float(np.log(2.0))
_ARG_FLOOR = 1e-300  # keeps log2 finite if a caller's interval is sloppy


def _fitness_np(x, lin, qos_weight, qos_base, slope, offset):
    arg = np.maximum(qos_base[:, None] - slope[:, None] * x, _ARG_FLOOR)
    return lin[:, None] * x + qos_weight[:, None] * np.log2(arg) + offset[:, None]


def _evolve_np(lo, hi, lin, qos_weight, qos_base, slope, offset,
               tournament, crossover_rate, mutation_rate, mutation_sigma,
               elites, init_u, tour_idx, cx_u, mix_u, mut_u, mut_z):
    n, pop = init_u.shape
    gens = tour_idx.shape[0]
    span = hi - lo
    x = lo[:, None] + init_u * span[:, None]
    rows3 = np.arange(n)[:, None, None]

    for g in range(gens):
        fit = _fitness_np(x, lin, qos_weight, qos_base, slope, offset)
        elite_idx = np.argsort(-fit, axis=1, kind="stable")[:, :elites]
        elite_x = np.take_along_axis(x, elite_idx, axis=1)

        cand = tour_idx[g]  # (n, pop, 2, k)
        cand_fit = fit[np.arange(n)[:, None, None, None], cand]
        win = np.argmax(cand_fit, axis=-1)  # first max wins ties
        parents = np.take_along_axis(cand, win[..., None], axis=-1)[..., 0]
        p1 = x[rows3, parents][..., 0]
        p2 = x[rows3, parents][..., 1]

        mix = mix_u[g]
        child = np.where(cx_u[g] < crossover_rate,
                         mix * p1 + (1.0 - mix) * p2, p1)
        child = np.where(mut_u[g] < mutation_rate,
                         child + mutation_sigma * span[:, None] * mut_z[g],
                         child)
        child = np.minimum(np.maximum(child, lo[:, None]), hi[:, None])
        child[:, :elites] = elite_x
        x = child

    fit = _fitness_np(x, lin, qos_weight, qos_base, slope, offset)
    best = np.argmax(fit, axis=1)
    ar = np.arange(n)
    return x[ar, best], fit[ar, best]


def _evolve_loops(lo, hi, lin, qos_weight, qos_base, slope, offset,
                  tournament, crossover_rate, mutation_rate, mutation_sigma,
                  elites, init_u, tour_idx, cx_u, mix_u, mut_u, mut_z):
    n, pop = init_u.shape
    gens = tour_idx.shape[0]
    x = np.empty((n, pop))
    fit = np.empty((n, pop))
    child = np.empty((n, pop))
    elite_x = np.empty(elites)
    taken = np.zeros(pop, dtype=np.bool_)
    best_x = np.empty(n)
    best_val = np.empty(n)

    for i in range(n):
        span = hi[i] - lo[i]
        for c in range(pop):
            x[i, c] = lo[i] + init_u[i, c] * span

    for g in range(gens):
        for i in range(n):
            for c in range(pop):
                arg = qos_base[i] - slope[i] * x[i, c]
                if arg < _ARG_FLOOR:
                    arg = _ARG_FLOOR
                fit[i, c] = (lin[i] * x[i, c]
                             + qos_weight[i] * np.log2(arg) + offset[i])
        for i in range(n):
            span = hi[i] - lo[i]
            for c in range(pop):
                taken[c] = False
            for e in range(elites):
                bi = -1
                bv = -np.inf
                for c in range(pop):
                    if not taken[c] and fit[i, c] > bv:
                        bv = fit[i, c]
                        bi = c
                taken[bi] = True
                elite_x[e] = x[i, bi]
            for c in range(pop):
                pidx0 = 0
                pidx1 = 0
                for side in range(2):
                    bw = -np.inf
                    bj = -1
                    for t in range(tournament):
                        j = tour_idx[g, i, c, side, t]
                        if fit[i, j] > bw:
                            bw = fit[i, j]
                            bj = j
                    if side == 0:
                        pidx0 = bj
                    else:
                        pidx1 = bj
                val = x[i, pidx0]
                if cx_u[g, i, c] < crossover_rate:
                    mix = mix_u[g, i, c]
                    val = mix * x[i, pidx0] + (1.0 - mix) * x[i, pidx1]
                if mut_u[g, i, c] < mutation_rate:
                    val = val + mutation_sigma * span * mut_z[g, i, c]
                if val < lo[i]:
                    val = lo[i]
                elif val > hi[i]:
                    val = hi[i]
                child[i, c] = val
            for e in range(elites):
                child[i, e] = elite_x[e]
        for i in range(n):
            for c in range(pop):
                x[i, c] = child[i, c]

    for i in range(n):
        bv = -np.inf
        bc = 0
        for c in range(pop):
            arg = qos_base[i] - slope[i] * x[i, c]
            if arg < _ARG_FLOOR:
                arg = _ARG_FLOOR
            v = lin[i] * x[i, c] + qos_weight[i] * np.log2(arg) + offset[i]
            if v > bv:
                bv = v
                bc = c
        best_x[i] = x[i, bc]
        best_val[i] = bv
    return best_x, best_val


if NUMBA_ENABLED:
    from numba import njit

    _evolve_jit = njit(cache=True)(_evolve_loops)
    _evolve = _evolve_jit
else:
    _evolve = _evolve_np


def evolve_scalar_ga(lo, hi, lin, qos_weight, qos_base, slope, offset,
                     population=64, generations=100, tournament=3,
                     crossover_rate=0.9, mutation_rate=0.1,
                     mutation_sigma=0.05, elites=2, seed=0):
    """Run the GA; returns (best_x, best_objective) arrays of shape (n,).

    Deterministic for a given seed, identical across backends.
    """
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    lin = np.ascontiguousarray(lin, dtype=np.float64)
    qos_weight = np.ascontiguousarray(qos_weight, dtype=np.float64)
    qos_base = np.ascontiguousarray(qos_base, dtype=np.float64)
    slope = np.ascontiguousarray(slope, dtype=np.float64)
    offset = np.ascontiguousarray(offset, dtype=np.float64)
    n = lo.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros(0)
    if np.any(hi < lo):
        raise ValueError("interval upper bounds must not sit below lower bounds")
    if population < elites + 1 or tournament < 1:
        raise ValueError("population must exceed elite count and tournament >= 1")

    rng = np.random.default_rng(seed)
    init_u = rng.random((n, population))
    tour_idx = rng.integers(0, population,
                            size=(generations, n, population, 2, tournament))
    cx_u = rng.random((generations, n, population))
    mix_u = rng.random((generations, n, population))
    mut_u = rng.random((generations, n, population))
    mut_z = rng.standard_normal((generations, n, population))

    return _evolve(lo, hi, lin, qos_weight, qos_base, slope, offset,
                   int(tournament), float(crossover_rate),
                   float(mutation_rate), float(mutation_sigma), int(elites),
                   init_u, tour_idx, cx_u, mix_u, mut_u, mut_z)
