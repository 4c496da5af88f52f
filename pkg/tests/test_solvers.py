"""The three inner solvers against exact references and pinned cases."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mscet import EconParams
from mscet.oracle import grid_search_1d
from mscet.solvers import (
    AlphaProblem,
    ResourceProblem,
    SolverConfig,
    bisection_solve_alpha_c,
    feasible_interval,
    ga_solve_alpha_c,
    ipm_solve_f,
    kkt_solve_alpha_e,
    minimum_resources,
    resource_objective,
    share_objective,
    solver_config_from_dict,
)
from mscet.types import InfeasibleBudgetError

from _refs import grid_share_optimum, random_share_problem


class TestSolverConfig:
    def test_defaults_are_valid(self):
        SolverConfig()

    @pytest.mark.parametrize(
        "field,value",
        [
            ("ga_population", 0),
            ("ga_generations", 2.5),
            ("ga_crossover_rate", 1.5),
            ("ga_mutation_rate", -0.1),
            ("ga_mutation_sigma", 0.0),
            ("penalty_decay", 1.0),
            ("penalty_decay", 0.0),
            ("ipm_tolerance", -1e-9),
            ("max_outer_iters", 0),
        ],
    )
    def test_rejects_bad_fields(self, field, value):
        with pytest.raises(ValueError):
            SolverConfig(**{field: value})

    def test_dict_round_trip(self):
        cfg = SolverConfig(ga_population=32, seed=9)
        assert solver_config_from_dict(cfg.to_dict()) == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError):
            solver_config_from_dict({"ga_population": 32, "warp": 1})


class TestFeasibleInterval:
    def test_positive_slope_caps_at_the_deadline_root(self):
        assert feasible_interval(2.0, 1.0, 5.0, 1.0) == (0.0, 1.0)
        assert feasible_interval(8.0, 1.0, 5.0, 1.0) == (0.0, 0.5)

    def test_positive_slope_with_no_room_is_empty(self):
        assert feasible_interval(2.0, 9.0, 5.0, 1.0) is None

    def test_negative_slope_needs_a_minimum_share(self):
        lo, hi = feasible_interval(-4.0, 7.0, 5.0, 1.0)
        assert lo == pytest.approx(0.5)
        assert hi == 1.0

    def test_negative_slope_that_never_recovers_is_empty(self):
        assert feasible_interval(-1.0, 9.0, 5.0, 1.0) is None

    def test_flat_bound_depends_only_on_its_offset(self):
        assert feasible_interval(0.0, 4.0, 5.0, 0.7) == (0.0, 0.7)
        assert feasible_interval(0.0, 6.0, 5.0, 0.7) is None

    def test_negative_box_is_empty(self):
        assert feasible_interval(1.0, 0.0, 5.0, -0.1) is None




class TestShareSolvers:
    def test_ga_bisection_and_grid_agree(self):
        econ = EconParams()
        config = SolverConfig()
        rng = np.random.default_rng(321)
        problems = [random_share_problem(rng) for _ in range(30)]
        ga = ga_solve_alpha_c(problems, econ, config)
        exact = bisection_solve_alpha_c(problems, econ)
        for prob, g, e in zip(problems, ga, exact):
            grid_x, grid_val = grid_share_optimum(prob, econ)
            if g.infeasible:
                assert e.infeasible
                assert grid_val == -np.inf
                continue
            assert not e.infeasible
            # The exact solver can only beat a discrete grid.
            assert e.objective >= grid_val - 1e-9
            assert abs(g.objective - grid_val) <= 1e-3
            assert abs(g.alpha - grid_x) <= 1e-2 or abs(
                share_objective(prob, econ, g.alpha) - grid_val
            ) <= 1e-3

    def test_empty_interval_is_flagged_not_fatal(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=1.0, delta=10.0, fixed_share=0.0, cycles=1e8, deadline=4.0
        )
        (res,) = ga_solve_alpha_c([prob], econ, SolverConfig())
        assert res.infeasible and res.alpha == 0.0

    def test_saturated_fixed_share_forces_zero(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=2.0, delta=1.0, fixed_share=1.0, cycles=1e8, deadline=5.0
        )
        (res,) = ga_solve_alpha_c([prob], econ, SolverConfig())
        assert res.alpha == 0.0 and not res.infeasible

    def test_ga_is_deterministic_per_stage(self):
        econ = EconParams()
        config = SolverConfig(seed=5)
        rng = np.random.default_rng(7)
        problems = [random_share_problem(rng) for _ in range(4)]
        a = ga_solve_alpha_c(problems, econ, config, stage=3)
        b = ga_solve_alpha_c(problems, econ, config, stage=3)
        assert [(r.alpha, r.objective) for r in a] == [
            (r.alpha, r.objective) for r in b
        ]


class TestKktSolver:
    def test_pinned_deadline_active_share(self):
        # Slope 6, offset 1, deadline 4: the bound meets the deadline at
        # exactly one half, and strong revenue pushes the share there.
        econ = EconParams()
        prob = AlphaProblem(
            omega=6.0, delta=1.0, fixed_share=0.0, cycles=5e7, deadline=4.0
        )
        (res,) = kkt_solve_alpha_e([prob], econ)
        assert res.alpha == pytest.approx(0.5)
        assert res.case == "deadline-active"
        assert res.zeta is not None and math.isfinite(res.zeta)

    def test_fill_split_takes_the_whole_remainder(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=0.1, delta=1.0, fixed_share=0.3, cycles=5e8, deadline=6.0
        )
        (res,) = kkt_solve_alpha_e([prob], econ)
        assert res.alpha == pytest.approx(1.0 - prob.fixed_share)
        assert res.case == "fill-split"

    def test_worthless_offload_stays_local(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=6.0, delta=1.0, fixed_share=0.0, cycles=1.0, deadline=5.0
        )
        (res,) = kkt_solve_alpha_e([prob], econ)
        assert res.alpha == 0.0
        assert res.case == "all-local"

    def test_saturated_split_reports_its_own_case(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=2.0, delta=1.0, fixed_share=1.0, cycles=1e8, deadline=5.0
        )
        (res,) = kkt_solve_alpha_e([prob], econ)
        assert res.alpha == 0.0
        assert res.case == "full-cloud-local"

    def test_empty_interval_is_infeasible(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=1.0, delta=10.0, fixed_share=0.0, cycles=1e8, deadline=4.0
        )
        (res,) = kkt_solve_alpha_e([prob], econ)
        assert res.infeasible and res.case == "infeasible"

    def test_flat_bound_follows_the_revenue_sign(self):
        econ = EconParams()
        prob = AlphaProblem(
            omega=0.0, delta=1.0, fixed_share=0.2, cycles=1e8, deadline=5.0
        )
        (res,) = kkt_solve_alpha_e([prob], econ)
        assert res.alpha == pytest.approx(0.8)
        assert res.case == "degenerate"

    def test_matches_grid_oracle_closely(self):
        econ = EconParams()
        rng = np.random.default_rng(654)
        for _ in range(50):
            prob = random_share_problem(rng)
            (res,) = kkt_solve_alpha_e([prob], econ)
            grid_x, grid_val = grid_share_optimum(prob, econ)
            if res.infeasible:
                assert grid_val == -np.inf
                continue
            assert res.objective >= grid_val - 1e-9
            assert abs(res.objective - grid_val) <= 1e-3


def _resource_problem(rng, alpha_edge=None) -> ResourceProblem:
    a = float(rng.uniform(0.1, 1.0)) if alpha_edge is None else alpha_edge
    return ResourceProblem(
        alpha_edge=a,
        data_bits=float(rng.uniform(8e7, 1.2e8)),
        cycles_per_bit=float(rng.uniform(2.0, 4.0)),
        deadline=float(rng.uniform(4.0, 6.0)),
        rate=float(rng.uniform(5e7, 2e8)),
    )


class TestMinimumResources:
    def test_frozen_floor_value(self):
        econ = EconParams()
        prob = ResourceProblem(
            alpha_edge=0.5,
            data_bits=1e8,
            cycles_per_bit=3.0,
            deadline=4.0,
            rate=5e7,
        )
        # 5e7 bits upload in 1 s, 1.5e8 cycles in the remaining 3 s.
        assert minimum_resources([prob], econ)[0] == pytest.approx(5e7)

    def test_no_edge_work_needs_nothing(self):
        econ = EconParams()
        prob = ResourceProblem(
            alpha_edge=0.0, data_bits=1e8, cycles_per_bit=3.0, deadline=4.0, rate=5e7
        )
        assert minimum_resources([prob], econ)[0] == 0.0

    def test_impossible_uploads_floor_at_infinity(self):
        econ = EconParams()
        slow = ResourceProblem(
            alpha_edge=1.0, data_bits=1e8, cycles_per_bit=3.0, deadline=4.0, rate=1e7
        )
        assert minimum_resources([slow], econ)[0] == math.inf


class TestIpmSolver:
    def test_no_edge_work_gets_exactly_zero(self):
        econ = EconParams()
        rng = np.random.default_rng(3)
        problems = [
            _resource_problem(rng, alpha_edge=0.0),
            _resource_problem(rng),
        ]
        result = ipm_solve_f(problems, 2.5e9, econ, SolverConfig())
        assert result.resources[0] == 0.0
        assert result.resources[1] > 0.0

    def test_identical_vehicles_get_identical_grants(self):
        econ = EconParams()
        rng = np.random.default_rng(4)
        prob = _resource_problem(rng)
        result = ipm_solve_f([prob, prob], 2.5e9, econ, SolverConfig())
        assert result.resources[0] == result.resources[1]

    def test_grants_respect_deadlines_and_budget(self):
        econ = EconParams()
        rng = np.random.default_rng(5)
        problems = [_resource_problem(rng) for _ in range(6)]
        budget = 2.5e9
        result = ipm_solve_f(problems, budget, econ, SolverConfig())
        assert result.converged
        assert float(result.resources.sum()) < budget
        for p, f in zip(problems, result.resources):
            volume = p.alpha_edge * p.data_bits
            delay = volume / p.rate + volume * p.cycles_per_bit / f
            assert delay <= p.deadline

    def test_starved_budget_raises(self):
        econ = EconParams()
        rng = np.random.default_rng(6)
        problems = [_resource_problem(rng) for _ in range(4)]
        floors = minimum_resources(problems, econ)
        with pytest.raises(InfeasibleBudgetError):
            ipm_solve_f(problems, float(floors.sum()) * 0.5, econ, SolverConfig())

    def test_hopeless_vehicle_raises(self):
        econ = EconParams()
        slow = ResourceProblem(
            alpha_edge=1.0, data_bits=1e8, cycles_per_bit=3.0, deadline=4.0, rate=1e7
        )
        with pytest.raises(InfeasibleBudgetError):
            ipm_solve_f([slow], 2.5e9, econ, SolverConfig())

    def test_single_vehicle_matches_grid_oracle(self):
        econ = EconParams()
        config = SolverConfig()
        rng = np.random.default_rng(777)
        for _ in range(10):
            prob = _resource_problem(rng)
            budget = 2.5e9
            floors = minimum_resources([prob], econ)
            result = ipm_solve_f([prob], budget, econ, config)
            got = resource_objective([prob], econ, result.resources)

            volume = prob.alpha_edge * prob.data_bits
            comm = volume / prob.rate
            work = volume * prob.cycles_per_bit

            def objective(f):
                fs = np.asarray(f, dtype=float)
                with np.errstate(divide="ignore"):
                    delay = comm + work / fs
                arg = 1.0 + econ.qos_window - delay
                vals = -econ.beta_profit * econ.resource_price * fs
                vals = vals + econ.beta_qos * np.log2(np.maximum(arg, 1e-300))
                return np.where(delay <= prob.deadline, vals, -np.inf)

            _, grid_val = grid_search_1d(
                objective, float(floors[0]), budget, points=10_000
            )
            assert abs(got - grid_val) <= 1e-2 * max(1.0, abs(grid_val))
