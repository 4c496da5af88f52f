"""The three-level alternating optimization pipeline."""

from __future__ import annotations

import dataclasses

import pytest

from mscet import (
    EconParams,
    GenConfig,
    ResourcePool,
    Rsu,
    Scenario,
    SolverConfig,
    TaskSpec,
    Vehicle,
    generate_scenario,
    run_mscet,
)
from mscet.schedule import default_init, run_pipeline
from mscet.utility import check_constraints, system_utility

from conftest import rates_for_decisions


class TestDefaultInit:
    def test_pool_budget_splits_equally(self):
        vehicles = tuple(
            Vehicle(
                vid=i,
                position=30.0 + 40.0 * i,
                speed=11.11,
                local_compute=1e8,
                tx_power=0.2,
                in_pool_region=True,
                task=TaskSpec(data_bits=1e8, cycles_per_bit=3.0, max_delay=5.0),
            )
            for i in range(4)
        )
        rsus = (
            Rsu(rid=0, position=100.0, radius=250.0, capacity=1e9),
            Rsu(rid=1, position=200.0, radius=250.0, capacity=1e9),
        )
        scen = Scenario(
            road_length=250.0,
            vehicles=vehicles,
            rsus=rsus,
            pool=ResourcePool(member_ids=(0, 1)),
        )
        init = default_init(scen)
        assert all(d.resource == pytest.approx(5e8) for d in init.values())
        assert all(
            (d.alpha_edge, d.alpha_cloud) == (pytest.approx(1 / 3), pytest.approx(1 / 3))
            for d in init.values()
        )

    def test_init_always_passes_the_constraint_check(self, default_scenario):
        init = default_init(default_scenario)
        rates = rates_for_decisions(init, default_scenario)
        assert check_constraints(init, default_scenario, rates).ok

    def test_rejects_overfull_shares(self, default_scenario):
        with pytest.raises(ValueError):
            default_init(default_scenario, shares=(0.7, 0.5))


class TestRunMscet:
    def test_is_deterministic(self, default_scenario):
        a = run_mscet(default_scenario, SolverConfig())
        b = run_mscet(default_scenario, SolverConfig())
        assert a.report.total == b.report.total
        assert a.trace == b.trace
        assert {
            vid: (d.alpha_edge, d.alpha_cloud, d.resource, d.rsu_id, d.feasible)
            for vid, d in a.decisions.items()
        } == {
            vid: (d.alpha_edge, d.alpha_cloud, d.resource, d.rsu_id, d.feasible)
            for vid, d in b.decisions.items()
        }

    def test_reported_utility_is_the_best_iterate(self, default_scenario):
        res = run_mscet(default_scenario, SolverConfig())
        assert res.report.total == pytest.approx(
            max(rec.utility for rec in res.trace)
        )

    def test_improves_on_the_default_start(self, default_scenario):
        init = default_init(default_scenario)
        rates = rates_for_decisions(init, default_scenario)
        start = system_utility(init, default_scenario, rates).total
        res = run_mscet(default_scenario, SolverConfig())
        assert res.report.total >= start - 1e-9

    def test_emitted_decisions_pass_constraints_or_carry_flags(
        self, default_scenario
    ):
        res = run_mscet(default_scenario, SolverConfig())
        rates = rates_for_decisions(res.decisions, default_scenario)
        assert check_constraints(res.decisions, default_scenario, rates).ok

    def test_report_flags_match_decision_flags(self, default_scenario):
        res = run_mscet(default_scenario, SolverConfig())
        flagged = {vid for vid, d in res.decisions.items() if not d.feasible}
        assert flagged == set(res.report.infeasible)

    def test_trace_respects_loop_caps(self, default_scenario):
        config = SolverConfig(max_outer_iters=3, max_mid_iters=2)
        res = run_mscet(default_scenario, config)
        outers = {rec.outer for rec in res.trace if rec.outer >= 1}
        assert len(outers) <= 3
        for outer in outers:
            mids = {
                rec.mid
                for rec in res.trace
                if rec.outer == outer and rec.phase == "resources"
            }
            assert len(mids) <= 2

    def test_trace_phases_are_labeled(self, default_scenario):
        res = run_mscet(default_scenario, SolverConfig())
        phases = {rec.phase for rec in res.trace}
        assert "init" in phases
        assert phases <= {"init", "cloud-share", "resources"}

    def test_decoupled_objective_converges_in_one_productive_pass(self):
        # With no timeliness reward and free resources, nothing couples
        # the phases: after one outer pass the utility stops moving.
        base = generate_scenario(GenConfig(), seed=0)
        econ = dataclasses.replace(
            base.econ, beta_qos=0.0, resource_price=0.0, revenue_per_cycle=5e-8
        )
        scen = dataclasses.replace(base, econ=econ)
        res = run_mscet(scen, SolverConfig())
        outer_utils = {}
        for rec in res.trace:
            if rec.outer >= 1:
                outer_utils[rec.outer] = rec.utility
        assert len(outer_utils) <= 2
        assert max(outer_utils.values()) - min(outer_utils.values()) <= 1e-9

    def test_pool_scenario_runs_end_to_end(self, pool_scenario):
        res = run_mscet(pool_scenario, SolverConfig())
        rates = rates_for_decisions(res.decisions, pool_scenario)
        assert check_constraints(res.decisions, pool_scenario, rates).ok
        assert res.report.total > 0.0


class TestRestrictedPipelines:
    def test_cloud_free_run_pins_cloud_shares_to_zero(self, default_scenario):
        res = run_pipeline(default_scenario, SolverConfig(), allow_cloud=False)
        for dec in res.decisions.values():
            assert dec.alpha_cloud == 0.0
            assert dec.pre_cloud == 0.0

    def test_edge_free_run_pins_edge_shares_to_zero(self, default_scenario):
        res = run_pipeline(
            default_scenario, SolverConfig(), allow_edge=False, move=False
        )
        for dec in res.decisions.values():
            assert dec.alpha_edge == 0.0
            assert dec.resource == 0.0

    def test_no_move_run_attaches_general_vehicles_in_place(self, default_scenario):
        res = run_pipeline(
            default_scenario, SolverConfig(), allow_edge=False, move=False
        )
        for dec in res.decisions.values():
            assert dec.move_time == 0.0
            assert dec.rsu_id is not None

    def test_assignment_override_is_respected(self, default_scenario):
        target = default_scenario.rsus[0].rid
        assign = {v.vid: target for v in default_scenario.general_vehicles}
        res = run_pipeline(default_scenario, SolverConfig(), assignment=assign)
        for dec in res.decisions.values():
            assert dec.rsu_id == target
