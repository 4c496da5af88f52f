"""The four comparison schedules."""

from __future__ import annotations

import dataclasses

import pytest

from mscet import (
    EconParams,
    GenConfig,
    OffloadDecision,
    Rsu,
    Scenario,
    TaskSpec,
    Vehicle,
    generate_scenario,
    run_mscet,
)
from mscet.baselines import (
    run_cloud_terminal,
    run_edge_terminal,
    run_nearby,
    run_sgrr,
)
from mscet.latency import processing_delay
from mscet.oracle import grid_search_1d
from mscet.utility import vehicle_utility


def _hospitable_scenario(n_vehicles: int) -> Scenario:
    """A small layout where even static splits finish on time: strong
    terminals, a fast cloud backend, and vehicles parked on the server."""
    econ = dataclasses.replace(EconParams(), cloud_compute=1e9)
    vehicles = tuple(
        Vehicle(
            vid=i,
            position=100.0,
            speed=11.11,
            local_compute=1e8,
            tx_power=0.2,
            in_pool_region=False,
            task=TaskSpec(data_bits=9e7, cycles_per_bit=3.0, max_delay=5.0),
        )
        for i in range(n_vehicles)
    )
    return Scenario(
        road_length=250.0,
        vehicles=vehicles,
        rsus=(Rsu(rid=0, position=100.0, radius=20.0, capacity=1e9),),
        pool=None,
        econ=econ,
    )


class TestSgrr:
    def test_keeps_the_static_shares_everywhere(self, default_scenario):
        res = run_sgrr(default_scenario)
        for dec in res.decisions.values():
            assert dec.alpha_edge == pytest.approx(1 / 3)
            assert dec.alpha_cloud == pytest.approx(1 / 3)

    def test_custom_shares_pass_through(self):
        scen = _hospitable_scenario(2)
        res = run_sgrr(scen, shares=(0.5, 0.2))
        for dec in res.decisions.values():
            assert dec.alpha_edge == 0.5
            assert dec.alpha_cloud == 0.2

    def test_single_server_layout_forces_that_server(self):
        scen = _hospitable_scenario(2)
        res = run_sgrr(scen)
        assert all(d.rsu_id == 0 for d in res.decisions.values())
        assert all(d.feasible for d in res.decisions.values())
        # Two claimants on one server: each reserves half its capacity.
        assert all(d.resource == pytest.approx(5e8) for d in res.decisions.values())
        assert sum(d.resource for d in res.decisions.values()) <= 1e9 * (1 + 1e-12)
        assert res.report.total > 0.0

    def test_static_thirds_miss_every_deadline_on_the_stock_layout(
        self, default_scenario
    ):
        # The stock cloud backend is far too slow for a fixed one-third
        # cloud share, so the static baseline strands every vehicle.
        res = run_sgrr(default_scenario)
        assert res.report.total == 0.0
        assert all(not d.feasible for d in res.decisions.values())

    def test_is_deterministic(self, default_scenario):
        a = run_sgrr(default_scenario)
        b = run_sgrr(default_scenario)
        assert a.report.total == b.report.total
        assert a.decisions == b.decisions

    def test_handles_shared_budget_regions(self, pool_scenario):
        res = run_sgrr(pool_scenario)
        assert set(res.decisions) == {v.vid for v in pool_scenario.vehicles}
        assert res.report.total >= 0.0


class TestCloudTerminal:
    def test_never_touches_the_edge(self, default_scenario):
        res = run_cloud_terminal(default_scenario)
        for dec in res.decisions.values():
            assert dec.alpha_edge == 0.0
            assert dec.resource == 0.0
            assert dec.move_time == 0.0
            assert dec.rsu_id is not None

    def test_strands_everyone_on_the_stock_layout(self, default_scenario):
        res = run_cloud_terminal(default_scenario)
        assert res.report.total == 0.0
        assert all(not d.feasible for d in res.decisions.values())

    def test_single_vehicle_matches_a_dense_share_sweep(self):
        # One vehicle whose terminal alone misses the deadline but whose
        # cloud route is fast: the solved split should sit within 1% of
        # a dense one-dimensional sweep of the true utility.
        econ = dataclasses.replace(EconParams(), cloud_compute=1e9)
        vehicle = Vehicle(
            vid=0,
            position=100.0,
            speed=11.11,
            local_compute=5e7,
            tx_power=0.2,
            in_pool_region=False,
            task=TaskSpec(data_bits=1e8, cycles_per_bit=3.0, max_delay=5.0),
        )
        scen = Scenario(
            road_length=250.0,
            vehicles=(vehicle,),
            rsus=(Rsu(rid=0, position=100.0, radius=20.0, capacity=1e9),),
            pool=None,
            econ=econ,
        )

        def true_utility(alpha_cloud: float) -> float:
            dec = OffloadDecision(0.0, float(alpha_cloud), 0.0, rsu_id=0)
            if processing_delay(dec, vehicle, scen) > vehicle.task.max_delay:
                return float("-inf")
            return vehicle_utility(dec, vehicle, scen)

        _, best = grid_search_1d(true_utility, 0.0, 1.0, points=20_001)
        res = run_cloud_terminal(scen)
        assert res.report.total == pytest.approx(best, rel=1e-2)


class TestEdgeTerminal:
    def test_never_touches_the_cloud(self, default_scenario):
        res = run_edge_terminal(default_scenario)
        for dec in res.decisions.values():
            assert dec.alpha_cloud == 0.0
            assert dec.pre_cloud == 0.0

    def test_matches_the_full_method_when_nobody_needs_to_drive(self):
        # Five evenly placed vehicles sit exactly on the five servers; the
        # stock cloud backend is never worth a positive share, so removing
        # it changes nothing at all.
        scen = generate_scenario(
            GenConfig(n_vehicles=5, placement="even"), seed=0
        )
        assert all(
            any(r.covers(v.position) for r in scen.rsus) for v in scen.vehicles
        )
        assert run_edge_terminal(scen).report.total == run_mscet(scen).report.total

    def test_full_method_beats_it_when_vehicles_must_drive(self, default_scenario):
        # Out-of-coverage vehicles stream to the cloud while driving under
        # the full method; the edge-only mode forfeits exactly that.
        full = run_mscet(default_scenario).report.total
        edge_only = run_edge_terminal(default_scenario).report.total
        assert full > edge_only


class TestNearby:
    def test_matches_the_full_method_on_a_balanced_layout(self):
        # One vehicle per server: nearest attachment IS the minimum-cost
        # matching, so both runs take the same trajectory.
        scen = generate_scenario(
            GenConfig(n_vehicles=5, placement="even"), seed=0
        )
        assert run_nearby(scen).report.total == run_mscet(scen).report.total

    def test_loses_to_the_full_method_on_a_clustered_layout(self):
        # A crowd piles onto its shared nearest server while the matching
        # spreads vehicles out, so balance wins by a wide margin.
        scen = generate_scenario(
            GenConfig(n_vehicles=12, placement="clustered"), seed=0
        )
        assert run_nearby(scen).report.total < run_mscet(scen).report.total
