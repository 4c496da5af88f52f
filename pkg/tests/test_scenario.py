"""Scenario generation: determinism, serialization, and layout rules."""

from __future__ import annotations

import dataclasses
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mscet import GenConfig, generate_scenario
from mscet.scenario import (
    genconfig_from_dict,
    scenario_from_dict,
    scenario_from_json,
    scenario_to_dict,
    scenario_to_json,
    with_overrides,
)
from mscet.types import KMH_TO_MS, MB_BITS


class TestDefaults:
    def test_default_layout_matches_documented_values(self):
        scen = generate_scenario(GenConfig(), seed=0)
        assert scen.road_length == 250.0
        assert [r.position for r in scen.rsus] == [25.0, 75.0, 125.0, 175.0, 225.0]
        assert all(r.capacity == 5e8 for r in scen.rsus)
        assert all(r.radius == 20.0 for r in scen.rsus)
        assert len(scen.vehicles) == 10
        assert scen.pool is None

    def test_default_vehicle_draws_sit_in_documented_ranges(self):
        scen = generate_scenario(GenConfig(), seed=3)
        for v in scen.vehicles:
            assert 0.0 <= v.position <= 250.0
            assert v.speed == pytest.approx(40.0 * KMH_TO_MS)
            assert v.local_compute == 1.25e7
            assert v.tx_power == 0.2
            assert 10 * MB_BITS <= v.task.data_bits <= 15 * MB_BITS
            assert 2.0 <= v.task.cycles_per_bit <= 4.0
            assert 4.0 <= v.task.max_delay <= 6.0
            assert not v.in_pool_region

    def test_overlapping_region_pools_every_server(self):
        scen = generate_scenario(GenConfig(region="overlapping"), seed=0)
        assert scen.pool is not None and scen.pool.pooled
        assert set(scen.pool.member_ids) == {r.rid for r in scen.rsus}
        assert all(v.in_pool_region for v in scen.vehicles)
        assert all(r.radius >= scen.road_length for r in scen.rsus)
        assert scen.pool_capacity() == pytest.approx(2.5e9)


class TestPlacement:
    def test_even_placement_spaces_vehicles_uniformly(self):
        scen = generate_scenario(GenConfig(n_vehicles=5, placement="even"), seed=0)
        step = 250.0 / 5
        expected = [step * (k + 0.5) for k in range(5)]
        assert [v.position for v in scen.vehicles] == pytest.approx(expected)

    def test_clustered_placement_stays_inside_the_cluster(self):
        cfg = GenConfig(n_vehicles=12, placement="clustered")
        for seed in range(5):
            scen = generate_scenario(cfg, seed=seed)
            lo = cfg.cluster_center - cfg.cluster_width / 2
            hi = cfg.cluster_center + cfg.cluster_width / 2
            assert all(lo <= v.position <= hi for v in scen.vehicles)

    def test_unknown_placement_rejected(self):
        with pytest.raises(ValueError):
            GenConfig(placement="spiral")

    def test_unknown_region_rejected(self):
        with pytest.raises(ValueError):
            GenConfig(region="everywhere")


class TestDeterminism:
    def test_same_seed_reproduces_the_scenario_exactly(self):
        a = generate_scenario(GenConfig(), seed=42)
        b = generate_scenario(GenConfig(), seed=42)
        assert scenario_to_dict(a) == scenario_to_dict(b)

    def test_different_seeds_differ(self):
        a = generate_scenario(GenConfig(), seed=1)
        b = generate_scenario(GenConfig(), seed=2)
        assert scenario_to_dict(a) != scenario_to_dict(b)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_every_seed_yields_a_valid_scenario(self, seed):
        scen = generate_scenario(GenConfig(), seed=seed)
        assert all(0.0 <= v.position <= scen.road_length for v in scen.vehicles)
        assert all(
            scen.rsus[i].position < scen.rsus[i + 1].position
            for i in range(len(scen.rsus) - 1)
        )
        assert scen.econ.qos_window >= max(v.task.max_delay for v in scen.vehicles)


class TestSerialization:
    def test_json_round_trip_preserves_everything(self):
        scen = generate_scenario(GenConfig(region="overlapping"), seed=7)
        clone = scenario_from_json(scenario_to_json(scen))
        assert scenario_to_dict(clone) == scenario_to_dict(scen)
        assert clone.seed == scen.seed

    def test_dict_round_trip_on_general_region(self):
        scen = generate_scenario(GenConfig(), seed=5)
        clone = scenario_from_dict(scenario_to_dict(scen))
        assert scenario_to_json(clone) == scenario_to_json(scen)

    def test_json_output_is_canonical(self):
        scen = generate_scenario(GenConfig(), seed=0)
        text = scenario_to_json(scen)
        assert text == json.dumps(json.loads(text), indent=2, sort_keys=True)


class TestGenConfigParsing:
    def test_round_trips_through_dict(self):
        cfg = GenConfig(n_vehicles=4, placement="even", rsu_radius=60.0)
        clone = genconfig_from_dict(dataclasses.asdict(cfg))
        assert clone == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError):
            genconfig_from_dict({"n_vehicles": 4, "warp_factor": 9})

    def test_nested_radio_and_econ_sections_coerce(self):
        cfg = genconfig_from_dict(
            {"radio": {"cloud_rate": 5e6}, "econ": {"beta_qos": 0.5}}
        )
        assert cfg.radio.cloud_rate == 5e6
        assert cfg.econ.beta_qos == 0.5

    def test_with_overrides_replaces_fields(self):
        cfg = GenConfig()
        bumped = with_overrides(cfg, n_vehicles=16, rsu_radius=80.0)
        assert bumped.n_vehicles == 16 and bumped.rsu_radius == 80.0
        assert cfg.n_vehicles == 10
