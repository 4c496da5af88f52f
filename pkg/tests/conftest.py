"""Shared fixtures and helpers for the mscet test suite."""

from __future__ import annotations

from typing import Dict, Mapping

import pytest

from mscet import GenConfig, OffloadDecision, Scenario, generate_scenario
from mscet.radio import pool_rate_table, rate_table


@pytest.fixture(scope="session")
def default_scenario() -> Scenario:
    """The stock ten-vehicle highway scenario used throughout."""
    return generate_scenario(GenConfig(), seed=0)


@pytest.fixture(scope="session")
def pool_scenario() -> Scenario:
    """An overlapping-coverage scenario where all servers pool resources."""
    return generate_scenario(GenConfig(region="overlapping"), seed=0)


def rates_for_decisions(
    decisions: Mapping[int, OffloadDecision], scenario: Scenario
) -> Dict[int, float]:
    """Uplink rates consistent with each decision's recorded attachment.

    Pool-region vehicles take their nearest-member pool rate; attached
    general vehicles take the solo rate at their recorded server.  With
    the default no-interference scope this reproduces exactly the rates
    any schedule computed internally.
    """
    rates: Dict[int, float] = {}
    if scenario.pool is not None:
        rates.update(pool_rate_table(scenario))
    by_vid = {v.vid: v for v in scenario.vehicles}
    assignment = {
        vid: dec.rsu_id
        for vid, dec in decisions.items()
        if dec.rsu_id is not None and not by_vid[vid].in_pool_region
    }
    rates.update(rate_table(scenario, assignment))
    return rates
