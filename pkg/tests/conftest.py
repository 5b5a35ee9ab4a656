from __future__ import annotations

import json

import pytest

from coexfair.datamodels import LaaParams, Scenario, WiFiParams


def make_scenario(
    n: int = 5, priority_class: int = 3, rate_w: float = 9.0, rate_l: float = 7.8, **scenario_kwargs
) -> Scenario:
    """n Wi-Fi / n LAA pairs with basic-access Wi-Fi and one LAA priority class."""
    return Scenario.pairs(
        n,
        wifi=WiFiParams.basic_access(rate_w, 24.0),
        laa=LaaParams.from_priority_class(priority_class, rate_laa_mbps=rate_l),
        **scenario_kwargs,
    )


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def write_config(tmp_path):
    def writer(document: dict, name: str = "scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path

    return writer
