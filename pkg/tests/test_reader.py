from fractions import Fraction

import pytest

from coexfair.datamodels import Direction, LaaParams, Scenario, WiFiMode, WiFiParams
from coexfair.errors import ConfigError
from coexfair.reader import ScenarioReader, dump_scenario, scenario_from_dict


def test_empty_document_resolves_to_defaults():
    scenario = scenario_from_dict({})

    assert scenario.n_w == 1 and scenario.n_l == 1
    assert scenario.baseline_n == 2
    assert scenario.wifi == WiFiParams()
    assert scenario.laa == LaaParams.from_priority_class(3)
    assert scenario.laa.data_fraction == Fraction(13, 14)


def test_reader_without_path_uses_defaults():
    with ScenarioReader() as reader:
        assert reader.scenario == scenario_from_dict({})


def test_priority_class_and_overrides():
    scenario = scenario_from_dict({
        "scenario": {"n_w": 4, "n_l": 2},
        "laa": {"priority_class": 4, "direction": "UL", "txop_us": 3000, "rate_laa_mbps": 70.2},
    })

    assert scenario.baseline_n == 6
    assert scenario.laa.t_d_us == 79.0
    assert scenario.laa.m_laa == 6
    assert scenario.laa.direction is Direction.UL
    assert scenario.laa.txop_us == 3000


def test_classes_1_and_2_defer_for_difs_unless_raw_table_is_requested():
    assert scenario_from_dict({"laa": {"priority_class": 1}}).laa.t_d_us == 34.0
    assert scenario_from_dict({"laa": {"priority_class": 1}}, raw_table_td=True).laa.t_d_us == 25.0
    assert scenario_from_dict({"laa": {"priority_class": 2, "raw_table_td": True}}).laa.t_d_us == 25.0


def test_control_symbols_set_the_data_fraction():
    scenario = scenario_from_dict({"laa": {"pdcch_symbols": 2}})
    assert scenario.laa.data_fraction == Fraction(6, 7)


def test_wifi_presets():
    vht = scenario_from_dict({"wifi": {"preset": "vht", "n_mpdu": 4}}).wifi
    fast = scenario_from_dict({"wifi": {"preset": "basic", "rate_data_mbps": 54}}).wifi

    assert vht.mode is WiFiMode.VHT
    assert vht.payload_bytes == 4 * vht.mpdu_bytes
    assert fast == WiFiParams.basic_access(54.0, 24.0)


def test_snap_flag_reaches_solver_controls():
    assert scenario_from_dict({}, snap_txop_grid=True).solver.snap_txop_grid


@pytest.mark.parametrize(
    "document, key",
    [
        ({"laa": {"txop": 2000}}, "laa.txop"),
        ({"wifi": {"rate": 9}}, "wifi.rate"),
        ({"network": {}}, "<root>.network"),
        ({"scenario": {"n_pairs": 3}}, "scenario.n_pairs"),
        ({"solver": {"tolerance": 1e-9}}, "solver.tolerance"),
    ],
)
def test_unknown_keys_are_named(document, key):
    with pytest.raises(ConfigError) as error:
        scenario_from_dict(document)

    assert error.value.key == key


@pytest.mark.parametrize(
    "document, key",
    [
        ({"laa": {"e_l": 9}}, "laa.e_l"),
        ({"laa": {"priority_class": 5}}, "laa.priority_class"),
        ({"wifi": {"w0": 0}}, "wifi.w0"),
        ({"scenario": {"n_w": 0}}, "scenario.n_w"),
        ({"solver": {"damping": 1.5}}, "solver.damping"),
    ],
)
def test_invalid_values_are_named(document, key):
    with pytest.raises(ConfigError) as error:
        scenario_from_dict(document)

    assert error.value.key == key


def test_unknown_preset():
    with pytest.raises(ConfigError) as error:
        scenario_from_dict({"wifi": {"preset": "he"}})

    assert error.value.key == "wifi.preset"


def test_section_must_be_an_object():
    with pytest.raises(ConfigError):
        scenario_from_dict({"laa": [1, 2]})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as error:
        with ScenarioReader(tmp_path / "absent.json"):
            pass

    assert error.value.key == "--config"


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"scenario\": ")

    with pytest.raises(ConfigError) as error:
        with ScenarioReader(path):
            pass

    assert error.value.key == "--config"


def test_reader_loads_file(write_config):
    path = write_config({"scenario": {"n_w": 3, "n_l": 3, "baseline_n": 6}, "laa": {"priority_class": 2}})

    with ScenarioReader(path) as reader:
        scenario = reader.scenario

    assert scenario == Scenario.pairs(3, laa=LaaParams.from_priority_class(2))


@pytest.mark.parametrize(
    "scenario",
    [
        Scenario.pairs(5, laa=LaaParams.from_priority_class(4, pdcch_symbols=3, txop_us=1234.0)),
        Scenario(n_w=2, n_l=7, wifi=WiFiParams.vht(n_mpdu=4), laa=LaaParams.from_priority_class(2)),
    ],
)
def test_resolved_scenario_reads_back_unchanged(tmp_path, scenario):
    path = tmp_path / "resolved.json"
    dump_scenario(scenario, path)

    with ScenarioReader(path) as reader:
        assert reader.scenario == scenario
