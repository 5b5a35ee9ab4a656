import pytest

from coexfair.datamodels import LaaParams, WiFiParams
from coexfair.errors import NegativeRegion, NonIntegerRegion
from coexfair.timing import (
    control_frame_airtime,
    delta_slots,
    event_durations,
    frame_airtime,
    laa_event_durations,
    max_backoff_slots,
    wifi_event_durations,
    wifi_frame_airtime,
)


@pytest.mark.parametrize("t_d, expected", [(43, 1), (34, 0), (79, 5)])
def test_delta_slots(t_d, expected):
    assert delta_slots(t_d, 34, 9) == expected


def test_delta_slots_rejects_short_defer():
    with pytest.raises(NegativeRegion):
        delta_slots(25, 34, 9)


def test_delta_slots_rejects_partial_slot():
    with pytest.raises(NonIntegerRegion):
        delta_slots(40, 34, 9)


@pytest.mark.parametrize(
    "m, m_laa, delta_a, expected",
    [
        (6, 2, 1, 64),
        (0, 0, 0, 15),
        (6, 6, 5, 1023),
    ],
)
def test_max_backoff_slots(m, m_laa, delta_a, expected):
    wifi = WiFiParams(w0=16, m=m)
    laa = LaaParams(w0_laa=16, m_laa=m_laa)
    assert max_backoff_slots(wifi, laa, delta_a) == expected


def test_frame_airtime():
    assert frame_airtime(2048, 9) == pytest.approx(1820.444, abs=1e-3)
    assert frame_airtime(0, 9) == 0
    assert frame_airtime(2 * 11416, 78) == pytest.approx(2342.0, abs=0.5)


def test_control_frame_airtime_ack():
    assert control_frame_airtime(20, 14, 24) == pytest.approx(24.667, abs=1e-3)


def test_basic_access_durations():
    t_sw, t_cw = wifi_event_durations(WiFiParams.basic_access(9, 24))

    assert t_sw == pytest.approx(1945.3, abs=0.05)
    assert t_cw == pytest.approx(1904.7, abs=0.05)


def test_header_only_difference_is_sifs_plus_ack():
    wifi = WiFiParams.basic_access(9, 24, payload_bytes=0, mac_header_bytes=0)
    t_sw, t_cw = wifi_event_durations(wifi)

    assert t_sw - t_cw == pytest.approx(wifi.sifs_us + control_frame_airtime(20, 14, 24))


def test_propagation_delay_is_opt_in():
    plain = wifi_event_durations(WiFiParams.basic_access())
    delayed = wifi_event_durations(WiFiParams.basic_access(include_prop_delay=True))

    assert delayed[0] - plain[0] == pytest.approx(0.1)
    assert delayed[1] - plain[1] == pytest.approx(0.1)


def test_vht_collision_lasts_as_long_as_success():
    wifi = WiFiParams.vht(n_mpdu=2, rate_data_mbps=78)
    t_sw, t_cw = wifi_event_durations(wifi)

    assert t_sw == t_cw
    assert wifi_frame_airtime(wifi) == pytest.approx(2390.0, abs=50.0)


@pytest.mark.parametrize("txop, expected", [(2000, 2500), (0, 500), (6000, 6500)])
def test_laa_event_durations(txop, expected):
    assert laa_event_durations(LaaParams(txop_us=txop, d_lte_us=500)) == (expected, expected)


def test_cross_collision_lasts_the_longer_busy_period():
    times = event_durations(WiFiParams.basic_access(), LaaParams(txop_us=0))
    assert times.t_cc == times.t_cw

    times = event_durations(WiFiParams.basic_access(), LaaParams(txop_us=4000))
    assert times.t_cc == 4500
