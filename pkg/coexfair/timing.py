"""Pure timing arithmetic shared by the analytic model and the simulator.

All durations are microseconds and all rates Mbps, so bits / rate is a duration
and bits / duration is a rate with no conversion factor.
"""
from __future__ import annotations

import math

from coexfair.datamodels import EventDurations, LaaParams, WiFiMode, WiFiParams
from coexfair.errors import NegativeRegion, NonIntegerRegion


# Relative slack when checking that T_d - DIFS is a whole number of slots.
_SLOT_RTOL = 1e-9


def delta_slots(t_d: float, difs: float, slot_sigma: float) -> int:
    """Number of backoff slots during which only Wi-Fi contends.

    Raises:
        NegativeRegion: if t_d < difs.
        NonIntegerRegion: if t_d - difs is not a multiple of slot_sigma.
    """
    if t_d < difs:
        raise NegativeRegion(f"defer period {t_d} us is shorter than DIFS {difs} us")

    slots = (t_d - difs) / slot_sigma
    rounded = round(slots)
    if not math.isclose(slots, rounded, rel_tol=_SLOT_RTOL, abs_tol=_SLOT_RTOL):
        raise NonIntegerRegion(
            f"T_d - DIFS = {t_d - difs} us is not a whole number of {slot_sigma} us slots"
        )

    return int(rounded)


def max_backoff_slots(wifi: WiFiParams, laa: LaaParams, delta_a: int) -> int:
    """Largest contention slot index reachable before some station must have fired."""
    return min(wifi.max_window - 1, laa.max_window - 1 + delta_a)


def frame_airtime(payload_bytes: float, rate: float) -> float:
    """Airtime of payload_bytes at rate Mbps."""
    return 8 * payload_bytes / rate


def control_frame_airtime(preamble_us: float, frame_bytes: float, rate_basic: float) -> float:
    """ACK / BAR / BA duration: fixed preamble plus the frame at the basic rate."""
    return preamble_us + frame_airtime(frame_bytes, rate_basic)


def wifi_frame_airtime(wifi: WiFiParams) -> float:
    """PhyH + MACH + Psize, the time a Wi-Fi winner holds the medium before acknowledgement."""
    return (
        wifi.phy_header_us
        + frame_airtime(wifi.mac_header_bytes, wifi.rate_data_mbps)
        + frame_airtime(wifi.payload_bytes, wifi.rate_data_mbps)
    )


def wifi_event_durations(wifi: WiFiParams) -> tuple[float, float]:
    """Wi-Fi success and collision durations (T_sw, T_cw).

    Basic access pays SIFS + ACK on success only; VHT A-MPDU exchanges BAR/BA and
    a collision occupies the medium exactly as long as a success.
    """
    frame = wifi_frame_airtime(wifi)

    if wifi.mode is WiFiMode.VHT:
        bar = control_frame_airtime(wifi.ack_preamble_us, wifi.bar_bytes, wifi.rate_basic_mbps)
        ba = control_frame_airtime(wifi.ack_preamble_us, wifi.ba_bytes, wifi.rate_basic_mbps)
        t_sw = frame + wifi.sifs_us + bar + wifi.sifs_us + ba + wifi.difs_us
        t_cw = t_sw
    else:
        ack = control_frame_airtime(wifi.ack_preamble_us, wifi.ack_bytes, wifi.rate_basic_mbps)
        t_sw = frame + wifi.sifs_us + ack + wifi.difs_us
        t_cw = frame + wifi.difs_us

    if wifi.include_prop_delay:
        t_sw += wifi.prop_delay_us
        t_cw += wifi.prop_delay_us

    return t_sw, t_cw


def laa_event_durations(laa: LaaParams) -> tuple[float, float]:
    """LAA success and collision durations: TXOP plus one LTE slot of alignment."""
    busy = laa.txop_us + laa.d_lte_us
    return busy, busy


def event_durations(wifi: WiFiParams, laa: LaaParams) -> EventDurations:
    t_sw, t_cw = wifi_event_durations(wifi)
    t_sl, t_cl = laa_event_durations(laa)
    return EventDurations(t_sw=t_sw, t_cw=t_cw, t_sl=t_sl, t_cl=t_cl)
