"""Saturation throughput of the coexistence network and of the Wi-Fi-only baseline."""
from __future__ import annotations

from coexfair.datamodels import ContentionSolution, EventDurations, Scenario, ThroughputReport, WiFiParams
from coexfair.fixedpoint import solve_coexistence, solve_wifi_only
from coexfair.timing import event_durations, laa_event_durations, wifi_event_durations


__all__ = [
    "coexistence_throughput",
    "laa_event_durations",
    "scenario_throughput",
    "tx_and_success_probs",
    "wifi_event_durations",
    "wifi_only_throughput",
]


def _success_given_transmission(tau: float, n: int) -> tuple[float, float]:
    """(P_tr, P_s) for n stations attempting with probability tau; P_s is 0 when nobody can transmit."""
    if n == 0:
        return 0.0, 0.0

    p_tr = 1.0 - (1.0 - tau) ** n
    if n == 1 and p_tr > 0:
        return p_tr, 1.0
    p_s = n * tau * (1.0 - tau) ** (n - 1) / p_tr if p_tr > 0 else 0.0
    return p_tr, p_s


def tx_and_success_probs(sol: ContentionSolution, n_w: int, n_l: int) -> tuple[float, float, float, float]:
    """(P_trw, P_trl, P_sw, P_sl) for a solved contention state."""
    p_trw, p_sw = _success_given_transmission(sol.tau_w, n_w)
    p_trl, p_sl = _success_given_transmission(sol.tau_l, n_l)
    return p_trw, p_trl, p_sw, p_sl


def _shared_region_time(
    p_trw: float, p_trl: float, p_sw: float, p_sl: float, slot: float, times: EventDurations
) -> float:
    """Expected slot length when both technologies contend.

    The four events where at least one Wi-Fi and at least one LAA station fire
    are kept as separate terms; they all last T_cc.
    """
    idle = (1 - p_trw) * (1 - p_trl) * slot
    wifi_success = p_trw * p_sw * (1 - p_trl) * times.t_sw
    laa_success = p_trl * p_sl * (1 - p_trw) * times.t_sl
    wifi_collision = p_trw * (1 - p_sw) * (1 - p_trl) * times.t_cw
    laa_collision = p_trl * (1 - p_sl) * (1 - p_trw) * times.t_cl
    cross = (
        p_trw * p_sw * p_trl * p_sl
        + p_trw * p_sw * p_trl * (1 - p_sl)
        + p_trw * (1 - p_sw) * p_trl * p_sl
        + p_trw * (1 - p_sw) * p_trl * (1 - p_sl)
    ) * times.t_cc
    return idle + wifi_success + laa_success + wifi_collision + laa_collision + cross


def _wifi_region_time(p_trw: float, p_sw: float, slot: float, t_sw: float, t_cw: float) -> float:
    return (1 - p_trw) * slot + p_trw * p_sw * t_sw + p_trw * (1 - p_sw) * t_cw


def wifi_only_throughput(n: int, wifi: WiFiParams, damping: float = 0.5, tol: float = 1e-10,
                         max_iter: int = 10_000) -> float:
    """Aggregate throughput (Mbps) of n saturated DCF stations sharing the channel alone.

    Psize * r_w is the payload in bits, so the payload bits are used directly.
    """
    tau, _ = solve_wifi_only(n, wifi.w0, wifi.m, damping=damping, tol=tol, max_iter=max_iter)
    p_tr, p_s = _success_given_transmission(tau, n)
    t_sw, t_cw = wifi_event_durations(wifi)
    return p_tr * p_s * wifi.payload_bits / _wifi_region_time(p_tr, p_s, wifi.slot_us, t_sw, t_cw)


def coexistence_throughput(scenario: Scenario, sol: ContentionSolution) -> ThroughputReport:
    """Wi-Fi and LAA throughputs for a solved scenario, with the Wi-Fi-only baseline alongside."""
    wifi, laa, solver = scenario.wifi, scenario.laa, scenario.solver
    times = event_durations(wifi, laa)
    p_trw, p_trl, p_sw, p_sl = tx_and_success_probs(sol, scenario.n_w, scenario.n_l)

    t_e1 = _wifi_region_time(p_trw, p_sw, wifi.slot_us, times.t_sw, times.t_cw)
    t_e2 = _shared_region_time(p_trw, p_trl, p_sw, p_sl, wifi.slot_us, times)
    t_e = sol.p_a1 * t_e1 + sol.p_a2 * t_e2

    wifi_successes = sol.p_a1 * p_trw * p_sw + sol.p_a2 * p_trw * p_sw * (1 - p_trl)
    tput_w = wifi_successes * wifi.payload_bits / t_e

    laa_data_us = float(laa.data_fraction) * laa.txop_us
    tput_l = sol.p_a2 * p_trl * p_sl * (1 - p_trw) * laa_data_us * laa.rate_laa_mbps / t_e

    tput_wo = wifi_only_throughput(
        scenario.baseline_n, wifi, damping=solver.damping, tol=solver.tol, max_iter=solver.max_iter
    )

    return ThroughputReport(
        tput_w=tput_w,
        tput_l=tput_l,
        tput_wifi_only=tput_wo,
        per_user_w=tput_w / scenario.n_w,
        per_user_l=tput_l / scenario.n_l if scenario.n_l else 0.0,
        per_user_wifi_only=tput_wo / scenario.baseline_n,
        p_trw=p_trw,
        p_trl=p_trl,
        p_sw=p_sw,
        p_sl=p_sl,
        t_e1=t_e1,
        t_e2=t_e2,
        t_e=t_e,
    )


def scenario_throughput(scenario: Scenario) -> ThroughputReport:
    """Solve the contention model and evaluate throughput in one call."""
    return coexistence_throughput(scenario, solve_coexistence(scenario))
