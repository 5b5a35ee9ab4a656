"""Slot-level Monte Carlo simulation of saturated Wi-Fi DCF and LAA LBT stations.

The simulation follows the same slotted abstraction the analytic model uses:
perfect sensing, collisions only through simultaneous counter expiry. Instead
of stepping slot by slot, each iteration jumps straight to the next slot in
which some station fires. A Wi-Fi station with counter c fires c slots after
the channel frees up; an LAA station waits delta_a further slots for its
longer defer period. Every contention slot, idle or busy, decrements the
counters of the stations allowed to count in it.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import logging
import math
from pathlib import Path
from typing import Sequence

from numba import njit
import numpy as np
import pandas as pd

from coexfair.datamodels import EventKind, SimConfig, SimStats
from coexfair.errors import SimulationBatchError
from coexfair.fixedpoint import contention_geometry
from coexfair.timing import event_durations


__all__ = ["BATCH_COUNT", "EVENT_LOG_COLUMNS", "simulate", "simulate_batch"]

logger = logging.getLogger(__name__)

BATCH_COUNT = 20
EVENT_LOG_COLUMNS = ("model_time_us", "event_kind", "station_id", "duration_us")

_DRAW_BUFFER = 4096
_LOG_BUFFER = 65536

_DONE, _REFILL, _FLUSH = 0, 1, 2

# Accumulator layout.
_SLOTS, _LAA_SLOTS, _IDLE = 0, 1, 2
_WIFI_TX, _WIFI_COLLIDED, _LAA_TX, _LAA_COLLIDED = 3, 4, 5, 6
_WIFI_SUCCESS, _LAA_SUCCESS, _WIFI_COLLISION, _LAA_COLLISION, _CROSS_COLLISION = 7, 8, 9, 10, 11
_EVENTS = 12
_ACC_SIZE = 13


@njit(nogil=True, cache=True)
def _draw(u, pos, station, stage, w0, m):
    window = w0 * 2.0 ** min(stage, m)
    value = int(u[station, pos[station]] * window)
    pos[station] += 1
    return value


@njit(nogil=True, cache=True)
def _advance(
    delta_a, w0, m, w0_l, m_l, e_l,
    wifi_counter, wifi_stage, laa_counter, laa_stage,
    wifi_u, wifi_pos, laa_u, laa_pos,
    durations, slot, target, counts_slots, acc, clock,
    log_time, log_kind, log_station, log_duration, log_n, log_enabled,
):
    n_w = wifi_counter.shape[0]
    n_l = laa_counter.shape[0]
    wifi_last = m + 1
    laa_last = m_l + e_l

    while True:
        progress = acc[_SLOTS] if counts_slots else acc[_EVENTS]
        if progress >= target:
            return _DONE

        for i in range(n_w):
            if wifi_pos[i] >= wifi_u.shape[1]:
                return _REFILL
        for j in range(n_l):
            if laa_pos[j] >= laa_u.shape[1]:
                return _REFILL
        if log_enabled and log_n[0] + 2 > log_time.shape[0]:
            return _FLUSH

        k = 1 << 62
        for i in range(n_w):
            k = min(k, wifi_counter[i])
        for j in range(n_l):
            k = min(k, delta_a + laa_counter[j])

        wifi_fired = 0
        laa_fired = 0
        first = -1
        for i in range(n_w):
            if wifi_counter[i] == k:
                wifi_fired += 1
                if first < 0:
                    first = i
        for j in range(n_l):
            if delta_a + laa_counter[j] == k:
                laa_fired += 1
                if first < 0:
                    first = n_w + j

        if wifi_fired == 1 and laa_fired == 0:
            kind, index = _WIFI_SUCCESS, 0
        elif wifi_fired > 1 and laa_fired == 0:
            kind, index = _WIFI_COLLISION, 1
        elif wifi_fired == 0 and laa_fired == 1:
            kind, index = _LAA_SUCCESS, 2
        elif wifi_fired == 0:
            kind, index = _LAA_COLLISION, 3
        else:
            kind, index = _CROSS_COLLISION, 4
        busy = durations[index]

        if log_enabled:
            n = log_n[0]
            if k > 0:
                log_time[n] = clock[0]
                log_kind[n] = 0
                log_station[n] = -1
                log_duration[n] = k * slot
                n += 1
            log_time[n] = clock[0] + k * slot
            log_kind[n] = kind - _WIFI_SUCCESS + 1
            log_station[n] = first
            log_duration[n] = busy
            log_n[0] = n + 1

        laa_counted = max(0, k - delta_a + 1)
        wifi_collided = wifi_fired > 1 or laa_fired > 0
        laa_collided = laa_fired > 1 or wifi_fired > 0

        for i in range(n_w):
            if wifi_counter[i] == k:
                if wifi_collided:
                    wifi_stage[i] = 0 if wifi_stage[i] == wifi_last else wifi_stage[i] + 1
                else:
                    wifi_stage[i] = 0
                wifi_counter[i] = _draw(wifi_u, wifi_pos, i, wifi_stage[i], w0, m)
            else:
                wifi_counter[i] -= k + 1

        for j in range(n_l):
            if delta_a + laa_counter[j] == k:
                if laa_collided:
                    laa_stage[j] = 0 if laa_stage[j] == laa_last else laa_stage[j] + 1
                else:
                    laa_stage[j] = 0
                laa_counter[j] = _draw(laa_u, laa_pos, j, laa_stage[j], w0_l, m_l)
            else:
                laa_counter[j] -= laa_counted

        acc[_SLOTS] += k + 1
        acc[_LAA_SLOTS] += laa_counted
        acc[_IDLE] += k
        acc[_WIFI_TX] += wifi_fired
        acc[_LAA_TX] += laa_fired
        if wifi_collided:
            acc[_WIFI_COLLIDED] += wifi_fired
        if laa_collided:
            acc[_LAA_COLLIDED] += laa_fired
        acc[kind] += 1
        acc[_EVENTS] += 1
        clock[0] += k * slot + busy


_KERNEL_KIND = {
    _WIFI_SUCCESS: EventKind.WIFI_SUCCESS,
    _LAA_SUCCESS: EventKind.LAA_SUCCESS,
    _WIFI_COLLISION: EventKind.WIFI_COLLISION,
    _LAA_COLLISION: EventKind.LAA_COLLISION,
    _CROSS_COLLISION: EventKind.CROSS_COLLISION,
}


class _EventLogWriter:
    """Appends flushed kernel log buffers to a line-delimited CSV file."""

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path else None
        self.header = True
        size = _LOG_BUFFER if self.path else 2
        self.time = np.zeros(size)
        self.kind = np.zeros(size, dtype=np.int64)
        self.station = np.zeros(size, dtype=np.int64)
        self.duration = np.zeros(size)
        self.count = np.zeros(1, dtype=np.int64)
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("")

    @property
    def enabled(self) -> bool:
        return self.path is not None

    def flush(self) -> None:
        n = int(self.count[0])
        if not self.enabled or n == 0:
            return

        frame = pd.DataFrame({
            "model_time_us": self.time[:n],
            "event_kind": [EventKind(kind).label for kind in self.kind[:n]],
            "station_id": self.station[:n],
            "duration_us": self.duration[:n],
        }, columns=list(EVENT_LOG_COLUMNS))
        frame.to_csv(self.path, mode="a", header=self.header, index=False, float_format="%.6f")
        self.header = False
        self.count[0] = 0


class _Run:
    """Mutable state of one simulation: station counters, random buffers and accumulators."""

    def __init__(self, config: SimConfig):
        scenario = config.scenario
        wifi, laa = scenario.wifi, scenario.laa
        self.config = config
        self.delta_a, _ = contention_geometry(scenario)
        times = event_durations(wifi, laa)
        self.durations = np.array([times.t_sw, times.t_cw, times.t_sl, times.t_cl, times.t_cc])
        self.slot = float(wifi.slot_us)

        wifi_root, laa_root = np.random.SeedSequence(int(config.seed)).spawn(2)
        self.wifi_rng = [np.random.Generator(np.random.PCG64(s)) for s in wifi_root.spawn(scenario.n_w)]
        self.laa_rng = [np.random.Generator(np.random.PCG64(s)) for s in laa_root.spawn(scenario.n_l)]

        self.wifi_u = np.empty((scenario.n_w, _DRAW_BUFFER))
        self.laa_u = np.empty((scenario.n_l, _DRAW_BUFFER))
        self.wifi_pos = np.full(scenario.n_w, _DRAW_BUFFER, dtype=np.int64)
        self.laa_pos = np.full(scenario.n_l, _DRAW_BUFFER, dtype=np.int64)
        self._refill()

        self.wifi_stage = np.zeros(scenario.n_w, dtype=np.int64)
        self.laa_stage = np.zeros(scenario.n_l, dtype=np.int64)
        self.wifi_counter = np.array(
            [self._first_draw(self.wifi_u, self.wifi_pos, i, wifi.w0) for i in range(scenario.n_w)], dtype=np.int64
        )
        self.laa_counter = np.array(
            [self._first_draw(self.laa_u, self.laa_pos, j, laa.w0_laa) for j in range(scenario.n_l)], dtype=np.int64
        )

        self.acc = np.zeros(_ACC_SIZE)
        self.clock = np.zeros(1)
        self.log = _EventLogWriter(None)

    @staticmethod
    def _first_draw(u: np.ndarray, pos: np.ndarray, station: int, w0: int) -> int:
        value = int(u[station, pos[station]] * w0)
        pos[station] += 1
        return value

    def _refill(self) -> None:
        for rng, u, pos in ((self.wifi_rng, self.wifi_u, self.wifi_pos), (self.laa_rng, self.laa_u, self.laa_pos)):
            for station in np.flatnonzero(pos >= _DRAW_BUFFER):
                u[station] = rng[station].random(_DRAW_BUFFER)
                pos[station] = 0

    def advance(self, target: float, counts_slots: bool) -> None:
        wifi, laa = self.config.scenario.wifi, self.config.scenario.laa

        while True:
            status = _advance(
                self.delta_a, wifi.w0, wifi.m, laa.w0_laa, laa.m_laa, laa.e_l,
                self.wifi_counter, self.wifi_stage, self.laa_counter, self.laa_stage,
                self.wifi_u, self.wifi_pos, self.laa_u, self.laa_pos,
                self.durations, self.slot, float(target), counts_slots, self.acc, self.clock,
                self.log.time, self.log.kind, self.log.station, self.log.duration, self.log.count, self.log.enabled,
            )
            if status == _DONE:
                return
            if status == _REFILL:
                logger.debug("refilling random buffers at event %d", int(self.acc[_EVENTS]))
                self._refill()
            else:
                self.log.flush()

    def warm_up(self) -> None:
        if self.config.warmup_events:
            self.advance(self.config.warmup_events, counts_slots=False)
        self.acc[:] = 0.0
        self.clock[:] = 0.0
        self.log = _EventLogWriter(self.config.event_log)


def _estimates(acc: np.ndarray, config: SimConfig, durations: np.ndarray, slot: float) -> dict[str, float]:
    scenario = config.scenario
    wifi, laa = scenario.wifi, scenario.laa
    counts = acc[[_WIFI_SUCCESS, _WIFI_COLLISION, _LAA_SUCCESS, _LAA_COLLISION, _CROSS_COLLISION]]
    elapsed = acc[_IDLE] * slot + float(np.dot(counts, durations))

    def ratio(num: float, den: float) -> float:
        return num / den if den > 0 else 0.0

    return dict(
        tau_hat_w=ratio(acc[_WIFI_TX], scenario.n_w * acc[_SLOTS]),
        tau_hat_l=ratio(acc[_LAA_TX], scenario.n_l * acc[_LAA_SLOTS]),
        p_cw_hat=ratio(acc[_WIFI_COLLIDED], acc[_WIFI_TX]),
        p_cl_hat=ratio(acc[_LAA_COLLIDED], acc[_LAA_TX]),
        tput_hat_w=ratio(acc[_WIFI_SUCCESS] * wifi.payload_bits, elapsed),
        tput_hat_l=ratio(acc[_LAA_SUCCESS] * float(laa.data_fraction) * laa.txop_us * laa.rate_laa_mbps, elapsed),
        elapsed_model_time=elapsed,
    )


def simulate(config: SimConfig) -> SimStats:
    """Run one Monte Carlo simulation.

    The run first discards `warmup_events` transmission events, then splits the
    horizon into BATCH_COUNT consecutive batches whose spread gives the
    standard errors. Identical configs yield bit-identical stats.
    """
    run = _Run(config)
    run.warm_up()

    snapshots = []
    for batch in range(1, BATCH_COUNT + 1):
        run.advance(math.ceil(config.horizon * batch / BATCH_COUNT), config.counts_slots)
        snapshots.append(run.acc.copy())
    run.log.flush()

    totals = _estimates(run.acc, config, run.durations, run.slot)
    previous = np.zeros(_ACC_SIZE)
    per_batch = []
    for snapshot in snapshots:
        per_batch.append(_estimates(snapshot - previous, config, run.durations, run.slot))
        previous = snapshot

    stderr = {
        name: float(np.std([batch[name] for batch in per_batch], ddof=1) / math.sqrt(BATCH_COUNT))
        for name in totals if name != "elapsed_model_time"
    }

    acc = run.acc
    events = {
        EventKind.IDLE.label: int(acc[_IDLE]),
        **{kind.label: int(acc[index]) for index, kind in _KERNEL_KIND.items()},
    }
    logger.debug("simulated %d events over %d contention slots", int(acc[_EVENTS]), int(acc[_SLOTS]))

    return SimStats(
        events=events,
        contention_slots=int(acc[_SLOTS]),
        laa_slots=int(acc[_LAA_SLOTS]),
        stderr=stderr,
        **totals,
    )


def _simulate_indexed(index: int, config: SimConfig) -> SimStats:
    try:
        return simulate(config)
    except Exception as error:
        raise SimulationBatchError(index, error) from error


def simulate_batch(configs: Sequence[SimConfig], workers: int | None = None) -> list[SimStats]:
    """Simulate every config on a thread pool; element i depends only on configs[i].

    Raises:
        ValueError: if configs is empty.
        SimulationBatchError: for the first failing element, carrying its index.
    """
    if not configs:
        raise ValueError("simulation batch should not be empty")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_simulate_indexed, range(len(configs)), configs))
