"""Single-variable sweeps and the registry of reproducible result figures."""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np

from coexfair.datamodels import FairnessMode, LaaParams, Scenario, SimConfig, WiFiParams
from coexfair.errors import ConfigError
from coexfair.fairness import optimize_fairness
from coexfair.fixedpoint import solve_coexistence
from coexfair.simulator import simulate
from coexfair.throughput import scenario_throughput
from coexfair.utils import parallel_map, write_table


logger = logging.getLogger(__name__)

COMMANDS = ("solve", "throughput", "fairness", "simulate")
FIGURE_PAIRS = range(1, 11)
PRIORITY_CLASSES = (1, 2, 3, 4)


def _set_pairs(scenario: Scenario, value: float, raw_table_td: bool) -> Scenario:
    return Scenario.pairs(int(value), wifi=scenario.wifi, laa=scenario.laa, solver=scenario.solver)


def _set_priority_class(scenario: Scenario, value: float, raw_table_td: bool) -> Scenario:
    laa = scenario.laa
    return Scenario(
        n_w=scenario.n_w,
        n_l=scenario.n_l,
        baseline_n=scenario.baseline_n,
        wifi=scenario.wifi,
        solver=scenario.solver,
        laa=LaaParams.from_priority_class(
            int(value), laa.direction, raw_table_td,
            e_l=laa.e_l, d_lte_us=laa.d_lte_us, rate_laa_mbps=laa.rate_laa_mbps, data_fraction=laa.data_fraction,
        ),
    )


SWEEP_AXES: dict[str, Callable[[Scenario, float, bool], Scenario]] = {
    "n_pairs": _set_pairs,
    "txop_us": lambda scenario, value, raw: scenario.with_txop(float(value)),
    "m_laa": lambda scenario, value, raw: scenario.with_laa(m_laa=int(value)),
    "priority_class": _set_priority_class,
    "rate_w": lambda scenario, value, raw: scenario.with_wifi(rate_data_mbps=float(value)),
    "rate_l": lambda scenario, value, raw: scenario.with_laa(rate_laa_mbps=float(value)),
}
INTEGER_AXES = ("n_pairs", "m_laa", "priority_class")


@dataclass(frozen=True)
class Task:
    """One evaluation of a scenario; picklable so sweeps can run on a process pool."""

    command: str
    scenario: Scenario
    mode: FairnessMode = FairnessMode.THREE_GPP
    seed: int = 0
    horizon_slots: int | None = None
    horizon_events: int | None = None
    warmup_events: int = 100
    extra: dict[str, Any] = field(default_factory=dict)


def evaluate(task: Task) -> dict[str, Any]:
    """Run one command on one scenario and return its output row."""
    if task.command == "solve":
        values = solve_coexistence(task.scenario).to_dict()
    elif task.command == "throughput":
        values = scenario_throughput(task.scenario).to_dict()
    elif task.command == "fairness":
        values = optimize_fairness(task.scenario, task.mode).to_dict()
    elif task.command == "simulate":
        values = simulate(SimConfig(
            scenario=task.scenario,
            seed=task.seed,
            horizon_slots=task.horizon_slots,
            horizon_events=task.horizon_events,
            warmup_events=task.warmup_events,
        )).to_dict()
    else:
        raise ConfigError(f"command should be one of {', '.join(COMMANDS)}, entered: {task.command}", "command")

    return {**task.extra, **values}


def axis_values(axis: str, start: float, stop: float, step: float) -> list[float]:
    """start, start + step, ... up to stop inclusive.

    Raises:
        ConfigError: for an unknown axis or a non-positive step.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis should be one of {', '.join(SWEEP_AXES)}, entered: {axis}", "--axis")
    if not step > 0:
        raise ConfigError(f"sweep step should be positive, entered: {step}", "--axis")

    values = np.arange(start, stop + step * 1e-9, step)
    values = np.round(values, 9)
    if axis in INTEGER_AXES:
        return [int(v) for v in values]
    return [float(v) for v in values]


def sweep(
    base: Task, axis: str, start: float, stop: float, step: float, raw_table_td: bool = False,
    workers: int | None = 1,
) -> list[dict[str, Any]]:
    """Evaluate base.command at every point of one axis; rows come back sorted by the axis value."""
    tasks = [
        Task(
            command=base.command,
            scenario=SWEEP_AXES[axis](base.scenario, value, raw_table_td),
            mode=base.mode,
            seed=base.seed,
            horizon_slots=base.horizon_slots,
            horizon_events=base.horizon_events,
            warmup_events=base.warmup_events,
            extra={axis: value},
        )
        for value in axis_values(axis, start, stop, step)
    ]
    logger.debug("sweeping %s over %d points with %s workers", axis, len(tasks), workers)
    rows = parallel_map(evaluate, tasks, workers)
    return sorted(rows, key=lambda row: row[axis])


@dataclass(frozen=True)
class Curve:
    label: str
    wifi: WiFiParams
    laa: LaaParams


@dataclass(frozen=True)
class Figure:
    number: int
    title: str
    mode: FairnessMode
    plot_columns: tuple[str, ...]
    curves: tuple[Curve, ...]


def _class_curves(wifi: WiFiParams, rate_laa_mbps: float, suffix: str = "", **laa_overrides) -> tuple[Curve, ...]:
    return tuple(
        Curve(
            label=f"class{priority_class}{suffix}",
            wifi=wifi,
            laa=LaaParams.from_priority_class(priority_class, rate_laa_mbps=rate_laa_mbps, **laa_overrides),
        )
        for priority_class in PRIORITY_CLASSES
    )


def _vht_curves() -> tuple[Curve, ...]:
    return tuple(
        curve
        for n_mpdu in (2, 4)
        for curve in _class_curves(WiFiParams.vht(n_mpdu=n_mpdu, rate_data_mbps=78.0), 70.2, f"_nmpdu{n_mpdu}")
    )


def _build_registry() -> dict[int, Figure]:
    low = _class_curves(WiFiParams.basic_access(9.0, 24.0), 7.8)
    high = _class_curves(WiFiParams.basic_access(54.0, 24.0), 70.2)
    access = _class_curves(WiFiParams.basic_access(9.0, 24.0), 7.8, e_l=1)
    vht = _vht_curves()

    gpp, prop = FairnessMode.THREE_GPP, FairnessMode.PROPORTIONAL
    per_user = ("per_user_w", "per_user_l", "per_user_wifi_only")
    figures = [
        Figure(6, "3GPP-fair LAA TXOP, 9/7.8 Mbps", gpp, ("optimized_txop",), low),
        Figure(7, "Wi-Fi per-user throughput under 3GPP fairness, 9/7.8 Mbps", gpp,
               ("per_user_w", "per_user_wifi_only"), low),
        Figure(8, "LAA per-user throughput under 3GPP fairness, 9/7.8 Mbps", gpp, ("per_user_l",), low),
        Figure(9, "Access-fair LAA retransmission stage, e_l = 1", FairnessMode.ACCESS, ("optimized_m_laa",), access),
        Figure(10, "Proportional-fair LAA TXOP, 9/7.8 Mbps", prop, ("optimized_txop",), low),
        Figure(11, "Per-user throughputs under proportional fairness, 9/7.8 Mbps", prop, per_user, low),
        Figure(12, "Proportional-fair LAA TXOP, 54/70.2 Mbps", prop, ("optimized_txop",), high),
        Figure(13, "Per-user throughputs under proportional fairness, 54/70.2 Mbps", prop, per_user, high),
        Figure(14, "VHT Wi-Fi per-user throughput under 3GPP fairness, 78/70.2 Mbps", gpp,
               ("per_user_w", "per_user_wifi_only"), vht),
        Figure(15, "VHT LAA per-user throughput under 3GPP fairness, 78/70.2 Mbps", gpp, ("per_user_l",), vht),
        Figure(16, "3GPP-fair LAA TXOP, 54/70.2 Mbps", gpp, ("optimized_txop",), high),
        Figure(17, "Per-user throughputs under 3GPP fairness, 54/70.2 Mbps", gpp, per_user, high),
        Figure(18, "VHT proportional-fair TXOP and per-user throughputs, 78/70.2 Mbps", prop,
               ("optimized_txop", *per_user), vht),
    ]
    return {figure.number: figure for figure in figures}


FIGURES = _build_registry()


def figure_rows(figure: Figure, curve: Curve, solver=None, workers: int | None = 1) -> list[dict[str, Any]]:
    """Fairness results of one curve for n = 1..10 pairs."""
    tasks = [
        Task(
            command="fairness",
            scenario=Scenario.pairs(
                n, wifi=curve.wifi, laa=curve.laa, **({"solver": solver} if solver is not None else {})
            ),
            mode=figure.mode,
            extra={"n_pairs": n, "n_w": n, "n_l": n, "baseline_n": 2 * n},
        )
        for n in FIGURE_PAIRS
    ]
    return sorted(parallel_map(evaluate, tasks, workers), key=lambda row: row["n_pairs"])


def reproduce_figure(
    number: int, out_dir: str | Path, fmt: str = "csv", solver=None, workers: int | None = 1
) -> list[Path]:
    """Write one table per curve of a registered figure into out_dir.

    Raises:
        ConfigError: if no figure has that number.
    """
    if number not in FIGURES:
        raise ConfigError(
            f"figure should be one of {', '.join(map(str, sorted(FIGURES)))}, entered: {number}", "figure"
        )

    figure = FIGURES[number]
    written = []
    for curve in figure.curves:
        rows = figure_rows(figure, curve, solver=solver, workers=workers)
        template = Scenario.pairs(
            1, wifi=curve.wifi, laa=curve.laa, **({"solver": solver} if solver is not None else {})
        )
        header = {
            "figure": figure.number,
            "title": figure.title,
            "curve": curve.label,
            "mode": figure.mode.value,
            "plot_columns": list(figure.plot_columns),
            "node_range": f"n_w = n_l = n for n in {min(FIGURE_PAIRS)}..{max(FIGURE_PAIRS)}, Wi-Fi-only baseline of 2n",
            "varying": ["n_w", "n_l", "baseline_n"],
            "scenario_template": template.to_dict(),
        }
        path = Path(out_dir) / f"figure{figure.number}_{curve.label}.{fmt}"
        written.append(write_table(rows, path, header, sweep_variable="n_pairs", fmt=fmt))
        logger.info("figure %d curve %s written to %s", figure.number, curve.label, path)

    return written
