"""Tuning one LAA parameter for 3GPP, access or proportional fairness.

TXOP searches run a coarse grid over the whole interval and then a fine grid
around the best coarse point; no convexity is assumed. Ties go to the smallest
parameter value.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Iterable
import warnings

import numpy as np
from scipy.optimize import OptimizeResult

from coexfair.datamodels import ContentionSolution, FairnessMode, FairnessResult, Scenario
from coexfair.errors import ObjectiveUndefined
from coexfair.fixedpoint import solve_coexistence, solve_wifi_only
from coexfair.throughput import coexistence_throughput, scenario_throughput, wifi_only_throughput


logger = logging.getLogger(__name__)


def _grid(low: float, high: float, step: float) -> np.ndarray:
    """low, low + step, ... up to high, with high always included."""
    count = int(math.floor((high - low) / step + 1e-9))
    points = low + step * np.arange(count + 1)
    if points[-1] < high - 1e-9:
        points = np.append(points, high)
    return points


def grid_search(
    func: Callable[[float], float], candidates: Iterable[float], maximize: bool = False,
    evaluated: dict[float, float] | None = None,
) -> OptimizeResult:
    """Evaluate func on every candidate and return the best one as an OptimizeResult.

    `evaluated` memoises values across calls; the trace holds every evaluated
    point sorted by the variable.
    """
    evaluated = {} if evaluated is None else evaluated
    nfev = 0

    for x in candidates:
        x = float(x)
        if x not in evaluated:
            evaluated[x] = func(x)
            nfev += 1

    trace = sorted(evaluated.items())
    values = np.array([value for _, value in trace])
    best = int(np.argmax(values)) if maximize else int(np.argmin(values))

    x_best, f_best = trace[best]
    success = bool(np.isfinite(f_best))

    return OptimizeResult(
        x=x_best, fun=f_best, nfev=nfev, trace=trace, success=success, status=0 if success else 1,
        message="Grid complete" if success else "Objective undefined on the whole grid",
    )


def refine_search(
    func: Callable[[float], float], low: float, high: float, coarse: float, fine: float, maximize: bool = False,
    coarse_start: float | None = None,
) -> OptimizeResult:
    """Coarse grid over [coarse_start or low, high], then a fine grid within one coarse step of its optimum.

    The fine grid is clipped to [low, high].
    """
    evaluated: dict[float, float] = {}
    start = low if coarse_start is None else coarse_start
    coarse_result = grid_search(func, _grid(start, high, coarse), maximize=maximize, evaluated=evaluated)

    center = coarse_result.x
    fine_low, fine_high = max(low, center - coarse), min(high, center + coarse)
    result = grid_search(func, _grid(fine_low, fine_high, fine), maximize=maximize, evaluated=evaluated)
    result.nfev += coarse_result.nfev

    logger.debug("coarse optimum %.1f refined to %.1f after %d evaluations", center, result.x, result.nfev)
    return result


def _txop_search(scenario: Scenario, func: Callable[[float], float], exclude_zero: bool, maximize: bool):
    solver = scenario.solver

    if solver.snap_txop_grid:
        step = scenario.laa.d_lte_us
        candidates = _grid(step if exclude_zero else 0.0, solver.txop_max_us, step)
        return grid_search(func, candidates, maximize=maximize)

    if exclude_zero:
        return refine_search(
            func, solver.grid_fine_us, solver.txop_max_us, solver.grid_coarse_us, solver.grid_fine_us, maximize,
            coarse_start=solver.grid_coarse_us,
        )
    return refine_search(func, 0.0, solver.txop_max_us, solver.grid_coarse_us, solver.grid_fine_us, maximize)


def _per_user_residual(scenario: Scenario, sol: ContentionSolution, target: float, txop: float) -> float:
    report = coexistence_throughput(scenario.with_txop(txop), sol)
    return abs(target - report.per_user_w)


def per_user_residual(scenario: Scenario, txop: float) -> float:
    """|Tput_wo/N - Tput_w/n_w| with the LAA TXOP set to `txop` microseconds."""
    report = coexistence_throughput(scenario.with_txop(txop), solve_coexistence(scenario))
    return abs(report.per_user_wifi_only - report.per_user_w)


def fairness_3gpp(scenario: Scenario) -> FairnessResult:
    """TXOP that makes a Wi-Fi station in coexistence match a station of the N-node Wi-Fi-only network.

    T_D = 0 is part of the domain; when it is optimal the LAA network carries no
    data, so the reported throughputs are those of the Wi-Fi network alone.
    """
    solver = scenario.solver
    sol = solve_coexistence(scenario)
    target = wifi_only_throughput(
        scenario.baseline_n, scenario.wifi, damping=solver.damping, tol=solver.tol, max_iter=solver.max_iter
    ) / scenario.baseline_n

    result = _txop_search(
        scenario, lambda txop: _per_user_residual(scenario, sol, target, txop), exclude_zero=False, maximize=False
    )
    txop = result.x
    silenced = txop == 0.0

    if silenced:
        report = scenario_throughput(scenario.with_txop(0.0).without_laa())
    else:
        report = coexistence_throughput(scenario.with_txop(txop), sol)

    logger.debug("3GPP fairness: txop %.1f us, residual %.3e", txop, result.fun)
    return FairnessResult(
        mode=FairnessMode.THREE_GPP,
        optimized_txop=txop,
        objective_at_opt=result.fun,
        boundary_hit=txop in (0.0, solver.txop_max_us),
        report=report,
        grid_trace=tuple(result.trace),
        degenerate=scenario.n_l == 0,
        laa_silenced=silenced,
    )


def fairness_access(scenario: Scenario) -> FairnessResult:
    """Maximum LAA retransmission stage m' equalising Wi-Fi access with the Wi-Fi-only network.

    Each candidate m' is solved afresh. When the objective flattens out within
    plateau_tol all the way to the search cap, the cap is reported: the gap keeps
    shrinking with m' but below the solver tolerance.
    """
    solver = scenario.solver
    tau_n, _ = solve_wifi_only(
        scenario.baseline_n, scenario.wifi.w0, scenario.wifi.m,
        damping=solver.damping, tol=solver.tol, max_iter=solver.max_iter,
    )

    def objective(m_laa: float) -> float:
        return abs(tau_n - solve_coexistence(scenario.with_laa(m_laa=int(m_laa))).tau_w)

    degenerate = scenario.n_l == 0
    cap = solver.m_laa_search_cap
    candidates = [0] if degenerate else range(cap + 1)
    result = grid_search(objective, candidates)

    m_laa, value = int(result.x), result.fun
    if not degenerate and m_laa != cap:
        cap_value = dict(result.trace)[float(cap)]
        if cap_value <= value + solver.plateau_tol:
            warnings.warn(
                f"access objective is flat within {solver.plateau_tol:g} from m'={m_laa} to the cap {cap}, "
                "reporting the cap"
            )
            m_laa, value = cap, cap_value

    tuned = scenario.with_laa(m_laa=m_laa)
    return FairnessResult(
        mode=FairnessMode.ACCESS,
        optimized_m_laa=m_laa,
        objective_at_opt=value,
        boundary_hit=not degenerate and m_laa == cap,
        report=coexistence_throughput(tuned, solve_coexistence(tuned)),
        grid_trace=tuple(result.trace),
        degenerate=degenerate,
    )


def _log_product(tput_w: float, tput_l: float) -> float:
    if tput_w <= 0 or tput_l <= 0:
        return -math.inf
    return math.log(tput_w) + math.log(tput_l)


def fairness_proportional(scenario: Scenario) -> FairnessResult:
    """TXOP maximising log(Tput_w) + log(Tput_l) over (0, txop_max].

    Raises:
        ObjectiveUndefined: if either network has zero throughput at every evaluated TXOP.
    """
    if scenario.n_l == 0:
        raise ObjectiveUndefined("proportional fairness needs at least one LAA station")

    solver = scenario.solver
    sol = solve_coexistence(scenario)

    def objective(txop: float) -> float:
        report = coexistence_throughput(scenario.with_txop(txop), sol)
        return _log_product(report.tput_w, report.tput_l)

    result = _txop_search(scenario, objective, exclude_zero=True, maximize=True)
    if not result.success:
        raise ObjectiveUndefined("throughput of one network is zero over the whole TXOP range")

    txop = result.x
    lowest = scenario.laa.d_lte_us if solver.snap_txop_grid else solver.grid_fine_us
    logger.debug("proportional fairness: txop %.1f us, log-utility %.6f", txop, result.fun)
    return FairnessResult(
        mode=FairnessMode.PROPORTIONAL,
        optimized_txop=txop,
        objective_at_opt=result.fun,
        boundary_hit=txop in (lowest, solver.txop_max_us),
        report=coexistence_throughput(scenario.with_txop(txop), sol),
        grid_trace=tuple(result.trace),
    )


FAIRNESS_SOLVERS: dict[FairnessMode, Callable[[Scenario], FairnessResult]] = {
    FairnessMode.THREE_GPP: fairness_3gpp,
    FairnessMode.ACCESS: fairness_access,
    FairnessMode.PROPORTIONAL: fairness_proportional,
}


def optimize_fairness(scenario: Scenario, mode: FairnessMode | str) -> FairnessResult:
    """Dispatch to the solver of one fairness criterion."""
    return FAIRNESS_SOLVERS[FairnessMode(mode)](scenario)
