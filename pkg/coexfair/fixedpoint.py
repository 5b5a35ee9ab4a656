"""Coupled access / collision probabilities of Wi-Fi and LAA stations.

The LAA defer period exceeds DIFS by delta_a backoff slots, so every busy
period is followed by delta_a slots in which only Wi-Fi stations count down
(region 1) before both technologies contend (region 2).
"""
from __future__ import annotations

from functools import lru_cache
import logging
from typing import Callable, Iterable
import warnings

import numpy as np

from coexfair.datamodels import ContentionSolution, Scenario
from coexfair.errors import DomainError, NoConvergence
from coexfair.timing import delta_slots, max_backoff_slots


logger = logging.getLogger(__name__)

# Two solutions closer than this (max-abs over tau_w, tau_l) are the same fixed point.
DISTINCT_FIXED_POINT_GAP = 1e-6
STALL_WINDOW = 5
MIN_DAMPING = 2.0 ** -10


def _check_probability(name: str, p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise DomainError(f"{name} should lie in [0, 1), entered: {p}")


def _geometric_sum(ratio: float, count: int) -> float:
    """sum_{k=0}^{count-1} ratio**k."""
    if count <= 0:
        return 0.0
    if ratio == 1.0:
        return float(count)
    return (1.0 - ratio**count) / (1.0 - ratio)


def backoff_access_probability(p: float, w0: int, m: int, retries_at_max: int) -> float:
    """Per-slot attempt probability of a saturated BEB station.

    Stages 0..m double the window from w0; the station then retries
    `retries_at_max` more times at the largest window before resetting. The
    window terms are summed as finite series, which equals the closed form at
    2p = 1 where the closed form is 0/0.

    Raises:
        DomainError: if p is outside [0, 1).
    """
    _check_probability("collision probability", p)

    last_stage = m + retries_at_max
    doubling = sum((2.0 * p) ** k for k in range(m + 1))
    plateau = 2.0**m * sum(p**j for j in range(m + 1, last_stage + 1))
    weight = w0 * (doubling + plateau) * (1.0 - p) / (1.0 - p ** (last_stage + 1))
    return 2.0 / (weight + 1.0)


def tau_wifi(p_cw: float, w0: int, m: int) -> float:
    """Wi-Fi access probability; DCF keeps one extra attempt at stage m."""
    return backoff_access_probability(p_cw, w0, m, retries_at_max=1)


def tau_laa(p_cl: float, w0_laa: int, m_laa: int, e_l: int) -> float:
    """LAA access probability; LBT retries e_l times at the largest window."""
    if not 1 <= e_l <= 8:
        raise DomainError(f"e_l should be in 1..8, entered: {e_l}")
    return backoff_access_probability(p_cl, w0_laa, m_laa, retries_at_max=e_l)


def collision_probs(tau_w: float, tau_l: float, n_w: int, n_l: int) -> tuple[float, float, float]:
    """Collision probabilities (P_cw,1, P_cw,2, P_cl) seen by a transmitting station.

    With n_l = 0 the LAA exponent is clamped at zero, i.e. P_cl is what a single
    LAA node would face against the Wi-Fi network.
    """
    wifi_others_idle = (1.0 - tau_w) ** (n_w - 1)
    p_cw1 = 1.0 - wifi_others_idle
    p_cw2 = 1.0 - wifi_others_idle * (1.0 - tau_l) ** n_l
    p_cl = 1.0 - (1.0 - tau_l) ** max(n_l - 1, 0) * (1.0 - tau_w) ** n_w
    return p_cw1, p_cw2, p_cl


def idle_probs(tau_w: float, tau_l: float, n_w: int, n_l: int) -> tuple[float, float]:
    """Idle-slot probabilities in the Wi-Fi-only region and in the shared region."""
    p_i1 = (1.0 - tau_w) ** n_w
    p_i2 = p_i1 * (1.0 - tau_l) ** n_l
    return p_i1, p_i2


def region_weights(p_i1: float, p_i2: float, delta_a: int, big_m: int) -> tuple[float, float, float]:
    """Normalising constant c0 and the probabilities that a contention slot falls in region 1 / 2.

    Raises:
        DomainError: if delta_a > big_m or an idle probability is outside [0, 1).
    """
    _check_probability("p_i1", p_i1)
    _check_probability("p_i2", p_i2)
    if not 0 <= delta_a <= big_m:
        raise DomainError(f"delta_a should be in [0, M={big_m}], entered: {delta_a}")

    first = _geometric_sum(p_i1, delta_a + 1)
    second = p_i1**delta_a * p_i2 * _geometric_sum(p_i2, big_m - delta_a)
    c0 = 1.0 / (first + second)
    p_a1 = c0 * _geometric_sum(p_i1, delta_a)
    return c0, p_a1, 1.0 - p_a1


def contention_slot_distribution(p_i1: float, p_i2: float, delta_a: int, big_m: int) -> np.ndarray:
    """Stationary weights c_0..c_M of the contention-slot chain."""
    c0, _, _ = region_weights(p_i1, p_i2, delta_a, big_m)
    k = np.arange(big_m + 1)
    first = p_i1 ** np.minimum(k, delta_a)
    second = p_i2 ** np.maximum(k - delta_a, 0)
    return c0 * first * second


def _coexistence_map(
    tau_w: float, tau_l: float, n_w: int, n_l: int, w0: int, m: int, w0_laa: int, m_laa: int, e_l: int,
    delta_a: int, big_m: int,
) -> dict[str, float]:
    p_cw1, p_cw2, p_cl = collision_probs(tau_w, tau_l, n_w, n_l)
    p_i1, p_i2 = idle_probs(tau_w, tau_l, n_w, n_l)
    c0, p_a1, p_a2 = region_weights(p_i1, p_i2, delta_a, big_m)
    p_cw = p_a1 * p_cw1 + p_a2 * p_cw2

    return dict(
        tau_w=tau_wifi(p_cw, w0, m),
        tau_l=tau_laa(p_cl, w0_laa, m_laa, e_l),
        p_cw=p_cw,
        p_cl=p_cl,
        p_cw1=p_cw1,
        p_cw2=p_cw2,
        p_i1=p_i1,
        p_i2=p_i2,
        c0=c0,
        p_a1=p_a1,
        p_a2=p_a2,
    )


def damped_iteration(
    update: Callable[[tuple[float, ...]], tuple[float, ...]],
    start: tuple[float, ...],
    damping: float,
    tol: float,
    max_iter: int,
) -> tuple[tuple[float, ...], int, float]:
    """Iterate x <- (1 - damping) x + damping F(x) until max|F(x) - x| <= tol.

    The damping factor is halved, down to MIN_DAMPING, whenever the residual has
    not improved on its best value for STALL_WINDOW consecutive evaluations, which
    turns the 2-cycles seen with small LAA windows into convergence.

    Returns the accepted point x (not the damped step after it), the number of
    map evaluations and the residual at x.

    Raises:
        NoConvergence: if max_iter evaluations do not reach tol.
    """
    x = tuple(start)
    residual = best = float("inf")
    stalled = 0

    for iteration in range(1, max_iter + 1):
        fx = update(x)
        residual = max(abs(new - old) for new, old in zip(fx, x))
        if residual <= tol:
            logger.debug("fixed point reached after %d iterations, residual %.3e", iteration, residual)
            return x, iteration, residual

        if residual < best:
            best, stalled = residual, 0
        else:
            stalled += 1
        if stalled >= STALL_WINDOW and damping > MIN_DAMPING:
            damping = max(damping / 2.0, MIN_DAMPING)
            best, stalled = residual, 0
            logger.debug(
                "residual stalled at %.3e after %d iterations, damping lowered to %g", residual, iteration, damping
            )

        x = tuple((1.0 - damping) * old + damping * new for new, old in zip(fx, x))

    raise NoConvergence(max_iter, residual)


def contention_geometry(scenario: Scenario) -> tuple[int, int]:
    """(delta_a, M) of a scenario."""
    wifi, laa = scenario.wifi, scenario.laa
    delta_a = delta_slots(laa.t_d_us, wifi.difs_us, wifi.slot_us)
    return delta_a, max_backoff_slots(wifi, laa, delta_a)


@lru_cache(maxsize=8192)
def _solve_coexistence(
    n_w: int, n_l: int, w0: int, m: int, w0_laa: int, m_laa: int, e_l: int, delta_a: int, big_m: int,
    damping: float, tol: float, max_iter: int, start: tuple[float, float] | None,
) -> ContentionSolution:
    def step(x: tuple[float, ...]) -> tuple[float, float]:
        values = _coexistence_map(x[0], x[1], n_w, n_l, w0, m, w0_laa, m_laa, e_l, delta_a, big_m)
        return values["tau_w"], values["tau_l"]

    if start is None:
        start = (2.0 / (w0 + 1), 2.0 / (w0_laa + 1))

    (tau_w, tau_l), iterations, residual = damped_iteration(step, start, damping, tol, max_iter)
    values = _coexistence_map(tau_w, tau_l, n_w, n_l, w0, m, w0_laa, m_laa, e_l, delta_a, big_m)
    values.update(tau_w=tau_w, tau_l=tau_l)

    return ContentionSolution(delta_a=delta_a, big_m=big_m, iterations=iterations, residual=residual, **values)


def solve_coexistence(scenario: Scenario, start: tuple[float, float] | None = None) -> ContentionSolution:
    """Joint fixed point of the Wi-Fi and LAA access probabilities.

    The contention model depends only on node counts, windows, retry limits and
    the region geometry; TXOP and rates do not enter, so solutions are cached on
    those inputs.

    Args:
        scenario: Scenario to solve.
        start: Optional (tau_w, tau_l) start; defaults to the zero-collision point.

    Raises:
        NegativeRegion, NonIntegerRegion: if T_d does not sit a whole number of slots above DIFS.
        NoConvergence: if the iteration budget is exhausted.
    """
    wifi, laa, solver = scenario.wifi, scenario.laa, scenario.solver
    delta_a, big_m = contention_geometry(scenario)

    return _solve_coexistence(
        scenario.n_w, scenario.n_l, wifi.w0, wifi.m, laa.w0_laa, laa.m_laa, laa.e_l, delta_a, big_m,
        solver.damping, solver.tol, solver.max_iter, None if start is None else tuple(start),
    )


def fixed_point_residual(scenario: Scenario, tau_w: float, tau_l: float) -> float:
    """max|F(x) - x| of the coexistence map at (tau_w, tau_l), evaluated from scratch."""
    wifi, laa = scenario.wifi, scenario.laa
    delta_a, big_m = contention_geometry(scenario)
    values = _coexistence_map(
        tau_w, tau_l, scenario.n_w, scenario.n_l, wifi.w0, wifi.m, laa.w0_laa, laa.m_laa, laa.e_l, delta_a, big_m
    )
    return max(abs(values["tau_w"] - tau_w), abs(values["tau_l"] - tau_l))


def fixed_points_from_starts(scenario: Scenario, starts: Iterable[tuple[float, float]]) -> list[ContentionSolution]:
    """Solve from several starts and keep the distinct fixed points reached.

    More than one distinct point is reported with a warning; the canonical
    solve_coexistence result is left untouched.
    """
    distinct: list[ContentionSolution] = []

    for start in starts:
        solution = solve_coexistence(scenario, start=start)
        if all(
            max(abs(solution.tau_w - known.tau_w), abs(solution.tau_l - known.tau_l)) > DISTINCT_FIXED_POINT_GAP
            for known in distinct
        ):
            distinct.append(solution)

    if len(distinct) > 1:
        warnings.warn(f"{len(distinct)} distinct fixed points found for n_w={scenario.n_w}, n_l={scenario.n_l}")

    return distinct


@lru_cache(maxsize=1024)
def _solve_wifi_only(n: int, w0: int, m: int, damping: float, tol: float, max_iter: int) -> tuple[float, float]:
    def step(x: tuple[float, ...]) -> tuple[float]:
        p = 1.0 - (1.0 - x[0]) ** (n - 1)
        return (tau_wifi(p, w0, m),)

    (tau,), _, _ = damped_iteration(step, (2.0 / (w0 + 1),), damping, tol, max_iter)
    return tau, 1.0 - (1.0 - tau) ** (n - 1)


def solve_wifi_only(
    n: int, w0: int, m: int, damping: float = 0.5, tol: float = 1e-10, max_iter: int = 10_000
) -> tuple[float, float]:
    """(tau, P) of a Wi-Fi network of n identical DCF stations.

    Raises:
        DomainError: if n < 1.
        NoConvergence: if the iteration budget is exhausted.
    """
    if n < 1:
        raise DomainError(f"station count should be >= 1, entered: {n}")
    return _solve_wifi_only(int(n), int(w0), int(m), float(damping), float(tol), int(max_iter))
