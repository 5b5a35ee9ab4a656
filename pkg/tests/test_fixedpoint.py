import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from coexfair.datamodels import LaaParams, Scenario, SolverControls, WiFiParams
from coexfair.errors import DomainError, NegativeRegion, NoConvergence
from coexfair.fixedpoint import (
    STALL_WINDOW,
    collision_probs,
    contention_geometry,
    contention_slot_distribution,
    damped_iteration,
    fixed_point_residual,
    fixed_points_from_starts,
    region_weights,
    solve_coexistence,
    solve_wifi_only,
    tau_laa,
    tau_wifi,
)


def renewal_tau(p: float, w0: int, m: int, last_stage: int) -> float:
    """Attempts per slot of a backoff chain: stage i is reached with probability p**i and lasts (W_i + 1) / 2 slots."""
    stages = np.arange(last_stage + 1)
    reach = p**stages
    windows = w0 * 2.0 ** np.minimum(stages, m)
    return reach.sum() / (reach * (windows + 1) / 2).sum()


@pytest.mark.parametrize("w0", [4, 8, 16])
def test_tau_wifi_without_collisions(w0):
    assert tau_wifi(0.0, w0, 6) == pytest.approx(2 / (w0 + 1), abs=1e-15)
    assert tau_laa(0.0, w0, 2, 3) == pytest.approx(2 / (w0 + 1), abs=1e-15)


def test_tau_examples():
    assert tau_wifi(0.0, 16, 6) == pytest.approx(2 / 17)
    assert tau_wifi(0.0, 4, 1) == pytest.approx(0.4)
    assert tau_wifi(0.5, 16, 6) == pytest.approx(0.032662, abs=1e-5)
    assert tau_laa(0.0, 16, 2, 1) == pytest.approx(2 / 17)
    assert tau_laa(0.0, 4, 1, 1) == pytest.approx(0.4)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.4999, 0.5, 0.5001, 0.7, 0.95])
def test_tau_matches_renewal_chain(p):
    assert tau_wifi(p, 16, 6) == pytest.approx(renewal_tau(p, 16, 6, 7), rel=1e-10)
    assert tau_laa(p, 16, 2, 1) == pytest.approx(renewal_tau(p, 16, 2, 3), rel=1e-10)
    assert tau_laa(p, 4, 1, 8) == pytest.approx(renewal_tau(p, 4, 1, 9), rel=1e-10)


def closed_form_tau_w(p: float, w0: int, m: int) -> float:
    stages = ((1 - (2 * p) ** (m + 1)) * (1 - p) + 2**m * (p ** (m + 1) - p ** (m + 2)) * (1 - 2 * p)) / (
        (1 - 2 * p) * (1 - p ** (m + 2))
    )
    return 2 / (w0 * stages + 1)


def closed_form_tau_l(p: float, w0: int, m: int, e_l: int) -> float:
    last = 1 - p ** (m + e_l + 1)
    stages = (1 - p) * (1 - (2 * p) ** (m + 1)) / ((1 - 2 * p) * last)
    stages += 2**m * (p ** (m + 1) - p ** (m + e_l + 1)) / last
    return 2 / (w0 * stages + 1)


@pytest.mark.parametrize("p", [0.05, 0.2, 0.35, 0.45, 0.55, 0.7, 0.9])
def test_tau_matches_closed_form_away_from_half(p):
    assert tau_wifi(p, 16, 6) == pytest.approx(closed_form_tau_w(p, 16, 6), rel=1e-9)
    assert tau_wifi(p, 32, 3) == pytest.approx(closed_form_tau_w(p, 32, 3), rel=1e-9)
    assert tau_laa(p, 16, 2, 1) == pytest.approx(closed_form_tau_l(p, 16, 2, 1), rel=1e-9)
    assert tau_laa(p, 4, 1, 8) == pytest.approx(closed_form_tau_l(p, 4, 1, 8), rel=1e-9)
    assert tau_laa(p, 16, 6, 3) == pytest.approx(closed_form_tau_l(p, 16, 6, 3), rel=1e-9)


def test_tau_strictly_decreasing_in_collision_probability():
    grid = np.linspace(0.0, 0.999, 1000)

    assert np.all(np.diff([tau_wifi(p, 16, 6) for p in grid]) < 0)
    assert np.all(np.diff([tau_laa(p, 16, 2, 1) for p in grid]) < 0)


@pytest.mark.parametrize("p", [-0.1, 1.0, 1.5])
def test_tau_rejects_probabilities_outside_domain(p):
    with pytest.raises(DomainError):
        tau_wifi(p, 16, 6)


def test_tau_laa_rejects_retry_count():
    with pytest.raises(DomainError):
        tau_laa(0.1, 16, 2, 9)


def test_collision_probs():
    p_cw1, _, _ = collision_probs(0.1, 0.2, 1, 1)
    assert p_cw1 == 0

    _, p_cw2, p_cl = collision_probs(0.1, 0.2, 2, 1)
    assert p_cw2 == pytest.approx(0.28)
    assert p_cl == pytest.approx(0.19)


def test_region_weights_without_wifi_only_region():
    _, p_a1, p_a2 = region_weights(0.7, 0.5, 0, 15)

    assert p_a1 == 0
    assert p_a2 == 1


def test_region_weights_hand_summation():
    c0, p_a1, p_a2 = region_weights(0.9, 0.8, 1, 3)

    assert c0 == pytest.approx(1 / (1 + 0.9 + 0.72 + 0.576))
    assert c0 == pytest.approx(0.31289, abs=1e-5)
    assert p_a1 == pytest.approx(c0)
    assert p_a1 + p_a2 == pytest.approx(1.0)


@pytest.mark.parametrize("p, delta_a, big_m", [(0.9, 1, 3), (0.5, 4, 20), (0.99, 5, 64)])
def test_equal_idle_probabilities_give_one_geometric_chain(p, delta_a, big_m):
    c0, _, _ = region_weights(p, p, delta_a, big_m)
    assert c0 == pytest.approx((1 - p) / (1 - p ** (big_m + 1)), rel=1e-12)


def test_region_weights_rejects_region_beyond_max():
    with pytest.raises(DomainError):
        region_weights(0.9, 0.8, 5, 3)


def test_contention_slot_distribution_sums_to_one():
    weights = contention_slot_distribution(0.9, 0.8, 5, 64)

    assert weights.shape == (65,)
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(weights) < 0)


def test_wifi_only_single_station():
    tau, p = solve_wifi_only(1, 16, 6)

    assert tau == pytest.approx(2 / 17, abs=1e-12)
    assert p == 0.0


def test_wifi_only_two_stations_against_scalar_root():
    def gap(tau):
        return tau - tau_wifi(1.0 - (1.0 - tau), 16, 6)

    expected = brentq(gap, 1e-9, 0.99, xtol=1e-14)
    tau, p = solve_wifi_only(2, 16, 6)

    assert tau == pytest.approx(expected, abs=1e-9)
    assert p == pytest.approx(expected, abs=1e-9)


def test_wifi_only_access_drops_with_network_size():
    assert solve_wifi_only(20, 16, 6)[0] < solve_wifi_only(2, 16, 6)[0]


def test_wifi_only_rejects_empty_network():
    with pytest.raises(DomainError):
        solve_wifi_only(0, 16, 6)


@pytest.mark.parametrize("n_w", [1, 3, 10])
def test_no_laa_collapses_to_wifi_only(n_w):
    solution = solve_coexistence(Scenario(n_w=n_w, n_l=0))
    tau, p = solve_wifi_only(n_w, 16, 6)

    assert solution.tau_w == pytest.approx(tau, abs=1e-8)
    assert solution.p_cw == pytest.approx(p, abs=1e-8)


def test_equal_defer_periods_leave_no_wifi_only_region(scenario_factory):
    scenario = scenario_factory(n=3, priority_class=1)
    solution = solve_coexistence(scenario)
    wifi, laa = scenario.wifi, scenario.laa

    assert solution.delta_a == 0
    assert solution.p_a1 == 0
    assert solution.p_cw == pytest.approx(solution.p_cw2, abs=1e-15)

    # one region where every station contends in every slot
    def tau_l_given(tau_w):
        def gap(tau_l):
            p_cl = 1 - (1 - tau_l) ** (scenario.n_l - 1) * (1 - tau_w) ** scenario.n_w
            return tau_l - tau_laa(p_cl, laa.w0_laa, laa.m_laa, laa.e_l)

        return brentq(gap, 1e-9, 0.99, xtol=1e-15)

    def wifi_gap(tau_w):
        p_cw = 1 - (1 - tau_w) ** (scenario.n_w - 1) * (1 - tau_l_given(tau_w)) ** scenario.n_l
        return tau_w - tau_wifi(p_cw, wifi.w0, wifi.m)

    tau_w = brentq(wifi_gap, 1e-9, 0.99, xtol=1e-15)
    assert solution.tau_w == pytest.approx(tau_w, abs=1e-8)
    assert solution.tau_l == pytest.approx(tau_l_given(tau_w), abs=1e-8)


def test_larger_networks_collide_more(scenario_factory):
    small = solve_coexistence(scenario_factory(n=1, priority_class=4))
    large = solve_coexistence(scenario_factory(n=10, priority_class=4))

    for value in (large.tau_w, large.tau_l, large.p_cw, large.p_cl, large.p_a1, large.p_a2):
        assert 0 < value < 1
    assert large.p_cw > small.p_cw


def test_solution_is_a_fixed_point(scenario_factory):
    scenario = scenario_factory(n=5)
    solution = solve_coexistence(scenario)

    assert solution.residual <= scenario.solver.tol
    assert fixed_point_residual(scenario, solution.tau_w, solution.tau_l) <= scenario.solver.tol


def test_damping_is_lowered_when_the_iteration_cycles():
    # undamped map -3x: damping 0.5 flips the sign forever, 0.25 lands on the root
    point, iterations, residual = damped_iteration(lambda x: (-3.0 * x[0],), (1.0,), 0.5, 1e-12, 100)

    assert point == (0.0,)
    assert iterations == STALL_WINDOW + 2
    assert residual == 0.0


@pytest.mark.parametrize("m_laa", [16, 30, 64])
def test_small_window_class_converges_for_large_stages(scenario_factory, m_laa):
    scenario = scenario_factory(n=5, priority_class=1).with_laa(m_laa=m_laa)
    solution = solve_coexistence(scenario)

    assert solution.residual <= scenario.solver.tol
    assert fixed_point_residual(scenario, solution.tau_w, solution.tau_l) <= scenario.solver.tol


def test_solver_reports_exhausted_budget(scenario_factory):
    scenario = scenario_factory(n=5, solver=SolverControls(max_iter=1))

    with pytest.raises(NoConvergence) as error:
        solve_coexistence(scenario)

    assert error.value.iterations == 1
    assert error.value.residual > scenario.solver.tol


def test_raw_table_defer_period_is_rejected():
    scenario = Scenario(laa=LaaParams.from_priority_class(1, raw_table_td=True))

    with pytest.raises(NegativeRegion):
        solve_coexistence(scenario)


def test_fixed_point_is_unique_from_several_starts(scenario_factory):
    scenario = scenario_factory(n=10, priority_class=4)
    starts = [(0.01, 0.01), (0.2, 0.05), (0.05, 0.3), (0.5, 0.5)]

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        points = fixed_points_from_starts(scenario, starts)

    assert len(points) == 1


def test_normalization_over_random_solutions():
    rng = np.random.default_rng(7)

    for _ in range(200):
        scenario = Scenario(
            n_w=int(rng.integers(1, 11)),
            n_l=int(rng.integers(0, 11)),
            wifi=WiFiParams(w0=int(rng.choice([8, 16, 32])), m=int(rng.integers(0, 7))),
            laa=LaaParams.from_priority_class(
                int(rng.integers(1, 5)), e_l=int(rng.integers(1, 9)), m_laa=int(rng.integers(0, 7))
            ),
        )
        solution = solve_coexistence(scenario)
        delta_a, big_m = contention_geometry(scenario)

        for name in ("tau_w", "tau_l", "p_cw", "p_cl", "p_cw1", "p_cw2", "p_i1", "p_i2", "p_a1", "p_a2"):
            assert 0.0 <= getattr(solution, name) <= 1.0, name
        assert solution.p_a1 + solution.p_a2 == pytest.approx(1.0, abs=1e-12)
        distribution = contention_slot_distribution(solution.p_i1, solution.p_i2, delta_a, big_m)
        assert distribution.sum() == pytest.approx(1.0, abs=1e-9)
        assert fixed_point_residual(scenario, solution.tau_w, solution.tau_l) <= scenario.solver.tol
