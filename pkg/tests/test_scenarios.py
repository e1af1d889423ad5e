"""Construction searches, certificate re-checks, and the fast scenario runners.

The heavyweight runners (hw-4x4, dual-4x4, background-threshold) only appear
in the acceptance suite; here we pin the constructions they are built from.
"""

import math

import numpy as np
import pytest

from egtlab.dominance import strict_margin
from egtlab.games import Game, pure
from egtlab.links import (exp_link, linear_link, power_link, rps_direction,
                          sqrt_link)
from egtlab.scenarios import (SCENARIO_INTERVALS, SCENARIOS, build_rps4,
                              build_survival, dual_basin_k, named_game,
                              run_background_schedules, run_discussion,
                              run_survival_nonconcave)

MIX_TB = np.array([0.5, 0.0, 0.5])


def test_survival_construction_under_a_concave_link():
    con = build_survival(sqrt_link((1.0, 9.0)), "nonconvex")
    assert (con.a, con.b) == (1.0, 9.0)
    assert con.eps == pytest.approx(0.5, abs=1e-12)
    assert con.alpha == pytest.approx(math.sqrt(4.5) - 2.0, rel=1e-12)
    assert con.Cf == 3.0 and con.T == 59 and con.period == 118.0
    np.testing.assert_allclose(con.game.payoff,
                               [[9.0, 1.0], [4.5, 4.5], [1.0, 9.0]])
    assert strict_margin(con.game, MIX_TB, pure(1, 3)) == pytest.approx(con.eps)
    np.testing.assert_array_equal(con.schedule.times, [0.0, 58.0, 59.0, 117.0])
    np.testing.assert_array_equal(
        con.schedule.values, [[1, 0], [1, 0], [0, 1], [0, 1]])
    np.testing.assert_array_equal(con.dominated.weights, [0.0, 1.0, 0.0])


def test_survival_construction_under_a_convex_link():
    con = build_survival(power_link(2.0, (0.0, 3.0)), "nonconcave")
    assert (con.a, con.b) == (0.0, 3.0)
    assert con.eps == pytest.approx(0.31066017177982125, rel=1e-9)
    assert con.alpha == pytest.approx(1.2215097423302685, rel=1e-9)
    assert con.Cf == 9.0 and con.T == 17
    u_m = float(con.game.payoff[1, 0])
    assert u_m == pytest.approx(1.5 + con.eps, rel=1e-12)
    # here the pure strategy dominates the mixture, with the same margin
    assert strict_margin(con.game, pure(1, 3), MIX_TB) == pytest.approx(con.eps)
    np.testing.assert_array_equal(con.dominated, MIX_TB)


def test_survival_search_box_restricts_the_pair():
    con = build_survival(sqrt_link((1.0, 9.0)), "nonconvex", search_box=(1.0, 4.0))
    assert (con.a, con.b) == (1.0, 4.0)


def test_survival_rejects_links_without_the_violation():
    line = linear_link(1.0, 0.0, (0.0, 10.0))
    with pytest.raises(ValueError, match="no convexity violation"):
        build_survival(line, "nonconvex")
    with pytest.raises(ValueError, match="no concavity violation"):
        build_survival(line, "nonconcave")
    with pytest.raises(ValueError, match="variant"):
        build_survival(sqrt_link((1.0, 9.0)), "sideways")
    with pytest.raises(ValueError, match="eps_frac"):
        build_survival(sqrt_link((1.0, 9.0)), "nonconvex", eps_frac=1.0)


def test_rps4_dual_with_a_pinned_triple():
    f = exp_link(1.0, (-2.0, 2.0))
    con = build_rps4(f, "dual", abc=(1.0, 2.0, -2.0))
    assert (con.a, con.b, con.c) == (1.0, 2.0, -2.0)
    assert con.m == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert con.beta == pytest.approx(0.08) and con.gamma == pytest.approx(0.4)
    np.testing.assert_allclose(con.game.payoff[3, :3], con.m + con.beta)
    np.testing.assert_allclose(con.game.payoff[:3, 3], con.m - con.gamma)
    assert con.game.payoff[3, 3] == pytest.approx(con.m)
    np.testing.assert_allclose(con.core_game.payoff,
                               [[1.0, -2.0, 2.0], [2.0, 1.0, -2.0], [-2.0, 2.0, 1.0]])
    margin = strict_margin(con.game, pure(3, 4), np.array([1, 1, 1, 0]) / 3.0)
    assert margin == pytest.approx(con.beta, rel=1e-12)


def test_rps4_dual_grid_search_lands_in_the_rotation_band():
    f = exp_link(1.0, (-2.0, 2.0))
    con = build_rps4(f, "dual")
    assert con.c < con.a < con.b
    delta = con.a - 0.5 * (con.b + con.c)
    span = 4.0
    assert 0.03 * span < delta < 0.13 * span
    assert rps_direction(f, con.a, con.b, con.c,
                         mode="continuous-functional") == "inward"


def test_rps4_hofbauer_weibull_needs_curvature():
    with pytest.raises(ValueError, match="no feasible cycle payoffs"):
        build_rps4(linear_link(1.0, 0.0, (0.01, 20.0)), "hofbauer-weibull")


def test_rps4_hofbauer_weibull_under_sqrt():
    f = sqrt_link((0.0, 20.0))
    con = build_rps4(f, "hofbauer-weibull", (0.01, 20.0))
    assert con.variant == "hofbauer-weibull"
    assert con.c < con.a < con.b
    assert con.a < 0.5 * (con.b + con.c)  # raw rotation inward
    assert rps_direction(f, con.a, con.b, con.c,
                         mode="continuous-functional") == "outward"
    assert con.m > con.a + con.beta
    np.testing.assert_allclose(con.game.payoff[3, :3], con.a + con.beta)
    np.testing.assert_allclose(con.game.payoff[:3, 3], con.gamma)
    assert con.game.payoff[3, 3] == 0.0
    margin = strict_margin(con.game, np.array([1, 1, 1, 0]) / 3.0, pure(3, 4))
    assert margin > 0.0


def test_rps4_explicit_triples_are_still_validated():
    f = exp_link(1.0, (-2.0, 2.0))
    with pytest.raises(ValueError, match="cycle outward"):
        build_rps4(f, "dual", abc=(-1.0, 2.0, -2.0))
    with pytest.raises(ValueError, match="link domain"):
        build_rps4(f, "dual", abc=(1.0, 3.0, -2.0))


def test_rps4_discrete_direction_mode():
    f = linear_link(1.0, 0.0, (0.0, 15.0))
    con = build_rps4(f, "hofbauer-weibull", abc=(3.9, 5.0, 3.0),
                     direction_mode="discrete-functional", background=1.0)
    # raw rotation inward, but ln(1 + u) turns it outward: (1+a)^2 > (1+b)(1+c)
    assert con.a < 0.5 * (con.b + con.c)
    assert (1.0 + con.a) ** 2 > (1.0 + con.b) * (1.0 + con.c)
    assert rps_direction(f, 3.9, 5.0, 3.0, mode="discrete-functional",
                         background=1.0) == "outward"
    assert rps_direction(f, 3.9, 5.0, 3.0,
                         mode="continuous-functional") == "inward"


def test_basin_membership():
    con = build_rps4(exp_link(1.0, (-2.0, 2.0)), "dual", abc=(1.0, 2.0, -2.0))
    basin = dual_basin_k(con, 1.0 / 30.0, 0.04)
    near_center = np.array([0.98 / 3.0] * 3 + [0.02])
    assert not basin.contains(near_center)  # core product too large
    assert dual_basin_k(con, 0.02, 0.05).contains((0.6, 0.3, 0.08, 0.02))
    assert basin.contains((1.0, 0.0, 0.0, 0.0))
    assert not basin.contains((0.0, 0.0, 0.0, 1.0))
    with pytest.raises(ValueError, match="4-strategy"):
        basin.contains((0.5, 0.3, 0.2))


def test_basin_validation():
    con = build_rps4(exp_link(1.0, (-2.0, 2.0)), "dual", abc=(1.0, 2.0, -2.0))
    with pytest.raises(ValueError, match="rho"):
        dual_basin_k(con, 1.0 / 27.0, 0.04)
    with pytest.raises(ValueError, match="eps4"):
        dual_basin_k(con, 0.01, 1.5)
    hw = build_rps4(sqrt_link((0.0, 20.0)), "hofbauer-weibull", (0.01, 20.0))
    with pytest.raises(ValueError, match="dual"):
        dual_basin_k(hw, 0.01, 0.04)


def test_basin_sample_sits_on_the_wedge_midline():
    con = build_rps4(exp_link(1.0, (-2.0, 2.0)), "dual", abc=(1.0, 2.0, -2.0))
    basin = dual_basin_k(con, 0.01, 0.04)
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = basin.sample(rng)
        assert basin.contains(x)
        assert x[3] == 0.02
        assert x.sum() == pytest.approx(1.0, abs=1e-12)
        assert float(np.prod(x[:3])) == pytest.approx(0.005, rel=1e-6)


def test_named_game_catalog():
    np.testing.assert_array_equal(named_game("discussion-3x3").payoff,
                                  [[3, 0, 0], [0, 3, 0], [2, 2, 1]])
    inline = named_game("rps-base(1,2,-2)")
    spelled = named_game("rps-base", 1.0, 2.0, -2.0)
    np.testing.assert_array_equal(inline.payoff, spelled.payoff)
    np.testing.assert_array_equal(inline.payoff,
                                  [[1, -2, 2], [2, 1, -2], [-2, 2, 1]])
    np.testing.assert_array_equal(named_game("rps-base", 0, 0, 0).payoff,
                                  np.zeros((3, 3)))


def test_named_game_errors():
    with pytest.raises(ValueError, match="unknown game name"):
        named_game("matching-pennies")
    with pytest.raises(ValueError, match="not both"):
        named_game("rps-base(1,2,-2)", 1.0)
    with pytest.raises(ValueError, match="takes no parameters"):
        named_game("discussion-3x3", 1.0)
    with pytest.raises(ValueError, match="exactly three"):
        named_game("rps-base", 1.0, 2.0)
    with pytest.raises(ValueError, match="malformed"):
        named_game("rps-base(1,2")


def test_run_discussion_report():
    report, traj = run_discussion()
    assert report["ok"]
    assert report["lp_margin"] == pytest.approx(0.5, abs=1e-9)
    assert report["run"]["w_growth"] >= report["run"]["w_growth_bound"]
    assert report["run"]["min_support_final"] < 1e-8
    assert report["verdicts"]["mixture"]["status"] == "eliminated"
    assert traj.states.shape[1] == 3


def test_run_discussion_short_horizon_is_flagged():
    report, _ = run_discussion(t_max=5.0)
    assert not report["ok"]
    assert not report["checks"]["min-support-below-1e-8"]


def test_run_survival_nonconcave_report():
    report, _ = run_survival_nonconcave()
    assert report["ok"]
    assert report["run"]["x_M_final"] < 1e-4
    assert report["run"]["product_floor"] > 0.01
    assert 0.235 <= report["run"]["product_late_max"] <= 0.25


def test_run_background_schedules_report():
    report, _ = run_background_schedules()
    assert report["ok"]
    assert report["run"]["affine_min_support_final"] < 1e-4
    assert report["run"]["geometric_w_tail_move"] < 0.05
    assert report["verdicts"]["geometric"]["status"] == "survived"


def test_catalog_is_consistent():
    assert set(SCENARIOS) == set(SCENARIO_INTERVALS)
    for name, runner in SCENARIOS.items():
        assert callable(runner), name
