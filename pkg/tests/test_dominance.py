"""Strict dominance queries, elimination traces, and the grid cross-check."""

import numpy as np
import pytest

from egtlab.dominance import (find_dominator, is_mixed_iteratively_dominated,
                              iterate_elimination, strict_margin)
from egtlab.games import Game, pure, uniform

from oracles import grid_margin, mixture_grid

DISCUSSION = Game([[3.0, 0.0, 0.0], [0.0, 3.0, 0.0], [2.0, 2.0, 1.0]])
RPS = Game([[1.0, -2.0, 2.0], [2.0, 1.0, -2.0], [-2.0, 2.0, 1.0]])
HALF_HALF = np.array([0.5, 0.5, 0.0])


def test_margin_of_the_discussion_mixture():
    assert strict_margin(DISCUSSION, pure(2, 3), HALF_HALF) == pytest.approx(0.5)


def test_margin_against_itself_is_zero():
    assert strict_margin(DISCUSSION, HALF_HALF, HALF_HALF) == 0.0


def test_margin_in_the_survival_game():
    game = Game([[9.0, 1.0], [4.5, 4.5], [1.0, 9.0]])
    got = strict_margin(game, (0.5, 0.0, 0.5), pure(1, 3))
    assert got == pytest.approx(0.5)


def test_find_dominator_pure_mode():
    res = find_dominator(DISCUSSION, HALF_HALF, mode="pure")
    assert res.dominated
    assert res.margin == pytest.approx(0.5)
    assert list(res.dominator) == [0.0, 0.0, 1.0]


def test_find_dominator_mixed_mode_cannot_do_worse():
    res = find_dominator(DISCUSSION, HALF_HALF, mode="mixed")
    assert res.dominated
    assert res.margin == pytest.approx(0.5)
    # the certificate must actually realize the margin
    assert strict_margin(DISCUSSION, res.dominator, HALF_HALF) == \
        pytest.approx(res.margin)


def test_one_by_one_game_has_no_dominator():
    res = find_dominator(Game([[5.0]]), pure(0, 1))
    assert not res.dominated
    assert res.margin == pytest.approx(0.0)


def test_rps_center_is_undominated():
    res = find_dominator(RPS, uniform(3))
    assert not res.dominated
    assert abs(res.margin) <= 1e-9
    assert res.degenerate


def test_elimination_collapses_a_dominance_solvable_game():
    trace = iterate_elimination(Game([[3.0, 0.0], [5.0, 1.0]]))
    assert trace.surviving_rows == (1,)
    assert trace.surviving_cols == (1,)
    # every deletion carries a strict certificate
    assert all(cert.margin > 0 for _, _, _, cert in trace.removals)


def test_elimination_leaves_rps_alone():
    trace = iterate_elimination(RPS)
    assert trace.surviving_rows == (0, 1, 2)
    assert len(trace.removals) == 0


def test_elimination_spares_a_single_row():
    flat = Game([[0.0], [0.0], [0.0]])
    trace = iterate_elimination(Game([[1.0, 2.0, 3.0]]), opponent_game=flat)
    assert trace.surviving_rows == (0,)
    assert trace.surviving_cols == (0, 1, 2)
    assert len(trace.removals) == 0


def test_elimination_prunes_the_opponent_side_too():
    sharp = Game([[1.0], [0.0], [0.0]])
    trace = iterate_elimination(Game([[1.0, 2.0, 3.0]]), opponent_game=sharp)
    assert trace.surviving_rows == (0,)
    assert trace.surviving_cols == (0,)


def test_elimination_same_matrix_needs_square():
    with pytest.raises(ValueError, match="square"):
        iterate_elimination(Game([[1.0, 2.0, 3.0]]))


def test_iterated_query_on_the_discussion_mixture():
    res = is_mixed_iteratively_dominated(DISCUSSION, None, HALF_HALF)
    assert res.dominated
    assert res.margin == pytest.approx(0.5)


def test_iterated_query_uses_later_rounds():
    game = Game([[3.0, 0.0], [5.0, 1.0]])
    res = is_mixed_iteratively_dominated(game, None, (1.0, 0.0))
    assert res.dominated
    assert res.margin == pytest.approx(1.0)
    assert list(res.dominator) == [0.0, 1.0]


def test_pure_by_mixed_removes_at_least_pure_by_pure():
    rng = np.random.default_rng(11)
    for _ in range(40):
        game = Game(rng.integers(0, 10, size=(4, 4)).astype(float))
        by_pure = iterate_elimination(game, mode="pure-by-pure")
        by_mixed = iterate_elimination(game, mode="pure-by-mixed")
        assert set(by_mixed.surviving_rows) <= set(by_pure.surviving_rows)
        assert set(by_mixed.surviving_cols) <= set(by_pure.surviving_cols)


def test_trace_rounds_are_nested():
    rng = np.random.default_rng(12)
    for _ in range(25):
        game = Game(rng.integers(0, 10, size=(4, 4)).astype(float))
        trace = iterate_elimination(game)
        rows = [set(r[0]) for r in trace.rounds]
        cols = [set(r[1]) for r in trace.rounds]
        for earlier, later in zip(rows, rows[1:]):
            assert later <= earlier
        for earlier, later in zip(cols, cols[1:]):
            assert later <= earlier


def test_lp_agrees_with_the_mixture_grid():
    grid = mixture_grid(4, 12)
    rng = np.random.default_rng(13)
    for _ in range(40):
        payoff = rng.integers(0, 10, size=(4, 4)).astype(float)
        game = Game(payoff)
        for i in range(4):
            q = pure(i, 4)
            gm = grid_margin(payoff, q.weights, grid)
            res = find_dominator(game, q)
            if gm > 1e-6:
                assert res.dominated
                assert res.margin >= gm - 1e-9
            if res.dominated:
                assert strict_margin(game, res.dominator, q) == \
                    pytest.approx(res.margin, abs=1e-9)


def test_margins_scale_with_the_payoffs():
    rng = np.random.default_rng(14)
    payoff = rng.integers(0, 10, size=(4, 4)).astype(float)
    q = np.array([0.25, 0.25, 0.25, 0.25])
    base = find_dominator(Game(payoff), q)
    lam = 3.5
    scaled = find_dominator(Game(lam * payoff), q)
    assert scaled.dominated == base.dominated
    if base.dominated:
        assert scaled.margin == pytest.approx(lam * base.margin, rel=1e-9)


def test_verdicts_survive_column_shifts():
    rng = np.random.default_rng(15)
    payoff = rng.integers(0, 10, size=(4, 4)).astype(float)
    shifted = payoff.copy()
    shifted[:, 2] += 7.0
    q = np.array([0.5, 0.5, 0.0, 0.0])
    base = find_dominator(Game(payoff), q)
    moved = find_dominator(Game(shifted), q)
    assert moved.dominated == base.dominated
    assert moved.margin == pytest.approx(base.margin, abs=1e-9)
