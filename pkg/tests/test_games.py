"""Game container, simplex validation, and bilinear payoff evaluation."""

import numpy as np
import pytest

from egtlab.games import (Game, MixedStrategy, SimplexError, as_strategy,
                          game_from_dict, game_to_dict, load_game,
                          payoff_mixed, payoff_pure, pure, save_game,
                          uniform, validate_simplex)

DISCUSSION = Game([[3.0, 0.0, 0.0], [0.0, 3.0, 0.0], [2.0, 2.0, 1.0]])


def test_payoff_pure_against_a_vertex():
    assert payoff_pure(DISCUSSION, 2, pure(0, 3)) == 2.0


def test_payoff_pure_of_the_flat_middle_row():
    game = Game([[9.0, 1.0], [4.5, 4.5], [1.0, 9.0]])
    assert payoff_pure(game, 1, (0.5, 0.5)) == 4.5


def test_payoff_mixed_half_half():
    assert payoff_mixed(DISCUSSION, (0.5, 0.5, 0.0), pure(0, 3)) == 1.5


def test_payoff_mixed_uniform_both_sides():
    got = payoff_mixed(DISCUSSION, uniform(3), uniform(3))
    assert got == pytest.approx(11.0 / 9.0, rel=1e-15)


def test_payoff_mixed_against_vertex_is_column_average():
    p = (0.2, 0.3, 0.5)
    for j in range(3):
        want = float(np.dot(p, DISCUSSION.payoff[:, j]))
        assert payoff_mixed(DISCUSSION, p, pure(j, 3)) == pytest.approx(want)


def test_dimension_mismatch_is_reported():
    with pytest.raises(ValueError):
        payoff_pure(DISCUSSION, 0, (0.5, 0.5))
    with pytest.raises(ValueError):
        payoff_mixed(DISCUSSION, (0.5, 0.5), uniform(3))


def test_validate_accepts_a_face_point():
    s = validate_simplex((0.5, 0.5, 0.0))
    assert isinstance(s, MixedStrategy)
    assert list(s.support) == [0, 1]


def test_validate_rejects_a_bad_sum():
    with pytest.raises(SimplexError, match="sum"):
        validate_simplex((0.5, 0.6, 0.0))


def test_validate_rejects_any_negative_weight():
    # The sum is exactly 1; the sign is still illegal.
    with pytest.raises(SimplexError, match="negative weight"):
        validate_simplex((1.0 + 1e-13, -1e-13))


def test_simplex_error_is_a_value_error():
    assert issubclass(SimplexError, ValueError)


def test_pure_and_uniform():
    assert list(pure(1, 3)) == [0.0, 1.0, 0.0]
    assert list(uniform(4)) == [0.25] * 4
    with pytest.raises(SimplexError, match="out of range"):
        pure(3, 3)


def test_as_strategy_passthrough():
    s = uniform(3)
    assert as_strategy(s) is s
    assert len(as_strategy([0.25, 0.75])) == 2


def test_labels_default_and_explicit():
    game = Game([[1.0, 2.0]], row_labels=("only",), col_labels=("L", "R"))
    assert game.row_labels == ("only",)
    with pytest.raises(ValueError):
        Game([[1.0, 2.0]], row_labels=("a", "b"))


def test_digest_tracks_content():
    same = Game([[3.0, 0.0, 0.0], [0.0, 3.0, 0.0], [2.0, 2.0, 1.0]])
    other = Game([[3.0, 0.0, 0.0], [0.0, 3.0, 0.0], [2.0, 2.0, 1.5]])
    assert DISCUSSION.digest() == same.digest()
    assert DISCUSSION.digest() != other.digest()


def test_dict_round_trip_preserves_evaluations():
    back = game_from_dict(game_to_dict(DISCUSSION))
    assert np.array_equal(back.payoff, DISCUSSION.payoff)
    assert back.row_labels == DISCUSSION.row_labels


def test_file_round_trip(tmp_path):
    path = tmp_path / "game.json"
    save_game(DISCUSSION, path)
    back = load_game(path)
    assert payoff_mixed(back, uniform(3), uniform(3)) == \
        payoff_mixed(DISCUSSION, uniform(3), uniform(3))


def test_game_from_dict_wants_a_payoff_key():
    with pytest.raises(ValueError, match="payoff"):
        game_from_dict({"matrix": [[1.0]]})
