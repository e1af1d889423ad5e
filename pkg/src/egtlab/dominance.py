"""Strict dominance tests and iterated elimination.

The heavy lifting is a max-margin linear program: find the mixture p (over an
allowed support) maximizing the worst-case payoff advantage over a target
mixture q across the opponent's allowed pure strategies. A strictly positive
optimum certifies strict dominance; the certificate is always re-checked
against the payoff matrix before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import Game, MixedStrategy, as_strategy
from .lp import LpError, solve_max

STRICT_TOL = 1e-9


@dataclass(frozen=True)
class DominanceResult:
    """Outcome of a single dominance query.

    margin is the optimal worst-column payoff advantage; dominated means
    margin > STRICT_TOL. degenerate flags a margin indistinguishable from
    zero at that tolerance.
    """

    dominated: bool
    margin: float
    dominator: MixedStrategy | None
    degenerate: bool


@dataclass(frozen=True)
class EliminationTrace:
    """Rounds of iterated elimination.

    rounds[0] holds the initial strategy sets; each later entry is the pair
    of surviving (row, column) index tuples after one simultaneous round.
    removals records (round, side, index, certificate) for every deletion.
    """

    mode: str
    rounds: tuple
    removals: tuple

    @property
    def surviving_rows(self) -> tuple:
        return self.rounds[-1][0]

    @property
    def surviving_cols(self) -> tuple:
        return self.rounds[-1][1]


def _checked_sets(game: Game, restrict_rows, restrict_cols):
    rows = tuple(range(game.n_rows)) if restrict_rows is None else tuple(restrict_rows)
    cols = tuple(range(game.n_cols)) if restrict_cols is None else tuple(restrict_cols)
    if not rows or not cols:
        raise ValueError("restriction sets must be nonempty")
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise ValueError("restriction sets must not repeat indices")
    if min(rows) < 0 or max(rows) >= game.n_rows:
        raise ValueError("row restriction out of range")
    if min(cols) < 0 or max(cols) >= game.n_cols:
        raise ValueError("column restriction out of range")
    return rows, cols


def strict_margin(game: Game, p, q, restrict_cols=None) -> float:
    """Worst-case payoff advantage of p over q across the given opponent columns."""
    ps = as_strategy(p)
    qs = as_strategy(q)
    if len(ps) != game.n_rows or len(qs) != game.n_rows:
        raise ValueError("p and q must mix over the game's rows")
    _, cols = _checked_sets(game, None, restrict_cols)
    diff = (ps.weights - qs.weights) @ game.payoff
    return float(diff[list(cols)].min())


def find_dominator(game: Game, q, restrict_rows=None, restrict_cols=None,
                   mode: str = "mixed") -> DominanceResult:
    """Best strict dominator of q, by LP over mixtures or brute force over pures.

    The dominator's support is confined to restrict_rows and margins are
    measured against restrict_cols only.
    """
    qs = as_strategy(q)
    if len(qs) != game.n_rows:
        raise ValueError("q must mix over the game's rows")
    rows, cols = _checked_sets(game, restrict_rows, restrict_cols)
    A = game.payoff
    uq = qs.weights @ A  # U_q(e_j) for every column

    if mode == "pure":
        best, best_k = -np.inf, rows[0]
        for k in rows:
            m = float((A[k] - uq)[list(cols)].min())
            if m > best:
                best, best_k = m, k
        w = np.zeros(game.n_rows)
        w[best_k] = 1.0
        return _result(game, qs, best, w, cols)

    if mode != "mixed":
        raise ValueError(f"unknown dominance mode {mode!r}")

    # variables: p_k for k in rows, eps+ , eps-, one slack per column
    nr, nc = len(rows), len(cols)
    nv = nr + 2 + nc
    A_eq = np.zeros((nc + 1, nv))
    b_eq = np.zeros(nc + 1)
    for idx, j in enumerate(cols):
        A_eq[idx, :nr] = A[list(rows), j]
        A_eq[idx, nr] = -1.0      # eps+
        A_eq[idx, nr + 1] = 1.0   # eps-
        A_eq[idx, nr + 2 + idx] = -1.0
        b_eq[idx] = uq[j]
    A_eq[nc, :nr] = 1.0
    b_eq[nc] = 1.0
    c = np.zeros(nv)
    c[nr], c[nr + 1] = 1.0, -1.0

    x, margin = solve_max(c, A_eq, b_eq)
    w = np.zeros(game.n_rows)
    for idx, k in enumerate(rows):
        w[k] = max(x[idx], 0.0)  # clip solver dust
    w /= w.sum()
    return _result(game, qs, margin, w, cols)


def _result(game: Game, qs: MixedStrategy, margin: float, w: np.ndarray, cols) -> DominanceResult:
    degenerate = bool(abs(margin) <= STRICT_TOL)
    dominated = bool(margin > STRICT_TOL)
    dominator = None
    if dominated:
        dominator = as_strategy(w)
        realized = strict_margin(game, dominator, qs, cols)
        if abs(realized - margin) > STRICT_TOL:
            raise LpError(
                f"dominance certificate mismatch: LP margin {margin!r}, realized {realized!r}")
    return DominanceResult(dominated, float(margin), dominator, degenerate)


def _one_side_removals(game: Game, alive_rows, alive_cols, mode: str):
    """Strategies in alive_rows strictly dominated within the current restriction."""
    removed = []
    for i in alive_rows:
        q = np.zeros(game.n_rows)
        q[i] = 1.0
        res = find_dominator(game, q, alive_rows, alive_cols, mode=mode)
        if res.dominated:
            removed.append((i, res))
    return removed


def iterate_elimination(game: Game, mode: str = "pure-by-mixed",
                        opponent_game: Game | None = None) -> EliminationTrace:
    """Iterated strict elimination of pure strategies for both players.

    Each round simultaneously removes, on both sides, every pure strategy
    strictly dominated within the current restriction; dominators are pure
    ('pure-by-pure') or mixtures over the surviving set ('pure-by-mixed').
    With no opponent_game the same matrix is read from the opponent's seat
    (their rows are this game's columns), which requires a square game.
    """
    if mode not in ("pure-by-pure", "pure-by-mixed"):
        raise ValueError(f"unknown elimination mode {mode!r}")
    if opponent_game is None:
        if game.n_rows != game.n_cols:
            raise ValueError("a non-square game needs an explicit opponent_game")
        opponent_game = game
    if opponent_game.n_rows != game.n_cols or opponent_game.n_cols != game.n_rows:
        raise ValueError("opponent_game must be shaped (game columns) x (game rows)")
    dom_mode = "pure" if mode == "pure-by-pure" else "mixed"

    rows = tuple(range(game.n_rows))
    cols = tuple(range(game.n_cols))
    rounds = [(rows, cols)]
    removals = []
    while True:
        gone_rows = _one_side_removals(game, rows, cols, dom_mode)
        gone_cols = _one_side_removals(opponent_game, cols, rows, dom_mode)
        if not gone_rows and not gone_cols:
            break
        k = len(rounds)
        for i, res in gone_rows:
            removals.append((k, "row", i, res))
        for j, res in gone_cols:
            removals.append((k, "col", j, res))
        rows = tuple(i for i in rows if i not in {i for i, _ in gone_rows})
        cols = tuple(j for j in cols if j not in {j for j, _ in gone_cols})
        if not rows or not cols:
            # strict dominance can never empty a finite game
            raise LpError("elimination emptied a strategy set; payoffs are ill-conditioned")
        rounds.append((rows, cols))
    return EliminationTrace(mode, tuple(rounds), tuple(removals))


def is_mixed_iteratively_dominated(game: Game, opponent_game: Game | None, q,
                                   dominators: str = "mixed") -> DominanceResult:
    """Is mixture q strictly dominated after iterated elimination of pures?

    Runs pure-strategy elimination to its fixed point (pass opponent_game
    None for the single-population reading of a square game), then asks for
    a dominator of q whose support lies in the surviving rows, measured
    against the surviving columns. dominators='pure' downgrades both stages
    to pure-strategy dominance.
    """
    mode = "pure-by-mixed" if dominators == "mixed" else "pure-by-pure"
    trace = iterate_elimination(game, mode=mode, opponent_game=opponent_game)
    return find_dominator(game, q, trace.surviving_rows, trace.surviving_cols,
                          mode="mixed" if dominators == "mixed" else "pure")
