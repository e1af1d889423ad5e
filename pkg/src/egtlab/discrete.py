"""Discrete-generation selection: the background-fitness ratio map.

One generation multiplies every frequency by (C_n + g_i) / (C_n + gbar),
where C_n is a background fitness schedule and g_i the linked payoff. The
iteration runs in log space via log1p, so it tolerates backgrounds up to and
including +inf (where the map freezes in place, exactly).

Whether the background schedule's reciprocal sum diverges decides how much
cumulative selection pressure is available: affine schedules keep selecting
forever, geometric ones stall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import (Coupled, GrowthRule, Schedule, Trajectory,
                       _log_state, _raise_for_status)
from .games import Game, validate_simplex
from .links import eval_link, kernel_args

_KINDS = {"constant": 0, "affine": 1, "geometric": 2}


@dataclass(frozen=True)
class BackgroundFitness:
    """Background fitness by generation: constant, base + rate*n, or base*rate^n."""

    kind: str
    base: float
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown background kind {self.kind!r}")
        base = float(self.base)
        rate = float(self.rate)
        if not math.isfinite(base):
            raise ValueError("background base must be finite")
        if self.kind == "geometric" and not (base > 0 and rate > 0):
            raise ValueError("geometric background needs positive base and ratio")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "rate", rate)

    def value(self, n: int) -> float:
        return _kernels._background(_KINDS[self.kind], self.base, self.rate, n)

    @property
    def divergent_sum(self) -> bool:
        """True when sum of 1/C_n diverges (selection never runs dry)."""
        if self.kind == "constant":
            return True
        if self.kind == "affine":
            return self.rate >= 0.0
        return self.rate <= 1.0


def constant_background(c: float) -> BackgroundFitness:
    return BackgroundFitness("constant", c)


def affine_background(base: float, slope: float) -> BackgroundFitness:
    return BackgroundFitness("affine", base, slope)


def geometric_background(base: float, ratio: float) -> BackgroundFitness:
    return BackgroundFitness("geometric", base, ratio)


def step(rule: GrowthRule | None, game: Game, x, y=None,
         C: float = 0.0) -> np.ndarray:
    """One generation in plain frequency space (reference path, not the kernel)."""
    rule = rule or GrowthRule()
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    f = rule.effective_link
    u = game.payoff @ y
    g = np.array([eval_link(f, ui) if xi > 0 else 0.0 for ui, xi in zip(u, x)])
    C = float(C)
    for i in np.flatnonzero(x > 0):
        if C + g[i] <= 0.0:
            raise ValueError(
                f"background {C:g} plus growth rate {g[i]:g} is not positive "
                f"(strategy {int(i)})")
    gbar = float(x @ g)
    return x * (C + g) / (C + gbar)


def discrete_w_increment(rule: GrowthRule | None, game: Game, x, y, C: float,
                         p, q) -> float:
    """Exact one-generation change of w = sum (p_i - q_i) ln x_i under the map.

    Written as differences of log1p((g_i - gbar) / (C + gbar)), which stays
    finite and exact even when C saturates to +inf (the increment is then 0).
    """
    rule = rule or GrowthRule()
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    pw = validate_simplex(p, what="p").weights
    qw = validate_simplex(q, what="q").weights
    if pw.shape != (game.n_rows,) or qw.shape != (game.n_rows,):
        raise ValueError(f"p and q must have length {game.n_rows}")
    f = rule.effective_link
    u = game.payoff @ y
    g = np.array([eval_link(f, ui) for ui in u])
    gbar = float(x @ g)
    C = float(C)
    denom = C + gbar
    if not denom > 0.0:
        raise ValueError(f"background {C:g} plus mean growth {gbar:g} is not positive")
    total = 0.0
    for ci, gi in zip(pw - qw, g):
        if ci != 0.0:
            total += ci * math.log1p((gi - gbar) / denom)
    return total


def iterate(rule: GrowthRule | None, game: Game, x0,
            opponent: Schedule | Coupled | None = None,
            n_max: int = 10_000,
            background: BackgroundFitness = BackgroundFitness("constant", 0.0),
            sample_every: int = 100) -> Trajectory:
    """Run n_max generations of the ratio map from x0.

    Same opponent conventions as the continuous integrator, with schedule
    time measured in generations. Speed factors make no sense here and are
    rejected.
    """
    rule = rule or GrowthRule()
    if rule.speed is not None:
        raise ValueError("speed factors only apply to the continuous flow")
    n_steps = int(n_max)
    if n_steps < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max!r}")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    n, m = game.n_rows, game.n_cols
    z = _log_state(x0, n, "initial state")
    bg = (_KINDS[background.kind], background.base, background.rate)
    link_a = kernel_args(rule.effective_link)
    info = np.zeros(4)
    S = n_steps // sample_every + 2

    if isinstance(opponent, Coupled):
        if opponent.game.n_rows != m or opponent.game.n_cols != n:
            raise ValueError(
                f"coupled game must be {m}x{n} (opponent strategies x ours), "
                f"got {opponent.game.n_rows}x{opponent.game.n_cols}")
        if opponent.rule.speed is not None:
            raise ValueError("speed factors only apply to the continuous flow")
        z2 = _log_state(opponent.y0, m, "coupled initial state")
        ts = np.zeros(S)
        zs = np.zeros((S, n))
        ws = np.zeros((S, m))
        status, count = _kernels.run_discrete_coupled(
            z, z2, game.payoff, opponent.game.payoff,
            *link_a, *kernel_args(opponent.rule.effective_link),
            *bg, n_steps, sample_every, ts, zs, ws, info)
        if status != _kernels.OK:
            _raise_for_status(status, info, n_pops=2)
        meta = {"dynamics": "discrete", "steps": n_steps,
                "background": background, "sample_every": sample_every,
                "max_drift": float(info[_kernels.I_DRIFT]), "opponent": "coupled",
                "rule": rule.label, "game": game.digest()}
        return Trajectory(ts[:count], zs[:count], np.exp(ws[:count]),
                          ws[:count], meta)

    if isinstance(opponent, Schedule):
        if opponent.n_strategies != m:
            raise ValueError(
                f"schedule rows have {opponent.n_strategies} entries, game has {m} columns")
        sched_a = (opponent.period, opponent.times, opponent.values)
        scripted = True
    elif opponent is None:
        if n != m:
            raise ValueError(f"self-play needs a square game, got {n}x{m}")
        sched_a = (1.0, np.zeros(1), np.zeros((1, 1)))
        scripted = False
    else:
        raise TypeError(f"unsupported opponent {opponent!r}")

    ts = np.zeros(S)
    zs = np.zeros((S, n))
    ys = np.zeros((S, m)) if scripted else np.zeros((1, 1))
    status, count = _kernels.run_discrete(
        z, game.payoff, *link_a, *bg, scripted, *sched_a,
        n_steps, sample_every, ts, zs, ys, info)
    if status != _kernels.OK:
        _raise_for_status(status, info)
    meta = {"dynamics": "discrete", "steps": n_steps, "background": background,
            "sample_every": sample_every,
            "max_drift": float(info[_kernels.I_DRIFT]),
            "opponent": "scripted" if scripted else "self",
            "rule": rule.label, "game": game.digest()}
    return Trajectory(ts[:count], zs[:count],
                      ys[:count] if scripted else None, None, meta)
