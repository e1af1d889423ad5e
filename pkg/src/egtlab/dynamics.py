"""Continuous-time selection dynamics driven by a link function.

The flow is x_i' = lam * x_i * (g_i - gbar) with g_i the link applied to the
expected payoff of strategy i and gbar the population mean growth rate. With
a linear link and unit speed this is the classical replicator flow.

Integration happens in log coordinates with a fixed-step RK4 scheme, so
support faces are exactly invariant and frequencies near machine zero remain
resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .games import Game, payoff_mixed, validate_simplex
from .links import LinkFunction, eval_link, kernel_args, linear_link

_REPLICATOR = linear_link(1.0, 0.0)
_NO_LINK = (0, 0.0, 0.0, np.zeros(2), np.zeros(2), -1e300, 1e300, 0.0)
_NO_SCHED = (1.0, np.zeros(1), np.zeros((1, 1)))


class IntegrationError(RuntimeError):
    """The flow could not be continued; carries the failing time and step."""

    def __init__(self, message, t=None, step=None):
        super().__init__(message)
        self.t = t
        self.step = step


@dataclass(frozen=True)
class Schedule:
    """Periodic piecewise-linear opponent script over mixtures.

    times[0] must be 0 and times must stay strictly inside one period; after
    the last breakpoint the script interpolates back to the first row.
    """

    period: float
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        period = float(self.period)
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        if not (math.isfinite(period) and period > 0):
            raise ValueError(f"schedule period must be positive, got {period!r}")
        if times.ndim != 1 or times.size == 0:
            raise ValueError("schedule needs a 1-d array of breakpoint times")
        if times[0] != 0.0:
            raise ValueError("first schedule breakpoint must sit at t=0")
        if np.any(np.diff(times) <= 0) or times[-1] >= period:
            raise ValueError("schedule times must increase strictly and stay below the period")
        if values.ndim != 2 or values.shape[0] != times.size:
            raise ValueError("schedule needs one mixture row per breakpoint")
        for k in range(values.shape[0]):
            validate_simplex(values[k], what=f"schedule row {k}")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_strategies(self) -> int:
        return self.values.shape[1]


def eval_schedule(schedule: Schedule, t: float) -> np.ndarray:
    out = np.zeros(schedule.n_strategies)
    _kernels._sched_eval(schedule.period, schedule.times, schedule.values,
                         float(t), out)
    return out


@dataclass(frozen=True)
class GrowthRule:
    """Link plus optional speed factor; link None means plain replicator."""

    link: LinkFunction | None = None
    speed: float | LinkFunction | None = None

    def __post_init__(self):
        if isinstance(self.speed, (int, float)):
            s = float(self.speed)
            if not (math.isfinite(s) and s > 0):
                raise ValueError(f"constant speed must be positive, got {self.speed!r}")
            object.__setattr__(self, "speed", s)
        elif self.speed is not None and not isinstance(self.speed, LinkFunction):
            raise TypeError("speed must be None, a positive number, or a link over mean payoff")

    @property
    def effective_link(self) -> LinkFunction:
        return self.link if self.link is not None else _REPLICATOR

    @property
    def label(self) -> str:
        base = ("replicator" if self.link is None
                else f"payoff-functional({self.link.family})")
        if self.speed is None:
            return base
        factor = self.speed if isinstance(self.speed, float) else self.speed.family
        return f"{base}*speed({factor})"


@dataclass(frozen=True)
class Coupled:
    """Second population with its own game (payoffs against population one)."""

    game: Game
    rule: GrowthRule
    y0: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Sampled run; log_states are authoritative, states derived on access."""

    times: np.ndarray
    log_states: np.ndarray
    opp_states: np.ndarray | None = None
    opp_log_states: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def states(self) -> np.ndarray:
        return np.exp(self.log_states)

    def __len__(self) -> int:
        return self.times.shape[0]


def vector_field(rule: GrowthRule, game: Game, x, y=None) -> np.ndarray:
    """Reference right-hand side in frequency space (not used by the integrator)."""
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    f = rule.effective_link
    u = game.payoff @ y
    g = np.array([eval_link(f, ui) if xi > 0 else 0.0 for ui, xi in zip(u, x)])
    gbar = float(x @ g)
    lam = 1.0
    if isinstance(rule.speed, float):
        lam = rule.speed
    elif isinstance(rule.speed, LinkFunction):
        lam = eval_link(rule.speed, float(x @ u))
        if lam <= 0:
            raise IntegrationError(f"speed factor {lam:g} is not positive")
    return lam * x * (g - gbar)


def _speed_args(rule: GrowthRule, coupled: bool):
    if rule.speed is None:
        return (0, 1.0) + _NO_LINK
    if isinstance(rule.speed, float):
        return (0, rule.speed) + _NO_LINK
    if coupled:
        raise ValueError("payoff-dependent speed is not supported with a coupled opponent")
    return (1, 1.0) + kernel_args(rule.speed)


def _log_state(x0, n, what) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"{what} must have length {n}, got shape {x.shape}")
    validate_simplex(x, what=what)
    with np.errstate(divide="ignore"):
        z = np.log(np.maximum(x, 0.0))
    return z


def _segments(t_max: float, dt: float, schedule: Schedule | None):
    """Segment bounds cut at every schedule breakpoint inside the horizon."""
    cuts = []
    if schedule is not None:
        P = schedule.period
        marks = list(schedule.times[1:]) + [P]
        k = 0
        while k * P < t_max:
            for tb in ([0.0] if k else []) + marks:
                e = k * P + tb
                if 0.0 < e < t_max:
                    cuts.append(e)
            k += 1
    tol = 1e-12 * max(1.0, t_max)
    bounds = [0.0]
    for e in sorted(cuts):
        if e - bounds[-1] > tol and t_max - e > tol:
            bounds.append(e)
    bounds.append(t_max)
    bounds = np.array(bounds)
    steps = np.maximum(1, np.ceil(np.diff(bounds) / dt - 1e-9).astype(np.int64))
    return bounds, steps


def _raise_for_status(status, info, n_pops=1):
    t = float(info[_kernels.I_TIME])
    step = int(info[_kernels.I_STEP])
    idx = float(info[_kernels.I_INDEX])
    if idx < 0:
        where = f"population 2 strategy {int(-idx - 1)}"
    else:
        where = f"strategy {int(idx)}" if n_pops == 1 else f"population 1 strategy {int(idx)}"
    if status == _kernels.ERR_DOMAIN:
        msg = f"payoff left the link domain near t={t:g} ({where})"
    elif status == _kernels.ERR_SPEED:
        msg = f"speed factor not positive (or outside its table) near t={t:g}"
    elif status == _kernels.ERR_NUMERATOR:
        msg = f"background plus growth rate not positive at generation {step} ({where})"
    else:
        msg = f"state became non-finite near t={t:g}"
    raise IntegrationError(msg, t=t, step=step)


def integrate(rule: GrowthRule, game: Game, x0,
              opponent: Schedule | Coupled | None = None,
              t_max: float = 200.0, dt: float = 1e-3,
              sample_every: int = 100) -> Trajectory:
    """Run the flow from x0 for t_max time units with fixed step dt.

    opponent None plays the population against itself (square game);
    a Schedule scripts the column player; a Coupled instance evolves a second
    population by its own rule. Samples are kept at the start, every
    sample_every-th accepted step, and the end.
    """
    if not (math.isfinite(t_max) and t_max > 0):
        raise ValueError(f"t_max must be positive, got {t_max!r}")
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    n, m = game.n_rows, game.n_cols
    z = _log_state(x0, n, "initial state")
    link_a = kernel_args(rule.effective_link)
    info = np.zeros(4)

    if isinstance(opponent, Coupled):
        if opponent.game.n_rows != m or opponent.game.n_cols != n:
            raise ValueError(
                f"coupled game must be {m}x{n} (opponent strategies x ours), "
                f"got {opponent.game.n_rows}x{opponent.game.n_cols}")
        z2 = _log_state(opponent.y0, m, "coupled initial state")
        speed_c = _speed_args(rule, coupled=True)[1]
        if opponent.rule.speed is not None:
            raise ValueError("speed belongs to the first population's rule in coupled runs")
        bounds, steps = _segments(t_max, dt, None)
        total = int(steps.sum())
        S = total // sample_every + 2
        ts = np.zeros(S)
        zs = np.zeros((S, n))
        ws = np.zeros((S, m))
        status, count = _kernels.run_continuous_coupled(
            z, z2, game.payoff, opponent.game.payoff,
            *link_a, *kernel_args(opponent.rule.effective_link),
            speed_c, bounds, steps, sample_every, ts, zs, ws, info)
        if status != _kernels.OK:
            _raise_for_status(status, info, n_pops=2)
        meta = {"dynamics": "continuous", "steps": total, "dt": dt,
                "t_max": t_max, "max_drift": float(info[_kernels.I_DRIFT]),
                "sample_every": sample_every, "opponent": "coupled",
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
        sched_a = _NO_SCHED
        scripted = False
    else:
        raise TypeError(f"unsupported opponent {opponent!r}")

    bounds, steps = _segments(t_max, dt, opponent if scripted else None)
    total = int(steps.sum())
    S = total // sample_every + 2
    ts = np.zeros(S)
    zs = np.zeros((S, n))
    ys = np.zeros((S, m)) if scripted else np.zeros((1, 1))
    status, count = _kernels.run_continuous(
        z, game.payoff, *link_a, *_speed_args(rule, coupled=False),
        scripted, *sched_a, bounds, steps, sample_every, ts, zs, ys, info)
    if status != _kernels.OK:
        _raise_for_status(status, info)
    meta = {"dynamics": "continuous", "steps": total, "dt": dt,
            "t_max": t_max, "max_drift": float(info[_kernels.I_DRIFT]),
            "sample_every": sample_every,
            "opponent": "scripted" if scripted else "self",
            "rule": rule.label, "game": game.digest()}
    return Trajectory(ts[:count], zs[:count],
                      ys[:count] if scripted else None, None, meta)


def mean_payoff(game: Game, x, y=None) -> float:
    """Population-average payoff, against itself unless y is given."""
    x = np.asarray(x, dtype=float)
    return payoff_mixed(game, x, x if y is None else y)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Plain CSV: time column, one frequency column per strategy, opponent
    columns appended when the run had a distinct opponent. Full precision."""
    n = traj.log_states.shape[1]
    cols = ["t"] + [f"x{i + 1}" for i in range(n)]
    blocks = [traj.times[:, None], traj.states]
    if traj.opp_states is not None:
        m = traj.opp_states.shape[1]
        cols += [f"y{j + 1}" for j in range(m)]
        blocks.append(traj.opp_states)
    data = np.hstack(blocks)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
