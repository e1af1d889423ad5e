"""Compiled inner loops for the continuous flow and the discrete ratio map.

Everything here works in log coordinates: the state is z_i = ln x_i, with
exactly -inf marking coordinates outside the support (those are never touched,
so faces of the simplex are invariant to the bit). Frequencies are
renormalized after every step and the worst pre-renormalization drift is
reported back for diagnostics.

Numba is used when importable; otherwise the same functions run as plain
Python, just slower.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap

OK = 0
ERR_DOMAIN = 1
ERR_NONFINITE = 2
ERR_SPEED = 3
ERR_NUMERATOR = 4

# info slots written by the kernels
I_DRIFT = 0
I_TIME = 1
I_STEP = 2
I_INDEX = 3


@njit(cache=True)
def _link_eval(code, p0, p1, xs, ys, lo, hi, pad, u):
    """One link evaluation; nan signals a domain violation."""
    if u < lo - pad or u > hi + pad or not math.isfinite(u):
        return np.nan
    v = u
    if v < lo:
        v = lo
    elif v > hi:
        v = hi
    if code == 0:
        return p0 * v + p1
    if code == 1:
        return v ** p0
    if code == 2:
        return math.exp(p0 * v)
    if code == 3:
        return math.log(v)
    if code == 4:
        return math.sqrt(v)
    return np.interp(v, xs, ys)


@njit(cache=True)
def _sched_eval(period, times, values, t, out):
    """Periodic piecewise-linear schedule; wraps back to the first row."""
    tau = t - period * math.floor(t / period)
    if tau >= period:
        tau = 0.0
    k = times.shape[0] - 1
    for j in range(times.shape[0] - 1):
        if tau < times[j + 1]:
            k = j
            break
    t0 = times[k]
    if k == times.shape[0] - 1:
        t1 = period
    else:
        t1 = times[k + 1]
    w = 0.0
    if t1 > t0:
        w = (tau - t0) / (t1 - t0)
    k1 = 0 if k == times.shape[0] - 1 else k + 1
    for i in range(out.shape[0]):
        out[i] = values[k, i] + w * (values[k1, i] - values[k, i])


@njit(cache=True)
def _x_from_z(z, active, x):
    """Frequencies from logs via a shifted softmax; returns the raw mass."""
    m = -np.inf
    for i in range(z.shape[0]):
        if active[i] and z[i] > m:
            m = z[i]
    s = 0.0
    for i in range(z.shape[0]):
        if active[i]:
            x[i] = math.exp(z[i] - m)
            s += x[i]
        else:
            x[i] = 0.0
    for i in range(z.shape[0]):
        if active[i]:
            x[i] /= s
    return math.exp(m) * s


@njit(cache=True)
def _growth(x, y, A, code, p0, p1, xs, ys, lo, hi, pad, active, u, g, info):
    """Payoffs u = A y and growth rates g = f(u) on the active coordinates.

    Returns (status, gbar, ubar).
    """
    gbar = 0.0
    ubar = 0.0
    for i in range(A.shape[0]):
        if not active[i]:
            u[i] = 0.0
            g[i] = 0.0
            continue
        acc = 0.0
        for j in range(A.shape[1]):
            acc += A[i, j] * y[j]
        u[i] = acc
        gi = _link_eval(code, p0, p1, xs, ys, lo, hi, pad, acc)
        if not math.isfinite(gi):
            info[I_INDEX] = i
            return ERR_DOMAIN, 0.0, 0.0
        g[i] = gi
        gbar += x[i] * gi
        ubar += x[i] * acc
    return OK, gbar, ubar


@njit(cache=True)
def _deriv_single(z, t, A, code, p0, p1, xs, ys, lo, hi, pad,
                  speed_mode, speed_c, sc, sp0, sp1, sxs, sys, slo, shi, spad,
                  scripted, period, stimes, svalues,
                  active, x, y, u, g, dz, info):
    _x_from_z(z, active, x)
    if scripted:
        _sched_eval(period, stimes, svalues, t, y)
    else:
        for j in range(y.shape[0]):
            y[j] = x[j]
    status, gbar, ubar = _growth(x, y, A, code, p0, p1, xs, ys, lo, hi, pad,
                                 active, u, g, info)
    if status != OK:
        return status
    lam = speed_c
    if speed_mode == 1:
        lam = _link_eval(sc, sp0, sp1, sxs, sys, slo, shi, spad, ubar)
    if not math.isfinite(lam) or lam <= 0.0:
        return ERR_SPEED
    for i in range(z.shape[0]):
        dz[i] = lam * (g[i] - gbar) if active[i] else 0.0
    return OK


@njit(cache=True)
def _renorm(z, active, info):
    """Project logs back onto the simplex; track drift; flag blowups."""
    s = 0.0
    for i in range(z.shape[0]):
        if active[i]:
            if math.isnan(z[i]) or z[i] == np.inf:
                return ERR_NONFINITE
            s += math.exp(z[i])
    if not math.isfinite(s) or s <= 0.0:
        return ERR_NONFINITE
    drift = abs(s - 1.0)
    if drift > info[I_DRIFT]:
        info[I_DRIFT] = drift
    c = math.log(s)
    for i in range(z.shape[0]):
        if active[i]:
            z[i] -= c
    return OK


@njit(cache=True)
def run_continuous(z, A, code, p0, p1, xs, ys, lo, hi, pad,
                   speed_mode, speed_c, sc, sp0, sp1, sxs, sys, slo, shi, spad,
                   scripted, period, stimes, svalues,
                   seg_bounds, seg_steps, sample_every,
                   ts_out, zs_out, ys_out, info):
    """RK4 flow of one population; opponent is itself or a scripted schedule.

    Samples land at step 0, every sample_every-th step, and the last step.
    Returns (status, number of samples written).
    """
    n = z.shape[0]
    m = A.shape[1]
    active = np.empty(n, dtype=np.bool_)
    for i in range(n):
        active[i] = z[i] != -np.inf
    x = np.zeros(n)
    y = np.zeros(m)
    u = np.zeros(n)
    g = np.zeros(n)
    k1 = np.zeros(n)
    k2 = np.zeros(n)
    k3 = np.zeros(n)
    k4 = np.zeros(n)
    zt = np.zeros(n)

    total_steps = 0
    for j in range(seg_steps.shape[0]):
        total_steps += seg_steps[j]

    t = seg_bounds[0]
    sidx = 0
    ts_out[sidx] = t
    for i in range(n):
        zs_out[sidx, i] = z[i]
    if scripted:
        _sched_eval(period, stimes, svalues, t, y)
        for j in range(m):
            ys_out[sidx, j] = y[j]
    sidx += 1

    step = 0
    for seg in range(seg_steps.shape[0]):
        a = seg_bounds[seg]
        b = seg_bounds[seg + 1]
        ns = seg_steps[seg]
        h = (b - a) / ns
        for k in range(ns):
            t0 = a + k * h
            st = _deriv_single(z, t0, A, code, p0, p1, xs, ys, lo, hi, pad,
                               speed_mode, speed_c, sc, sp0, sp1, sxs, sys,
                               slo, shi, spad, scripted, period, stimes,
                               svalues, active, x, y, u, g, k1, info)
            if st == OK:
                for i in range(n):
                    zt[i] = z[i] + 0.5 * h * k1[i]
                st = _deriv_single(zt, t0 + 0.5 * h, A, code, p0, p1, xs, ys,
                                   lo, hi, pad, speed_mode, speed_c, sc, sp0,
                                   sp1, sxs, sys, slo, shi, spad, scripted,
                                   period, stimes, svalues, active, x, y, u,
                                   g, k2, info)
            if st == OK:
                for i in range(n):
                    zt[i] = z[i] + 0.5 * h * k2[i]
                st = _deriv_single(zt, t0 + 0.5 * h, A, code, p0, p1, xs, ys,
                                   lo, hi, pad, speed_mode, speed_c, sc, sp0,
                                   sp1, sxs, sys, slo, shi, spad, scripted,
                                   period, stimes, svalues, active, x, y, u,
                                   g, k3, info)
            if st == OK:
                for i in range(n):
                    zt[i] = z[i] + h * k3[i]
                st = _deriv_single(zt, t0 + h, A, code, p0, p1, xs, ys, lo,
                                   hi, pad, speed_mode, speed_c, sc, sp0, sp1,
                                   sxs, sys, slo, shi, spad, scripted, period,
                                   stimes, svalues, active, x, y, u, g, k4,
                                   info)
            if st == OK:
                for i in range(n):
                    z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                st = _renorm(z, active, info)
            if st != OK:
                info[I_TIME] = t0
                info[I_STEP] = step
                return st, sidx
            step += 1
            t = b if k == ns - 1 else a + (k + 1) * h
            if step % sample_every == 0 or step == total_steps:
                ts_out[sidx] = t
                for i in range(n):
                    zs_out[sidx, i] = z[i]
                if scripted:
                    _sched_eval(period, stimes, svalues, t, y)
                    for j in range(m):
                        ys_out[sidx, j] = y[j]
                sidx += 1
    return OK, sidx


@njit(cache=True)
def _deriv_coupled(z1, z2, A, B,
                   c1, c1p0, c1p1, c1xs, c1ys, c1lo, c1hi, c1pad,
                   c2, c2p0, c2p1, c2xs, c2ys, c2lo, c2hi, c2pad,
                   speed_c, a1, a2, x1, x2, u1, u2, g1, g2, d1, d2, info):
    _x_from_z(z1, a1, x1)
    _x_from_z(z2, a2, x2)
    st, gbar1, _ = _growth(x1, x2, A, c1, c1p0, c1p1, c1xs, c1ys, c1lo, c1hi,
                           c1pad, a1, u1, g1, info)
    if st != OK:
        return st
    st, gbar2, _ = _growth(x2, x1, B, c2, c2p0, c2p1, c2xs, c2ys, c2lo, c2hi,
                           c2pad, a2, u2, g2, info)
    if st != OK:
        info[I_INDEX] = -info[I_INDEX] - 1.0  # negative marks population 2
        return st
    for i in range(z1.shape[0]):
        d1[i] = speed_c * (g1[i] - gbar1) if a1[i] else 0.0
    for j in range(z2.shape[0]):
        d2[j] = speed_c * (g2[j] - gbar2) if a2[j] else 0.0
    return OK


@njit(cache=True)
def run_continuous_coupled(z1, z2, A, B,
                           c1, c1p0, c1p1, c1xs, c1ys, c1lo, c1hi, c1pad,
                           c2, c2p0, c2p1, c2xs, c2ys, c2lo, c2hi, c2pad,
                           speed_c, seg_bounds, seg_steps, sample_every,
                           ts_out, zs_out, ys_out, info):
    """RK4 flow of two populations playing each other (A: 1 vs 2, B: 2 vs 1)."""
    n = z1.shape[0]
    m = z2.shape[0]
    a1 = np.empty(n, dtype=np.bool_)
    a2 = np.empty(m, dtype=np.bool_)
    for i in range(n):
        a1[i] = z1[i] != -np.inf
    for j in range(m):
        a2[j] = z2[j] != -np.inf
    x1 = np.zeros(n)
    x2 = np.zeros(m)
    u1 = np.zeros(n)
    u2 = np.zeros(m)
    g1 = np.zeros(n)
    g2 = np.zeros(m)
    p1k = np.zeros((4, n))
    p2k = np.zeros((4, m))
    zt1 = np.zeros(n)
    zt2 = np.zeros(m)

    total_steps = 0
    for j in range(seg_steps.shape[0]):
        total_steps += seg_steps[j]

    t = seg_bounds[0]
    sidx = 0
    ts_out[sidx] = t
    for i in range(n):
        zs_out[sidx, i] = z1[i]
    for j in range(m):
        ys_out[sidx, j] = z2[j]
    sidx += 1

    step = 0
    coef = np.array([0.0, 0.5, 0.5, 1.0])
    for seg in range(seg_steps.shape[0]):
        a = seg_bounds[seg]
        b = seg_bounds[seg + 1]
        ns = seg_steps[seg]
        h = (b - a) / ns
        for k in range(ns):
            st = OK
            for stage in range(4):
                for i in range(n):
                    zt1[i] = z1[i] + coef[stage] * h * p1k[stage - 1, i] if stage else z1[i]
                for j in range(m):
                    zt2[j] = z2[j] + coef[stage] * h * p2k[stage - 1, j] if stage else z2[j]
                st = _deriv_coupled(zt1, zt2, A, B,
                                    c1, c1p0, c1p1, c1xs, c1ys, c1lo, c1hi,
                                    c1pad, c2, c2p0, c2p1, c2xs, c2ys, c2lo,
                                    c2hi, c2pad, speed_c, a1, a2, x1, x2,
                                    u1, u2, g1, g2, p1k[stage], p2k[stage],
                                    info)
                if st != OK:
                    break
            if st == OK:
                for i in range(n):
                    z1[i] += h / 6.0 * (p1k[0, i] + 2.0 * p1k[1, i]
                                        + 2.0 * p1k[2, i] + p1k[3, i])
                for j in range(m):
                    z2[j] += h / 6.0 * (p2k[0, j] + 2.0 * p2k[1, j]
                                        + 2.0 * p2k[2, j] + p2k[3, j])
                st = _renorm(z1, a1, info)
                if st == OK:
                    st = _renorm(z2, a2, info)
            if st != OK:
                info[I_TIME] = a + k * h
                info[I_STEP] = step
                return st, sidx
            step += 1
            t = b if k == ns - 1 else a + (k + 1) * h
            if step % sample_every == 0 or step == total_steps:
                ts_out[sidx] = t
                for i in range(n):
                    zs_out[sidx, i] = z1[i]
                for j in range(m):
                    ys_out[sidx, j] = z2[j]
                sidx += 1
    return OK, sidx


@njit(cache=True)
def _background(mode, c0, p, nstep):
    if mode == 0:
        return c0
    if mode == 1:
        return c0 + p * nstep
    # geometric through logs so huge horizons saturate to +inf instead of erroring
    return math.exp(math.log(c0) + nstep * math.log(p))


@njit(cache=True)
def run_discrete(z, A, code, p0, p1, xs, ys, lo, hi, pad,
                 bg_mode, bg_c0, bg_p,
                 scripted, period, stimes, svalues,
                 n_steps, sample_every, ts_out, zs_out, ys_out, info):
    """Ratio-map iteration x'_i = x_i (C_n + g_i) / (C_n + gbar), in logs.

    The log increment is log1p((g_i - gbar) / (C_n + gbar)), which stays exact
    when the background saturates to +inf (the map freezes). Any nonpositive
    numerator C_n + g_i aborts with ERR_NUMERATOR.
    """
    n = z.shape[0]
    m = A.shape[1]
    active = np.empty(n, dtype=np.bool_)
    for i in range(n):
        active[i] = z[i] != -np.inf
    x = np.zeros(n)
    y = np.zeros(m)
    u = np.zeros(n)
    g = np.zeros(n)

    sidx = 0
    ts_out[sidx] = 0.0
    for i in range(n):
        zs_out[sidx, i] = z[i]
    if scripted:
        _sched_eval(period, stimes, svalues, 0.0, y)
        for j in range(m):
            ys_out[sidx, j] = y[j]
    sidx += 1

    for step in range(n_steps):
        _x_from_z(z, active, x)
        if scripted:
            _sched_eval(period, stimes, svalues, float(step), y)
        else:
            for j in range(m):
                y[j] = x[j]
        st, gbar, _ = _growth(x, y, A, code, p0, p1, xs, ys, lo, hi, pad,
                              active, u, g, info)
        if st != OK:
            info[I_TIME] = float(step)
            info[I_STEP] = step
            return st, sidx
        C = _background(bg_mode, bg_c0, bg_p, step)
        denom = C + gbar
        for i in range(n):
            if not active[i]:
                continue
            if C + g[i] <= 0.0:
                info[I_TIME] = float(step)
                info[I_STEP] = step
                info[I_INDEX] = i
                return ERR_NUMERATOR, sidx
            z[i] += math.log1p((g[i] - gbar) / denom)
        st = _renorm(z, active, info)
        if st != OK:
            info[I_TIME] = float(step)
            info[I_STEP] = step
            return st, sidx
        done = step + 1
        if done % sample_every == 0 or done == n_steps:
            ts_out[sidx] = float(done)
            for i in range(n):
                zs_out[sidx, i] = z[i]
            if scripted:
                _sched_eval(period, stimes, svalues, float(done), y)
                for j in range(m):
                    ys_out[sidx, j] = y[j]
            sidx += 1
    return OK, sidx


@njit(cache=True)
def run_discrete_coupled(z1, z2, A, B,
                         c1, c1p0, c1p1, c1xs, c1ys, c1lo, c1hi, c1pad,
                         c2, c2p0, c2p1, c2xs, c2ys, c2lo, c2hi, c2pad,
                         bg_mode, bg_c0, bg_p,
                         n_steps, sample_every, ts_out, zs_out, ys_out, info):
    """Simultaneous ratio-map update of two coupled populations."""
    n = z1.shape[0]
    m = z2.shape[0]
    a1 = np.empty(n, dtype=np.bool_)
    a2 = np.empty(m, dtype=np.bool_)
    for i in range(n):
        a1[i] = z1[i] != -np.inf
    for j in range(m):
        a2[j] = z2[j] != -np.inf
    x1 = np.zeros(n)
    x2 = np.zeros(m)
    u1 = np.zeros(n)
    u2 = np.zeros(m)
    g1 = np.zeros(n)
    g2 = np.zeros(m)

    sidx = 0
    ts_out[sidx] = 0.0
    for i in range(n):
        zs_out[sidx, i] = z1[i]
    for j in range(m):
        ys_out[sidx, j] = z2[j]
    sidx += 1

    for step in range(n_steps):
        _x_from_z(z1, a1, x1)
        _x_from_z(z2, a2, x2)
        st, gbar1, _ = _growth(x1, x2, A, c1, c1p0, c1p1, c1xs, c1ys, c1lo,
                               c1hi, c1pad, a1, u1, g1, info)
        if st == OK:
            st, gbar2, _ = _growth(x2, x1, B, c2, c2p0, c2p1, c2xs, c2ys,
                                   c2lo, c2hi, c2pad, a2, u2, g2, info)
            if st != OK:
                info[I_INDEX] = -info[I_INDEX] - 1.0
        if st != OK:
            info[I_TIME] = float(step)
            info[I_STEP] = step
            return st, sidx
        C = _background(bg_mode, bg_c0, bg_p, step)
        d1 = C + gbar1
        d2 = C + gbar2
        for i in range(n):
            if a1[i]:
                if C + g1[i] <= 0.0:
                    info[I_TIME] = float(step)
                    info[I_STEP] = step
                    info[I_INDEX] = i
                    return ERR_NUMERATOR, sidx
                z1[i] += math.log1p((g1[i] - gbar1) / d1)
        for j in range(m):
            if a2[j]:
                if C + g2[j] <= 0.0:
                    info[I_TIME] = float(step)
                    info[I_STEP] = step
                    info[I_INDEX] = -j - 1.0
                    return ERR_NUMERATOR, sidx
                z2[j] += math.log1p((g2[j] - gbar2) / d2)
        st = _renorm(z1, a1, info)
        if st == OK:
            st = _renorm(z2, a2, info)
        if st != OK:
            info[I_TIME] = float(step)
            info[I_STEP] = step
            return st, sidx
        done = step + 1
        if done % sample_every == 0 or done == n_steps:
            ts_out[sidx] = float(done)
            for i in range(n):
                zs_out[sidx, i] = z1[i]
            for j in range(m):
                ys_out[sidx, j] = z2[j]
            sidx += 1
    return OK, sidx
