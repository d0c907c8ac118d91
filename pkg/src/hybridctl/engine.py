"""Compiled closed-loop integration core.

Everything on the hot path lives here as nopython kernels: the joint
state derivative (plant + controller + noise shaping filters), the
fixed-step third-order loop, the cost quadrature and the batched
objective used by the tuner.  The joint state vector is laid out as

    [plant (11) | controller (nc) | wind filter (2) | solar (2) | load (2)]

Noise samples are drawn ahead of time (one column per noise interval)
so a run is a pure function of its sample array.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .controllers import _controller_eval
from .plant import _plant_deriv_core

N_PLANT = 11

# Recorded columns after t.
SERIES_COLUMNS = ("df", "u", "p_wtg", "p_stpg", "p_fc1", "p_fc2", "p_deg",
                  "p_fess", "p_bess", "p_uc", "p_load")


@njit(cache=True)
def _profile_value(i, t, xf0, xf1, phi, prof, gn, gt, gc, an, at_, ac):
    g_out = prof[i, 3] * xf0 + prof[i, 5] * xf1
    high = phi - g_out
    xi = prof[i, 2] * (1.0 + prof[i, 0] * high / prof[i, 1])
    gamma = 0.0
    for j in range(gn[i]):
        if t >= gt[i, j]:
            gamma = gc[i, j]
    add = 0.0
    for j in range(an[i]):
        if t >= at_[i, j]:
            add = ac[i, j]
    return xi * gamma + add


@njit(cache=True)
def _joint_deriv(t, y, dy, phi_w, phi_s, phi_l, err_sign, plant_pack,
                 ctrl_pack, prof_pack, nc):
    pp, conn, limits = plant_pack
    kind, pk, ad, bd, cd, dd0, ai, bi, ci, di0, centers, table = ctrl_pack
    prof, gn, gt, gc, an, at_, ac = prof_pack

    base = N_PLANT + nc
    p_w = _profile_value(0, t, y[base], y[base + 1], phi_w, prof, gn, gt, gc,
                         an, at_, ac)
    p_s = _profile_value(1, t, y[base + 2], y[base + 3], phi_s, prof, gn, gt,
                         gc, an, at_, ac)
    p_l = _profile_value(2, t, y[base + 4], y[base + 5], phi_l, prof, gn, gt,
                         gc, an, at_, ac)
    dy[base] = (phi_w - y[base]) / prof[0, 4]
    dy[base + 1] = (phi_w - y[base + 1]) / prof[0, 6]
    dy[base + 2] = (phi_s - y[base + 2]) / prof[1, 4]
    dy[base + 3] = (phi_s - y[base + 3]) / prof[1, 6]
    dy[base + 4] = (phi_l - y[base + 4]) / prof[2, 4]
    dy[base + 5] = (phi_l - y[base + 5]) / prof[2, 6]

    e = err_sign * y[10]
    u = _controller_eval(kind, pk, ad, bd, cd, dd0, ai, bi, ci, di0, centers,
                         table, y[N_PLANT:N_PLANT + nc], e,
                         dy[N_PLANT:N_PLANT + nc])
    _plant_deriv_core(y[:N_PLANT], u, p_w, p_s, p_l, pp, conn, limits,
                      dy[:N_PLANT])
    return u


@njit(cache=True)
def _record_row(series, row, t, y, u, phi_l, conn, prof_pack, nc,
                record_full):
    series[row, 0] = y[10]
    series[row, 1] = u
    if record_full:
        prof, gn, gt, gc, an, at_, ac = prof_pack
        base = N_PLANT + nc
        series[row, 2] = y[0] * conn[0]
        series[row, 3] = y[2] * conn[1]
        series[row, 4] = y[4] * conn[3]
        series[row, 5] = y[5] * conn[4]
        series[row, 6] = y[6] * conn[5]
        series[row, 7] = y[7] * conn[6]
        series[row, 8] = y[8] * conn[7]
        series[row, 9] = y[9] * conn[8]
        series[row, 10] = _profile_value(2, t, y[base + 4], y[base + 5],
                                         phi_l, prof, gn, gt, gc, an, at_, ac)


@njit(cache=True)
def _simulate_core(h, n_steps, stride, phi, err_sign, plant_pack, ctrl_pack,
                   prof_pack, nc, series, record_full):
    """Integrate the closed loop; returns (status, steps completed).

    status 0 = finished, 1 = state went non-finite (run diverged).
    Each step evaluates three derivative stages

        k1 at t, k2 at t + h/2, k3 at t + 3h/4

    and advances by h (2 k1 + 3 k2 + 4 k3) / 9.
    """
    pp, conn, limits = plant_pack
    n = N_PLANT + nc + 6
    y = np.zeros(n)
    k1 = np.zeros(n)
    k2 = np.zeros(n)
    k3 = np.zeros(n)
    yb = np.zeros(n)
    n_noise = phi.shape[1]

    for i in range(n_steps):
        t = i * h
        ni = i // stride
        if ni >= n_noise:
            ni = n_noise - 1
        phi_w = phi[0, ni]
        phi_s = phi[1, ni]
        phi_l = phi[2, ni]

        u0 = _joint_deriv(t, y, k1, phi_w, phi_s, phi_l, err_sign,
                          plant_pack, ctrl_pack, prof_pack, nc)
        _record_row(series, i, t, y, u0, phi_l, conn, prof_pack, nc,
                    record_full)

        for j in range(n):
            yb[j] = y[j] + 0.5 * h * k1[j]
        _joint_deriv(t + 0.5 * h, yb, k2, phi_w, phi_s, phi_l, err_sign,
                     plant_pack, ctrl_pack, prof_pack, nc)
        for j in range(n):
            yb[j] = y[j] + 0.75 * h * k2[j]
        _joint_deriv(t + 0.75 * h, yb, k3, phi_w, phi_s, phi_l, err_sign,
                     plant_pack, ctrl_pack, prof_pack, nc)

        ok = True
        for j in range(n):
            y[j] += h * (2.0 * k1[j] + 3.0 * k2[j] + 4.0 * k3[j]) / 9.0
            if not np.isfinite(y[j]):
                ok = False
        if not ok:
            return 1, i + 1

    t = n_steps * h
    ni = (n_steps - 1) // stride
    if ni >= n_noise:
        ni = n_noise - 1
    u0 = _joint_deriv(t, y, k1, phi[0, ni], phi[1, ni], phi[2, ni], err_sign,
                      plant_pack, ctrl_pack, prof_pack, nc)
    _record_row(series, n_steps, t, y, u0, phi[2, ni], conn, prof_pack, nc,
                record_full)
    return 0, n_steps


@njit(cache=True)
def _metrics_core(series, h, uss, w1, w2):
    """Trapezoid quadrature of the squared error and control deviation."""
    n = series.shape[0]
    ise = 0.0
    isdco = 0.0
    for i in range(n - 1):
        f0 = series[i, 0] * series[i, 0]
        f1 = series[i + 1, 0] * series[i + 1, 0]
        ise += 0.5 * (f0 + f1) * h
        g0 = series[i, 1] - uss[i]
        g1 = series[i + 1, 1] - uss[i + 1]
        isdco += 0.5 * (g0 * g0 + g1 * g1) * h
    return w1 * ise + w2 * isdco, ise, isdco


@njit(cache=True)
def _batch_objective(h, n_steps, stride, phi_all, err_sign, plant_pack,
                     kind, pks, ads, bds, cds, dd0s, ais, bis, cis, di0s,
                     centers, table, prof_pack, nc, uss, w1, w2, out):
    """Mean cost per candidate over shared noise realizations."""
    n_cand = pks.shape[0]
    n_real = phi_all.shape[0]
    for p in range(n_cand):
        ctrl_pack = (kind, pks[p], ads[p], bds[p], cds[p], dd0s[p], ais[p],
                     bis[p], cis[p], di0s[p], centers, table)
        acc = 0.0
        diverged = False
        for r in range(n_real):
            series = np.empty((n_steps + 1, 2))
            status, _ = _simulate_core(h, n_steps, stride, phi_all[r],
                                       err_sign, plant_pack, ctrl_pack,
                                       prof_pack, nc, series, False)
            if status != 0:
                diverged = True
                break
            j_val, _, _ = _metrics_core(series, h, uss, w1, w2)
            acc += j_val
        out[p] = np.inf if diverged else acc / n_real
