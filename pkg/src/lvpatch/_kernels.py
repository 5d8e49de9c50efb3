"""Compiled RK4 kernel for the two-patch model.

Mirrors ``integrator._run_rk4`` + ``model.vector_field`` step for step; the
pure-numpy path stays available for arbitrary vector fields and as a cross-check.
"""

import numpy as np
from numba import njit

OK = 0
UNDERFLOW = 1


@njit(cache=True)
def _coefficients(const, sin_amp, cos_amp, freqs, t, out):
    P = const.shape[0]
    for p in range(P):
        for j in range(14):
            out[p, j] = const[p, j]
    for f in range(freqs.shape[0]):
        s = np.sin(freqs[f] * t)
        c = np.cos(freqs[f] * t)
        for p in range(P):
            for j in range(14):
                out[p, j] += sin_amp[f, p, j] * s
                out[p, j] += cos_amp[f, p, j] * c


@njit(cache=True)
def _field(cv, z, out):
    P = cv.shape[0]
    for b in range(z.shape[0]):
        p = 0 if P == 1 else b
        x1 = z[b, 0]
        y1 = z[b, 1]
        x2 = z[b, 2]
        y2 = z[b, 3]
        dx = cv[p, 12] * (x2 - x1)
        dy = cv[p, 13] * (y2 - y1)
        out[b, 0] = x1 * (cv[p, 0] - cv[p, 4] * x1 - cv[p, 5] * y1) + dx
        out[b, 1] = y1 * (cv[p, 1] - cv[p, 6] * x1 - cv[p, 7] * y1) + dy
        out[b, 2] = x2 * (cv[p, 2] - cv[p, 8] * x2 - cv[p, 9] * y2) - dx
        out[b, 3] = y2 * (cv[p, 3] - cv[p, 10] * x2 - cv[p, 11] * y2) - dy


@njit(cache=True)
def _eval(const, sin_amp, cos_amp, freqs, t, z, cv, out):
    _coefficients(const, sin_amp, cos_amp, freqs, t, cv)
    _field(cv, z, out)


@njit(cache=True)
def _try_step(const, sin_amp, cos_amp, freqs, t, z, h, k1, cv, k2, k3, k4, tmp, znew):
    B = z.shape[0]
    for b in range(B):
        for i in range(4):
            tmp[b, i] = z[b, i] + 0.5 * h * k1[b, i]
    _eval(const, sin_amp, cos_amp, freqs, t + 0.5 * h, tmp, cv, k2)
    for b in range(B):
        for i in range(4):
            tmp[b, i] = z[b, i] + 0.5 * h * k2[b, i]
    _eval(const, sin_amp, cos_amp, freqs, t + 0.5 * h, tmp, cv, k3)
    for b in range(B):
        for i in range(4):
            tmp[b, i] = z[b, i] + h * k3[b, i]
    _eval(const, sin_amp, cos_amp, freqs, t + h, tmp, cv, k4)
    good = True
    for b in range(B):
        for i in range(4):
            v = z[b, i] + (h / 6.0) * (k1[b, i] + 2.0 * k2[b, i] + 2.0 * k3[b, i] + k4[b, i])
            znew[b, i] = v
            if not (v > 0.0) or not np.isfinite(v):
                good = False
    return good


@njit(cache=True)
def rk4_run(const, sin_amp, cos_amp, freqs, z0, t0, t1, h, n, stride, h_min):
    """Fixed-step RK4 on the grid ``t0 + k h`` (last node ``t1``).

    A step leaving the open positive orthant is replaced by two half steps,
    recursively. Returns ``(ts, zs, ks, status, fail_t)``.
    """
    B = z0.shape[0]
    n_rec = n // stride + 2
    ts = np.empty(n_rec)
    zs = np.empty((n_rec, B, 4))
    ks = np.empty((n_rec, B, 4))
    cv = np.empty((const.shape[0], 14))
    z = z0.copy()
    k = np.empty((B, 4))
    k2 = np.empty((B, 4))
    k3 = np.empty((B, 4))
    k4 = np.empty((B, 4))
    tmp = np.empty((B, 4))
    znew = np.empty((B, 4))
    _eval(const, sin_amp, cos_amp, freqs, t0, z, cv, k)
    ts[0] = t0
    zs[0] = z
    ks[0] = k
    r = 1
    # pending subintervals (start, size), processed LIFO
    st_start = np.empty(128)
    st_size = np.empty(128)
    t = t0
    for step in range(1, n + 1):
        t_next = t1 if step == n else t0 + step * h
        top = 0
        st_start[0] = t
        st_size[0] = t_next - t
        first = True
        while top >= 0:
            s0 = st_start[top]
            sz = st_size[top]
            top -= 1
            if not first:
                _eval(const, sin_amp, cos_amp, freqs, s0, z, cv, k)
            first = False
            if _try_step(const, sin_amp, cos_amp, freqs, s0, z, sz, k, cv, k2, k3, k4, tmp, znew):
                z[:, :] = znew
            else:
                half = 0.5 * sz
                if half < h_min or top + 2 >= 128:
                    return ts[:r], zs[:r], ks[:r], UNDERFLOW, s0
                top += 1
                st_start[top] = s0 + half
                st_size[top] = half
                top += 1
                st_start[top] = s0
                st_size[top] = half
                first = True
        t = t_next
        _eval(const, sin_amp, cos_amp, freqs, t, z, cv, k)
        if step % stride == 0 or step == n:
            ts[r] = t
            zs[r] = z
            ks[r] = k
            r += 1
    return ts[:r], zs[:r], ks[:r], OK, t1
