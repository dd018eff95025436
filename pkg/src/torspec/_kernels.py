"""Compiled propagation kernels for the poloidal surface equation.

The linear equation psi'' = g(theta) psi' + (V(theta) - eps) psi is
integrated with an adaptive Dormand-Prince 5(4) pair.  Both fundamental
columns (started from (1,0) and (0,1)) travel together as a 4-vector.  Full
revolutions are accumulated in QR-factored segments so the matching
determinant and the Wronskian stay relatively accurate when the drift has a
large period integral G = int g dtheta (solutions then grow like exp(G)).

Coefficient evaluation is inlined from a packed parameter vector
(alpha, beta, gamma, nu, curvature_flag, variant_flag); variant 0 is the
as-printed drift, 1 the rederived odd drift.
"""

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_EPS = np.finfo(np.float64).eps

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_NONFINITE = 2
STATUS_DEGENERATE = 3
STATUS_OVERFLOW = 4


@njit(cache=True, inline="always")
def _gv(t, p):
    """Drift and potential at angle t from packed parameters."""
    alpha = p[0]
    beta = p[1]
    gamma = p[2]
    nu = p[3]
    curv = p[4]
    variant = p[5]
    s = np.sin(t)
    c = np.cos(t)
    d2 = alpha * alpha * s * s + beta * beta * c * c
    f = 1.0 + alpha * c
    ab2 = alpha * alpha - beta * beta
    if variant == 0.0:
        g = alpha * s / f + ab2 / d2
    else:
        g = alpha * s / f + ab2 * s * c / d2
    v = d2 * nu * nu / (f * f) + 0.25 * gamma * gamma * f * f * d2 + gamma * nu * alpha * np.sqrt(d2)
    if curv != 0.0:
        if variant == 0.0:
            v -= 0.25 * (alpha * alpha * beta * beta / (d2 * d2) + beta * beta * c * c / (f * f))
        else:
            d = np.sqrt(d2)
            diff = alpha * beta / (d2 * d) - beta * c / (f * d)
            v -= 0.25 * alpha * alpha * diff * diff
    return g, v


@njit(cache=True)
def coeff_arrays(p, thetas):
    """Vectorized drift/potential evaluation (scans, bounds, quadrature)."""
    n = thetas.size
    g = np.empty(n)
    v = np.empty(n)
    for i in range(n):
        g[i], v[i] = _gv(thetas[i], p)
    return g, v


@njit(cache=True, inline="always")
def _stage(y, k, h, out):
    for i in range(4):
        out[i] = y[i] + h * k[i]


@njit(cache=True, inline="always")
def _deriv(t, y, eps, p, k):
    g, v = _gv(t, p)
    w = v - eps
    k[0] = y[1]
    k[1] = g * y[1] + w * y[0]
    k[2] = y[3]
    k[3] = g * y[3] + w * y[2]


@njit(cache=True)
def propagate4(p, eps, y0, t0, t1, rtol, atol):
    """Adaptive DP54 propagation of the fundamental 4-vector from t0 to t1.

    Returns (y, status).  Status: 0 ok, 1 step underflow, 2 non-finite.
    """
    y = y0.copy()
    if t1 == t0:
        return y, STATUS_OK
    direction = 1.0 if t1 > t0 else -1.0
    t = t0
    h = direction * min(0.05, abs(t1 - t0))

    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    k5 = np.empty(4)
    k6 = np.empty(4)
    k7 = np.empty(4)
    ytmp = np.empty(4)
    ynew = np.empty(4)

    _deriv(t, y, eps, p, k1)
    for _ in range(50_000_000):
        if (t1 - t) * direction <= 0.0:
            return y, STATUS_OK
        if abs(h) > abs(t1 - t):
            h = t1 - t
        hmin = 16.0 * _EPS * max(abs(t), 1.0)
        if abs(h) < hmin:
            return y, STATUS_UNDERFLOW

        for i in range(4):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        _deriv(t + _C2 * h, ytmp, eps, p, k2)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        _deriv(t + _C3 * h, ytmp, eps, p, k3)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _deriv(t + _C4 * h, ytmp, eps, p, k4)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _deriv(t + _C5 * h, ytmp, eps, p, k5)
        for i in range(4):
            ytmp[i] = y[i] + h * (
                _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
            )
        _deriv(t + h, ytmp, eps, p, k6)
        for i in range(4):
            ynew[i] = y[i] + h * (
                _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
            )
        _deriv(t + h, ynew, eps, p, k7)

        err = 0.0
        finite = True
        for i in range(4):
            e = h * (
                _E1 * k1[i]
                + _E3 * k3[i]
                + _E4 * k4[i]
                + _E5 * k5[i]
                + _E6 * k6[i]
                + _E7 * k7[i]
            )
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            q = e / sc
            err += q * q
            if not np.isfinite(ynew[i]):
                finite = False
        err = np.sqrt(err / 4.0)

        if not finite or not np.isfinite(err):
            h *= 0.2
            if abs(h) < hmin:
                return y, STATUS_NONFINITE
            continue

        if err <= 1.0:
            t = t + h
            for i in range(4):
                y[i] = ynew[i]
                k1[i] = k7[i]
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    return y, STATUS_UNDERFLOW


@njit(cache=True)
def monodromy_segments(p, eps, rtol, atol, nseg):
    """Propagate the fundamental matrix over one revolution in QR segments.

    Returns (qs, rs, status): qs[i] is the orthonormal basis entering segment
    i (qs[0] = identity, qs[nseg] the final orthogonal factor), rs[i] the
    upper-triangular factor with positive diagonal extracted at the end of
    segment i.  The solution matrix at 2 pi is qs[nseg] @ rs[nseg-1] @ ... @ rs[0].
    """
    qs = np.empty((nseg + 1, 2, 2))
    rs = np.empty((nseg, 2, 2))
    qs[0, 0, 0] = 1.0
    qs[0, 0, 1] = 0.0
    qs[0, 1, 0] = 0.0
    qs[0, 1, 1] = 1.0
    y = np.empty(4)
    twopi = 2.0 * np.pi
    for i in range(nseg):
        t0 = twopi * i / nseg
        t1 = twopi * (i + 1) / nseg
        y[0] = qs[i, 0, 0]
        y[1] = qs[i, 1, 0]
        y[2] = qs[i, 0, 1]
        y[3] = qs[i, 1, 1]
        y, st = propagate4(p, eps, y, t0, t1, rtol, atol)
        if st != STATUS_OK:
            return qs, rs, st
        a1, a2, b1, b2 = y[0], y[1], y[2], y[3]
        r11 = np.hypot(a1, a2)
        if r11 == 0.0:
            return qs, rs, STATUS_DEGENERATE
        c = a1 / r11
        s = a2 / r11
        r12 = c * b1 + s * b2
        r22 = -s * b1 + c * b2
        q01 = -s
        q11 = c
        if r22 < 0.0:
            q01 = s
            q11 = -c
            r22 = -r22
        if r22 == 0.0:
            return qs, rs, STATUS_DEGENERATE
        qs[i + 1, 0, 0] = c
        qs[i + 1, 0, 1] = q01
        qs[i + 1, 1, 0] = s
        qs[i + 1, 1, 1] = q11
        rs[i, 0, 0] = r11
        rs[i, 0, 1] = r12
        rs[i, 1, 0] = 0.0
        rs[i, 1, 1] = r22
    return qs, rs, STATUS_OK


@njit(cache=True)
def matching_parts(qs, rs, nseg):
    """Collapse QR segments into the matching data.

    Returns (u11, u12, u22, log_abs_det, det_sign, f_raw, f_scaled, tr, status)
    where f_raw = det(M - I) and f_scaled divides by 1 + |tr M| + |det M|.
    """
    u11 = 1.0
    u12 = 0.0
    u22 = 1.0
    logdet = 0.0
    for i in range(nseg):
        r11 = rs[i, 0, 0]
        r12 = rs[i, 0, 1]
        r22 = rs[i, 1, 1]
        nu11 = r11 * u11
        nu12 = r11 * u12 + r12 * u22
        nu22 = r22 * u22
        u11, u12, u22 = nu11, nu12, nu22
        logdet += np.log(r11) + np.log(r22)
        if abs(u11) > 1e280 or abs(u12) > 1e280:
            return u11, u12, u22, logdet, 1.0, np.nan, np.nan, np.nan, STATUS_OVERFLOW
    q00 = qs[nseg, 0, 0]
    q01 = qs[nseg, 0, 1]
    q10 = qs[nseg, 1, 0]
    q11 = qs[nseg, 1, 1]
    detq = q00 * q11 - q01 * q10
    b11 = u11 - q00
    b12 = u12 - q10
    b21 = -q01
    b22 = u22 - q11
    f_raw = detq * (b11 * b22 - b12 * b21)
    tr = q00 * u11 + q10 * u12 + q11 * u22
    det_m = detq * np.exp(min(logdet, 700.0))
    f_scaled = f_raw / (1.0 + abs(tr) + abs(det_m))
    return u11, u12, u22, logdet, detq, f_raw, f_scaled, tr, STATUS_OK


@njit(cache=True)
def matching_scan(p, eps_arr, rtol, atol, nseg):
    """Scaled matching residual det(M - I)/(1 + |tr| + |det|) per trial eps."""
    n = eps_arr.size
    out = np.empty(n)
    ok = np.empty(n, dtype=np.int64)
    for j in range(n):
        qs, rs, st = monodromy_segments(p, eps_arr[j], rtol, atol, nseg)
        if st == STATUS_OK:
            _, _, _, _, _, _, fsc, _, st2 = matching_parts(qs, rs, nseg)
            out[j] = fsc
            ok[j] = st2
        else:
            out[j] = np.nan
            ok[j] = st
    return out, ok


@njit(cache=True)
def matching_value(p, eps, rtol, atol, nseg):
    """Single-eps scaled matching residual; (value, status)."""
    qs, rs, st = monodromy_segments(p, eps, rtol, atol, nseg)
    if st != STATUS_OK:
        return np.nan, st
    _, _, _, _, _, _, fsc, _, st2 = matching_parts(qs, rs, nseg)
    return fsc, st2


@njit(cache=True)
def halfshot_scan(p, eps_arr, rtol, atol):
    """Scale-normalized half-interval parity residuals per trial eps.

    Even candidates solve psi'(0) = 0 with residual psi_A'(pi); odd ones
    solve psi(0) = 0 with residual psi_B(pi).  Both come from one
    propagation of the fundamental 4-vector to pi; each residual is divided
    by 1 + |psi| + |psi'| of its own column so it stays meaningful when the
    solutions grow exponentially (deep-well / hyperbolic trial energies).
    """
    n = eps_arr.size
    res_even = np.empty(n)
    res_odd = np.empty(n)
    ok = np.empty(n, dtype=np.int64)
    y0 = np.empty(4)
    for j in range(n):
        y0[0] = 1.0
        y0[1] = 0.0
        y0[2] = 0.0
        y0[3] = 1.0
        y, st = propagate4(p, eps_arr[j], y0, 0.0, np.pi, rtol, atol)
        res_even[j] = y[1] / (1.0 + abs(y[0]) + abs(y[1]))
        res_odd[j] = y[2] / (1.0 + abs(y[2]) + abs(y[3]))
        ok[j] = st
    return res_even, res_odd, ok


@njit(cache=True)
def halfshot_value(p, eps, rtol, atol):
    """Single-eps scaled parity residuals (even, odd, status)."""
    y0 = np.empty(4)
    y0[0] = 1.0
    y0[1] = 0.0
    y0[2] = 0.0
    y0[3] = 1.0
    y, st = propagate4(p, eps, y0, 0.0, np.pi, rtol, atol)
    re = y[1] / (1.0 + abs(y[0]) + abs(y[1]))
    ro = y[2] / (1.0 + abs(y[2]) + abs(y[3]))
    return re, ro, st


@njit(cache=True)
def halfshot_value_rev(p, eps, rtol, atol):
    """Parity residuals shooting from theta = pi back to 0.

    Same boundary-value problems (hence identical roots), but conditioned
    for states localized near theta = pi rather than theta = 0.
    """
    y0 = np.empty(4)
    y0[0] = 1.0
    y0[1] = 0.0
    y0[2] = 0.0
    y0[3] = 1.0
    y, st = propagate4(p, eps, y0, np.pi, 0.0, rtol, atol)
    re = y[1] / (1.0 + abs(y[0]) + abs(y[1]))
    ro = y[2] / (1.0 + abs(y[2]) + abs(y[3]))
    return re, ro, st


@njit(cache=True)
def record_basis(p, eps, q_flat, t0, ts, rtol, atol, out):
    """Propagate a basis matrix from t0 through the sorted angles ts,
    recording the flattened 2x2 solution matrix at each angle."""
    y = q_flat.copy()
    t = t0
    for j in range(ts.size):
        y, st = propagate4(p, eps, y, t, ts[j], rtol, atol)
        if st != STATUS_OK:
            return st
        t = ts[j]
        for i in range(4):
            out[j, i] = y[i]
    return STATUS_OK


def warm_up():
    """Trigger JIT compilation of every kernel with tiny inputs."""
    p = np.array([0.5, 0.5, 0.0, 0.0, 0.0, 0.0])
    y0 = np.array([1.0, 0.0, 0.0, 1.0])
    propagate4(p, 0.0, y0, 0.0, 0.1, 1e-8, 1e-10)
    eps = np.array([0.0, 0.5])
    coeff_arrays(p, eps)
    matching_scan(p, eps, 1e-8, 1e-10, 4)
    matching_value(p, 0.0, 1e-8, 1e-10, 4)
    halfshot_scan(p, eps, 1e-8, 1e-10)
    halfshot_value(p, 0.0, 1e-8, 1e-10)
    halfshot_value_rev(p, 0.0, 1e-8, 1e-10)
    out = np.empty((2, 4))
    record_basis(p, 0.0, y0, 0.0, np.array([0.05, 0.1]), 1e-8, 1e-10, out)
