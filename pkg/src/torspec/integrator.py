"""Monodromy of the poloidal equation and the periodicity matching residual.

Two fundamental solutions are started at theta = 0 from (psi, psi') = (1, 0)
and (0, 1) and carried around the full period.  A periodic eigenfunction
A psi_A + B psi_B exists exactly when det(M - I) = 0, with M the 2x2
monodromy matrix; the Wronskian obeys det M = exp(integral of drift), which
serves as a global integration-accuracy monitor (Abel identity).

Propagation is adaptive Dormand-Prince 5(4).  Coefficient sets produced by
:func:`torspec.hamiltonian.assemble` run through compiled kernels; hand-built
coefficient sets (test stubs, the radial ring equation) use an identical
pure-Python stepper.  The revolution is split into QR-reorthonormalized
segments so that matching quantities stay relatively accurate when the drift
integral is large and the fundamental solutions grow exponentially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import (
    STATUS_DEGENERATE,
    STATUS_NONFINITE,
    STATUS_OK,
    STATUS_OVERFLOW,
    STATUS_UNDERFLOW,
)
from .hamiltonian import CoefficientSet

_EPS = float(np.finfo(np.float64).eps)

_STATUS_MESSAGES = {
    STATUS_UNDERFLOW: "step size underflow",
    STATUS_NONFINITE: "non-finite state encountered",
    STATUS_DEGENERATE: "degenerate fundamental matrix",
    STATUS_OVERFLOW: "fundamental matrix overflow (drift integral too large)",
}

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when adaptive propagation cannot continue."""


def _raise_status(status, context):
    msg = _STATUS_MESSAGES.get(status, f"propagation failed (status {status})")
    raise IntegrationError(f"{msg} while {context}")


def _check_tol(tol):
    if not (1e-13 <= tol <= 1e-6):
        raise ValueError(f"relative tolerance must lie in [1e-13, 1e-6], got {tol}")


@dataclass(frozen=True)
class OdeState:
    theta: float
    psi: float
    dpsi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.psi) and math.isfinite(self.dpsi)):
            raise ValueError("OdeState fields must be finite")


@dataclass
class Monodromy:
    """Endpoint states of the two fundamental solutions, plus the factored
    form M = q @ u kept for well-conditioned matching arithmetic."""

    m11: float
    m12: float
    m21: float
    m22: float
    epsilon: float
    q: np.ndarray
    u: np.ndarray
    log_abs_det: float
    det_sign: float
    drift_integral: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def determinant(self) -> float:
        return self.det_sign * math.exp(min(self.log_abs_det, 700.0))


# ---------------------------------------------------------------------------
# pure-Python Dormand-Prince stepper (generic coefficient callables)

_K = _kernels


def _propagate4_py(drift, potential, eps, y, t0, t1, rtol, atol):
    y = list(y)
    if t1 == t0:
        return y, STATUS_OK
    direction = 1.0 if t1 > t0 else -1.0
    t = t0
    h = direction * min(0.05, abs(t1 - t0))

    def deriv(tt, yy):
        g = float(drift(tt))
        w = float(potential(tt)) - eps
        return [yy[1], g * yy[1] + w * yy[0], yy[3], g * yy[3] + w * yy[2]]

    k1 = deriv(t, y)
    while (t1 - t) * direction > 0.0:
        if abs(h) > abs(t1 - t):
            h = t1 - t
        hmin = 16.0 * _EPS * max(abs(t), 1.0)
        if abs(h) < hmin:
            return y, STATUS_UNDERFLOW

        yt = [y[i] + h * _K._A21 * k1[i] for i in range(4)]
        k2 = deriv(t + _K._C2 * h, yt)
        yt = [y[i] + h * (_K._A31 * k1[i] + _K._A32 * k2[i]) for i in range(4)]
        k3 = deriv(t + _K._C3 * h, yt)
        yt = [y[i] + h * (_K._A41 * k1[i] + _K._A42 * k2[i] + _K._A43 * k3[i]) for i in range(4)]
        k4 = deriv(t + _K._C4 * h, yt)
        yt = [
            y[i] + h * (_K._A51 * k1[i] + _K._A52 * k2[i] + _K._A53 * k3[i] + _K._A54 * k4[i])
            for i in range(4)
        ]
        k5 = deriv(t + _K._C5 * h, yt)
        yt = [
            y[i]
            + h
            * (
                _K._A61 * k1[i]
                + _K._A62 * k2[i]
                + _K._A63 * k3[i]
                + _K._A64 * k4[i]
                + _K._A65 * k5[i]
            )
            for i in range(4)
        ]
        k6 = deriv(t + h, yt)
        ynew = [
            y[i]
            + h * (_K._B1 * k1[i] + _K._B3 * k3[i] + _K._B4 * k4[i] + _K._B5 * k5[i] + _K._B6 * k6[i])
            for i in range(4)
        ]
        k7 = deriv(t + h, ynew)

        err = 0.0
        finite = True
        for i in range(4):
            e = h * (
                _K._E1 * k1[i]
                + _K._E3 * k3[i]
                + _K._E4 * k4[i]
                + _K._E5 * k5[i]
                + _K._E6 * k6[i]
                + _K._E7 * k7[i]
            )
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err += (e / sc) ** 2
            if not math.isfinite(ynew[i]):
                finite = False
        err = math.sqrt(err / 4.0)

        if not finite or not math.isfinite(err):
            h *= 0.2
            if abs(h) < hmin:
                return y, STATUS_NONFINITE
            continue

        if err <= 1.0:
            t += h
            y = ynew
            k1 = k7
            h *= 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    return y, STATUS_OK


def _monodromy_segments_py(coeffs, eps, rtol, atol, nseg):
    qs = np.empty((nseg + 1, 2, 2))
    rs = np.empty((nseg, 2, 2))
    qs[0] = np.eye(2)
    twopi = 2.0 * math.pi
    for i in range(nseg):
        y0 = [qs[i, 0, 0], qs[i, 1, 0], qs[i, 0, 1], qs[i, 1, 1]]
        y, st = _propagate4_py(coeffs.drift, coeffs.potential, eps, y0, twopi * i / nseg, twopi * (i + 1) / nseg, rtol, atol)
        if st != STATUS_OK:
            return qs, rs, st
        a1, a2, b1, b2 = y
        r11 = math.hypot(a1, a2)
        if r11 == 0.0:
            return qs, rs, STATUS_DEGENERATE
        c, s = a1 / r11, a2 / r11
        r12 = c * b1 + s * b2
        r22 = -s * b1 + c * b2
        q01, q11 = -s, c
        if r22 < 0.0:
            q01, q11, r22 = s, -c, -r22
        if r22 == 0.0:
            return qs, rs, STATUS_DEGENERATE
        qs[i + 1] = [[c, q01], [s, q11]]
        rs[i] = [[r11, r12], [0.0, r22]]
    return qs, rs, STATUS_OK


def _segments(coeffs, eps, rtol, atol, nseg):
    if coeffs.torus_params is not None:
        return _kernels.monodromy_segments(coeffs.torus_params, eps, rtol, atol, nseg)
    return _monodromy_segments_py(coeffs, eps, rtol, atol, nseg)


# ---------------------------------------------------------------------------
# public operations

def drift_period_integral(coeffs: CoefficientSet) -> float:
    """Full-period integral of the drift (closed form when available,
    otherwise periodic-trapezoid quadrature, spectrally accurate)."""
    if coeffs.drift_period_integral is not None:
        return coeffs.drift_period_integral
    n = 4096
    th = np.arange(n) * (2.0 * math.pi / n)
    vals = np.asarray([float(coeffs.drift(t)) for t in th])
    return float(vals.sum() * (2.0 * math.pi / n))


def default_segment_count(coeffs: CoefficientSet) -> int:
    """Segment count keeping per-segment solution growth around exp(8)."""
    g = abs(drift_period_integral(coeffs))
    return max(16, int(math.ceil(g / 8.0)))


def propagate(
    coeffs: CoefficientSet,
    epsilon: float,
    start: OdeState,
    to_theta: float,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> OdeState:
    """Propagate one state (psi, psi') from start.theta to to_theta."""
    _check_tol(tol)
    y0 = [start.psi, start.dpsi, 0.0, 0.0]
    if coeffs.torus_params is not None:
        y, st = _kernels.propagate4(
            coeffs.torus_params, epsilon, np.asarray(y0, dtype=np.float64), start.theta, to_theta, tol, atol
        )
    else:
        y, st = _propagate4_py(coeffs.drift, coeffs.potential, epsilon, y0, start.theta, to_theta, tol, atol)
    if st != STATUS_OK:
        _raise_status(st, f"propagating from theta={start.theta} to {to_theta} at eps={epsilon}")
    return OdeState(theta=to_theta, psi=float(y[0]), dpsi=float(y[1]))


def monodromy(
    coeffs: CoefficientSet,
    epsilon: float,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    n_segments: int | None = None,
) -> Monodromy:
    """One-revolution monodromy matrix at a trial energy."""
    _check_tol(tol)
    nseg = n_segments if n_segments is not None else default_segment_count(coeffs)
    qs, rs, st = _segments(coeffs, epsilon, tol, atol, nseg)
    if st != STATUS_OK:
        _raise_status(st, f"building the monodromy at eps={epsilon}")

    u = np.eye(2)
    logdet = 0.0
    for i in range(nseg):
        u = rs[i] @ u
        logdet += math.log(rs[i, 0, 0]) + math.log(rs[i, 1, 1])
    q = qs[nseg].copy()
    m = q @ u
    det_sign = 1.0 if (q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]) > 0 else -1.0
    return Monodromy(
        m11=float(m[0, 0]),
        m12=float(m[0, 1]),
        m21=float(m[1, 0]),
        m22=float(m[1, 1]),
        epsilon=epsilon,
        q=q,
        u=u,
        log_abs_det=logdet,
        det_sign=det_sign,
        drift_integral=drift_period_integral(coeffs),
    )


def periodicity_residual(m: Monodromy) -> float:
    """det(M - I); zero exactly at eigenvalues of the periodic problem.

    Evaluated from the factored form det(Q) * det(U - Q^T), which avoids the
    catastrophic cancellation of forming the 2x2 determinant directly when
    the fundamental solutions grow by exp(drift integral).
    """
    q, u = m.q, m.u
    detq = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
    b11 = u[0, 0] - q[0, 0]
    b12 = u[0, 1] - q[1, 0]
    b21 = -q[0, 1]
    b22 = u[1, 1] - q[1, 1]
    return float(detq * (b11 * b22 - b12 * b21))


def matching_residual(m: Monodromy) -> float:
    """Scale-normalized matching residual |det(M - I)| / (1 + |tr M| + |det M|).

    Shares its zeros with det(M - I) but stays meaningful at double precision
    when the monodromy entries are exponentially large.
    """
    tr = m.m11 + m.m22
    det = abs(m.determinant())
    return abs(periodicity_residual(m)) / (1.0 + abs(tr) + det)


def abel_residual(m: Monodromy) -> float:
    """|det M / exp(integral drift) - 1|, computed in log space."""
    if m.det_sign < 0:
        return float("inf")
    return abs(math.expm1(m.log_abs_det - m.drift_integral))
