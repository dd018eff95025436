"""Closed-form geometry of an elliptical torus surface.

Everything is scaled by the major radius R.  The cross section is an ellipse
with horizontal semi-axis a and vertical semi-axis b; alpha = a/R and
beta = b/R.  The surface point at poloidal angle theta and azimuth phi is

    x(theta, phi) = (F cos phi, F sin phi, beta sin theta),
    F(theta) = 1 + alpha cos theta,

and the poloidal arc factor is D(theta) = sqrt(alpha^2 sin^2 + beta^2 cos^2).
Principal curvatures are reported in units of 1/R:

    R k_theta = alpha beta / D^3,   R k_phi = beta cos theta / (F D).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class HamiltonianVariant(enum.Enum):
    """Selects between the two published forms of the poloidal operator.

    AS_PRINTED keeps the drift term (alpha^2-beta^2)/D^2 and the curvature
    potential -(1/4)(alpha^2 beta^2/D^4 + beta^2 cos^2/F^2) exactly as they
    appear in the source equations.  REDERIVED replaces them with the forms
    that follow from the surface Laplacian and the standard da Costa
    expression -(alpha^2/4)(k_theta - k_phi)^2; it restores the
    theta -> -theta symmetry of the operator.
    """

    AS_PRINTED = "printed"
    REDERIVED = "rederived"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown variant {name!r}; use 'printed' or 'rederived'")


@dataclass(frozen=True)
class TorusShape:
    """Scaled torus geometry; the physical major radius only matters for
    converting the flux parameter to Tesla."""

    alpha: float
    beta: float
    major_radius_angstrom: float = 500.0

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (self.alpha < 1):
            raise ValueError(
                f"alpha must be < 1 so the surface clears the axis, got {self.alpha}"
            )

    def circular(self) -> bool:
        return abs(self.alpha - self.beta) < 1e-12


@dataclass(frozen=True)
class ProfileSample:
    """Profile functions of the cross-section ellipse at one angle.

    D is the scaled arc factor, p = D/alpha, F the scaled cylindrical radius,
    dF = dF/dtheta and dlogD = d(ln D)/dtheta.
    """

    theta: float
    D: float
    p: float
    F: float
    dF: float
    dlogD: float


@dataclass(frozen=True)
class CurvaturePair:
    kappa_theta: float
    kappa_phi: float


def profile(shape: TorusShape, theta) -> ProfileSample:
    """Evaluate the profile functions; theta may be a scalar or ndarray."""
    a, b = shape.alpha, shape.beta
    s, c = np.sin(theta), np.cos(theta)
    d2 = a * a * s * s + b * b * c * c
    d = np.sqrt(d2)
    return ProfileSample(
        theta=theta,
        D=d,
        p=d / a,
        F=1.0 + a * c,
        dF=-a * s,
        dlogD=(a * a - b * b) * s * c / d2,
    )


def curvatures(shape: TorusShape, theta) -> CurvaturePair:
    """Principal curvatures scaled by R."""
    a, b = shape.alpha, shape.beta
    s, c = np.sin(theta), np.cos(theta)
    d2 = a * a * s * s + b * b * c * c
    d = np.sqrt(d2)
    f = 1.0 + a * c
    return CurvaturePair(kappa_theta=a * b / (d2 * d), kappa_phi=b * c / (f * d))


def curvature_potential(shape: TorusShape, theta, variant=HamiltonianVariant.AS_PRINTED):
    """Scaled curvature potential (dimensionless, <= 0 everywhere).

    AS_PRINTED: -(1/4)(alpha^2 beta^2 / D^4 + beta^2 cos^2 theta / F^2).
    REDERIVED:  -(alpha^2/4)(k_theta - k_phi)^2, the da Costa form built
    from the principal curvatures.
    """
    a, b = shape.alpha, shape.beta
    s, c = np.sin(theta), np.cos(theta)
    d2 = a * a * s * s + b * b * c * c
    f = 1.0 + a * c
    if HamiltonianVariant.parse(variant) is HamiltonianVariant.AS_PRINTED:
        return -0.25 * (a * a * b * b / (d2 * d2) + b * b * c * c / (f * f))
    d = np.sqrt(d2)
    diff = a * b / (d2 * d) - b * c / (f * d)
    return -0.25 * a * a * diff * diff


def _embedding(alpha, beta, theta, phi):
    """Surface point in units of R (extended precision)."""
    f = 1.0 + alpha * np.cos(theta)
    return np.array(
        [f * np.cos(phi), f * np.sin(phi), beta * np.sin(theta)],
        dtype=np.longdouble,
    )


def _numeric_frame(alpha, beta, theta, phi, h):
    """Unit tangents, unit normal and metric factors by central differences."""
    xt = (_embedding(alpha, beta, theta + h, phi) - _embedding(alpha, beta, theta - h, phi)) / (2 * h)
    xp = (_embedding(alpha, beta, theta, phi + h) - _embedding(alpha, beta, theta, phi - h)) / (2 * h)
    nt = np.sqrt(np.dot(xt, xt))
    npp = np.sqrt(np.dot(xp, xp))
    e1 = xt / nt
    ephi = xp / npp
    en = np.cross(ephi, e1)
    return e1, ephi, en, nt, npp


def frame_self_check(shape: TorusShape, theta: float, h: float = 1e-5) -> float:
    """Maximum deviation of finite-difference principal curvatures from the
    closed forms.

    The embedding is differenced twice (tangent frame at theta +- h, then the
    normal's derivative), so the residual is O(h^2).  Extended precision is
    used internally to keep roundoff below the truncation error.
    """
    if not (0 < h <= 1e-4):
        raise ValueError(f"step must satisfy 0 < h <= 1e-4, got {h}")
    a, b = np.longdouble(shape.alpha), np.longdouble(shape.beta)
    th = np.longdouble(theta)
    hh = np.longdouble(h)
    phi = np.longdouble(0.0)

    e1, ephi, en, nt, npp = _numeric_frame(a, b, th, phi, hh)
    _, _, en_tp, _, _ = _numeric_frame(a, b, th + hh, phi, hh)
    _, _, en_tm, _, _ = _numeric_frame(a, b, th - hh, phi, hh)
    _, _, en_pp, _, _ = _numeric_frame(a, b, th, phi + hh, hh)
    _, _, en_pm, _, _ = _numeric_frame(a, b, th, phi - hh, hh)

    den_dt = (en_tp - en_tm) / (2 * hh)
    den_dp = (en_pp - en_pm) / (2 * hh)
    k_theta_num = float(np.dot(den_dt, e1) / nt)
    k_phi_num = float(np.dot(den_dp, ephi) / npp)

    exact = curvatures(shape, theta)
    return max(abs(k_theta_num - exact.kappa_theta), abs(k_phi_num - exact.kappa_phi))
