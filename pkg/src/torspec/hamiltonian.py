"""Coefficient functions of the poloidal surface equation.

With the azimuthal factor exp(i nu phi) separated off, the surface equation
for psi(theta) is arranged as

    psi'' = drift(theta) psi' + (potential(theta) - eps) psi,

where eps = 2 E a^2 is the dimensionless energy.  The potential collects the
azimuthal kinetic term D^2 nu^2 / F^2, the curvature potential (optional),
the diamagnetic term gamma^2 F^2 alpha^2 p^2 / 4 and the paramagnetic term
gamma nu alpha^2 p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral
from typing import Callable, Optional

import numpy as np

from .geometry import HamiltonianVariant, TorusShape, curvature_potential

#: gamma per Tesla for a torus of major radius 500 Angstrom.
FLUX_PER_TESLA = 0.263


@dataclass(frozen=True)
class FieldMode:
    """Field and mode selection for one poloidal problem."""

    gamma: float
    nu: int
    curvature_on: bool = True
    variant: HamiltonianVariant = HamiltonianVariant.AS_PRINTED

    def __post_init__(self):
        if isinstance(self.nu, Integral):
            object.__setattr__(self, "nu", int(self.nu))
        elif isinstance(self.nu, float) and self.nu.is_integer():
            object.__setattr__(self, "nu", int(self.nu))
        else:
            raise TypeError(f"nu must be an integer (single-valued azimuthal factor), got {self.nu!r}")
        object.__setattr__(self, "variant", HamiltonianVariant.parse(self.variant))

    def with_nu(self, nu: int) -> "FieldMode":
        return FieldMode(self.gamma, nu, self.curvature_on, self.variant)


@dataclass(eq=False)
class CoefficientSet:
    """Drift, potential and normalization weight of one poloidal problem.

    ``drift_period_integral`` is the full-period integral of the drift when
    known in closed form (it controls the Wronskian growth exp(integral)).
    ``torus_params`` is a packed parameter vector that lets the compiled
    integrator kernels evaluate the coefficients without Python callbacks;
    it is None for hand-built coefficient sets, which then use the pure
    Python propagation path.
    """

    drift: Callable
    potential: Callable
    weight: Callable
    drift_period_integral: Optional[float] = None
    torus_params: Optional[np.ndarray] = None


def assemble(shape: TorusShape, mode: FieldMode) -> CoefficientSet:
    """Build the coefficient functions for a shape and field mode.

    AS_PRINTED uses drift = alpha sin/F + (alpha^2-beta^2)/D^2; REDERIVED
    uses alpha sin/F + (alpha^2-beta^2) sin cos / D^2, which equals
    -d(ln F)/dtheta + d(ln D)/dtheta and is odd in theta.  The potential has
    the same structure in both variants, differing only through the
    curvature-potential form.  For alpha = beta with the curvature term
    switched off the two variants coincide identically.
    """
    a, b = shape.alpha, shape.beta
    gamma, nu = mode.gamma, mode.nu
    variant = mode.variant
    curv = mode.curvature_on

    def drift(theta):
        s, c = np.sin(theta), np.cos(theta)
        d2 = a * a * s * s + b * b * c * c
        base = a * s / (1.0 + a * c)
        if variant is HamiltonianVariant.AS_PRINTED:
            return base + (a * a - b * b) / d2
        return base + (a * a - b * b) * s * c / d2

    def potential(theta):
        s, c = np.sin(theta), np.cos(theta)
        d2 = a * a * s * s + b * b * c * c
        f = 1.0 + a * c
        v = d2 * nu * nu / (f * f) + 0.25 * gamma * gamma * f * f * d2 + gamma * nu * a * np.sqrt(d2)
        if curv:
            v = v + curvature_potential(shape, theta, variant)
        return v

    def weight(theta):
        s, c = np.sin(theta), np.cos(theta)
        return np.sqrt(a * a * s * s + b * b * c * c) * (1.0 + a * c)

    if variant is HamiltonianVariant.AS_PRINTED:
        # integral of (alpha^2-beta^2)/D^2 over a period; the F-term is odd
        g_int = 2.0 * math.pi * (a * a - b * b) / (a * b)
    else:
        g_int = 0.0

    params = np.array(
        [
            a,
            b,
            gamma,
            float(nu),
            1.0 if curv else 0.0,
            0.0 if variant is HamiltonianVariant.AS_PRINTED else 1.0,
        ],
        dtype=np.float64,
    )
    return CoefficientSet(
        drift=drift,
        potential=potential,
        weight=weight,
        drift_period_integral=g_int,
        torus_params=params,
    )


def flux_from_tesla(b0: float) -> float:
    """Flux parameter gamma for a field of b0 Tesla (major radius 500 A)."""
    return FLUX_PER_TESLA * b0


def evaluate_coefficients(coeffs: CoefficientSet, thetas: np.ndarray):
    """Drift and potential sampled on a grid of angles.

    Uses the compiled kernel for assembled coefficient sets, falling back to
    the Python callables (vectorized if they accept arrays).
    """
    from . import _kernels

    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    if coeffs.torus_params is not None:
        return _kernels.coeff_arrays(coeffs.torus_params, thetas)
    try:
        g = np.asarray(coeffs.drift(thetas), dtype=float)
        v = np.asarray(coeffs.potential(thetas), dtype=float)
        if g.shape == thetas.shape and v.shape == thetas.shape:
            return g, v
    except (TypeError, ValueError):
        pass
    g = np.array([float(coeffs.drift(t)) for t in thetas])
    v = np.array([float(coeffs.potential(t)) for t in thetas])
    return g, v
