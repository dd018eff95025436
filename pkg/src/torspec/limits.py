"""Flat limiting structures: the annular ring and the vertical ribbon.

Both are solved in the same scaled energy units eps = 2 E a^2 as the torus.
The ring is the annulus with inner radius 1 - alpha and outer radius
1 + alpha (Dirichlet edges); its radial equation

    -alpha^2 (f'' + f'/r) + alpha^2 (nu/r + gamma r / 2)^2 f = eps f

carries the azimuthal structure that the circular-torus equation factors
into, with F -> r.  The ribbon is the cylinder strip of unit radius and
height 2 beta, which separates completely:

    eps_n = alpha^2 [ (n pi / (2 beta))^2 + (nu + gamma/2)^2 ].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.special import j0, y0

from .hamiltonian import CoefficientSet
from .integrator import OdeState, propagate


@dataclass(frozen=True)
class RingSpec:
    alpha: float
    gamma: float = 0.0
    nu: int = 0

    def __post_init__(self):
        if not (0 < self.alpha < 1):
            raise ValueError(f"ring half-width must satisfy 0 < alpha < 1, got {self.alpha}")


@dataclass(frozen=True)
class RibbonSpec:
    beta: float
    alpha: float
    gamma: float = 0.0
    nu: int = 0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"ribbon half-height must be positive, got {self.beta}")
        if not self.alpha > 0:
            raise ValueError(f"energy-scale alpha must be positive, got {self.alpha}")


# ---------------------------------------------------------------------------
# ring

def _ring_fd_lowest(spec: RingSpec, n: int) -> float:
    """Lowest Dirichlet eigenvalue on an n-point radial grid.

    The substitution u = sqrt(r) f symmetrizes the radial operator:
    -a^2 u'' + [-a^2/(4 r^2) + a^2 (nu/r + gamma r/2)^2] u = eps u.
    """
    a = spec.alpha
    r1, r2 = 1.0 - a, 1.0 + a
    h = (r2 - r1) / (n + 1)
    r = r1 + np.arange(1, n + 1) * h
    diag = 2.0 * a * a / h**2 - a * a / (4.0 * r * r) + a * a * (spec.nu / r + spec.gamma * r / 2.0) ** 2
    off = np.full(n - 1, -a * a / h**2)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0), eigvals_only=True)
    return float(vals[0])


def ring_ground_state(spec: RingSpec, n_grid: int = 4096, richardson: bool = True) -> float:
    """Ground state of the annulus via radial finite differences.

    Richardson extrapolation over grids n and n/2 removes the O(h^2) error.
    """
    e_fine = _ring_fd_lowest(spec, n_grid)
    if not richardson:
        return e_fine
    e_coarse = _ring_fd_lowest(spec, n_grid // 2)
    return (4.0 * e_fine - e_coarse) / 3.0


def ring_fd_error_estimate(spec: RingSpec, n_grid: int = 4096) -> float:
    """Magnitude of the Richardson correction (discretization error gauge)."""
    return abs(_ring_fd_lowest(spec, n_grid) - _ring_fd_lowest(spec, n_grid // 2)) / 3.0


def ring_ground_state_shooting(spec: RingSpec, tol: float = 1e-10) -> float:
    """Cross-validation path: shoot the radial equation from the inner edge.

    Integrates f'' = -(1/r) f' + ((nu/r + gamma r/2)^2 - e) f with
    f(r1) = 0, f'(r1) = 1 and bisects the trial e = eps/alpha^2 on the outer
    boundary value f(r2).
    """
    a = spec.alpha
    r1, r2 = 1.0 - a, 1.0 + a
    nu, gamma = spec.nu, spec.gamma
    coeffs = CoefficientSet(
        drift=lambda r: -1.0 / r,
        potential=lambda r: (nu / r + gamma * r / 2.0) ** 2,
        weight=lambda r: r,
    )

    def boundary(e):
        state = propagate(coeffs, e, OdeState(theta=r1, psi=0.0, dpsi=1.0), r2, tol=tol)
        return state.psi

    v_min = float(min((nu / r + gamma * r / 2.0) ** 2 for r in np.linspace(r1, r2, 512)))
    box = (math.pi / (r2 - r1)) ** 2
    e_lo = v_min
    e_hi = v_min + 4.0 * box
    grid = np.linspace(e_lo, e_hi, 256)
    vals = [boundary(e) for e in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return a * a * grid[i]
        if vals[i] * vals[i + 1] < 0.0:
            root = brentq(boundary, grid[i], grid[i + 1], xtol=1e-13, rtol=1e-14)
            return a * a * root
    raise RuntimeError("radial shooting found no Dirichlet ground state in the scan range")


def bessel_cross_product_root(alpha: float, index: int = 1) -> float:
    """index-th root k of J0(k r1) Y0(k r2) - J0(k r2) Y0(k r1) = 0.

    At gamma = nu = 0 the annulus ground state is eps = alpha^2 k^2 with k
    the first root.
    """
    r1, r2 = 1.0 - alpha, 1.0 + alpha

    def cross(k):
        return j0(k * r1) * y0(k * r2) - j0(k * r2) * y0(k * r1)

    # roots are spaced ~ pi/(r2 - r1); walk sign changes
    step = math.pi / (r2 - r1) / 40.0
    k = step
    prev = cross(k)
    found = 0
    for _ in range(200_000):
        k2 = k + step
        cur = cross(k2)
        if prev == 0.0 or prev * cur < 0.0:
            found += 1
            if found == index:
                return brentq(cross, k, k2, xtol=1e-14, rtol=1e-15)
        k, prev = k2, cur
    raise RuntimeError(f"failed to bracket cross-product root {index} for alpha={alpha}")


def ring_ground_state_min_nu(alpha: float, gamma: float, nu_range=None, n_grid: int = 4096):
    """Minimize the ring ground state over nu; returns (nu_star, eps)."""
    nus = sorted(set(int(n) for n in (nu_range if nu_range is not None else range(-10, 11))),
                 key=lambda n: (abs(n), 0 if n >= 0 else 1))
    best = None
    for nu in nus:
        e = ring_ground_state(RingSpec(alpha=alpha, gamma=gamma, nu=nu), n_grid=n_grid)
        if best is None or e < best[1]:
            best = (nu, e)
    return best


# ---------------------------------------------------------------------------
# ribbon

def ribbon_energy(spec: RibbonSpec, n: int = 1) -> float:
    """Closed-form level n of the Dirichlet strip (n = 1, 2, ...)."""
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    a, b = spec.alpha, spec.beta
    return a * a * ((n * math.pi / (2.0 * b)) ** 2 + (spec.nu + spec.gamma / 2.0) ** 2)


def ribbon_ground_state(spec: RibbonSpec) -> float:
    return ribbon_energy(spec, 1)


def ribbon_energies(spec: RibbonSpec, n_max: int) -> np.ndarray:
    """Levels 1..n_max of the strip."""
    return np.array([ribbon_energy(spec, n) for n in range(1, n_max + 1)])


def ribbon_ground_state_min_nu(beta: float, alpha: float, gamma: float, nu_range=None):
    """Minimize the ribbon ground state over nu; returns (nu_star, eps)."""
    nus = sorted(set(int(n) for n in (nu_range if nu_range is not None else range(-10, 11))),
                 key=lambda n: (abs(n), 0 if n >= 0 else 1))
    best = None
    for nu in nus:
        e = ribbon_ground_state(RibbonSpec(beta=beta, alpha=alpha, gamma=gamma, nu=nu))
        if best is None or e < best[1]:
            best = (nu, e)
    return best
