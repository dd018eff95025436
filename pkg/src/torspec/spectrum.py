"""Eigenvalue search for the periodic poloidal problem.

Roots of the periodicity matching residual are located by scanning a trial
energy grid and refining with bisection.  The rederived variant is symmetric
under theta -> -theta, so its spectrum splits into even states (psi'(0) =
psi'(pi) = 0) and odd states (psi(0) = psi(pi) = 0) whose half-interval
residuals have simple roots.  The as-printed variant is searched through the
full monodromy; grid minima of the matching residual without a sign change
are probed for unresolved close or double root pairs.

Scanning never descends below the rigorous spectral floor
min V - max|drift|^2/4, which bounds the real part of every eigenvalue.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import HamiltonianVariant, TorusShape
from .hamiltonian import CoefficientSet, FieldMode, assemble, evaluate_coefficients
from .integrator import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    IntegrationError,
    Monodromy,
    _propagate4_py,
    _segments,
    default_segment_count,
    monodromy,
)

log = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_CHUNK = 256
#: grid minima of |det(M - I)| below this are suspected double roots
DOUBLE_ROOT_FLAG = 1e-6


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class SearchWindow:
    eps_min: float = -20.0
    eps_max: float = 80.0
    step: float = 0.05
    root_tol: float = 1e-9

    def __post_init__(self):
        if not self.eps_min < self.eps_max:
            raise ValueError(f"need eps_min < eps_max, got [{self.eps_min}, {self.eps_max}]")
        if not self.step > 0:
            raise ValueError(f"scan step must be positive, got {self.step}")
        if not self.root_tol > 0:
            raise ValueError(f"root_tol must be positive, got {self.root_tol}")


@dataclass
class EigenSolution:
    """One converged state.

    ``residual`` is the scale-normalized value, at the converged energy, of
    the matching functional that determined the state: the periodicity
    determinant det(M - I)/(1 + |tr M| + |det M|) for the full-monodromy
    search, or the half-interval parity condition for the parity-split
    search (whose roots are the same periodic eigenvalues but stay
    resolvable at double precision for deep-well states)."""

    epsilon: float
    parity: Parity
    thetas: np.ndarray
    psi: np.ndarray
    residual: float
    mode: FieldMode
    shape: TorusShape

    @property
    def psi_samples(self) -> np.ndarray:
        return np.column_stack((self.thetas, self.psi))


def spectral_lower_bound(coeffs: CoefficientSet, n_grid: int = 4096) -> float:
    """Rigorous floor for the real part of every eigenvalue.

    Two bounds are combined: the quadratic-form estimate min V - max|g|^2/4,
    and the gauge-transformed one min(V + g^2/4 - g'/2) - (G/4pi)^2 with
    G the drift period integral (the gauge multiplier is made periodic by a
    real Bloch factor, whose kinetic cost is the last term).  The larger of
    the two is returned; g' comes from spectral differentiation.
    """
    th = np.arange(n_grid) * (2.0 * math.pi / n_grid)
    g, v = evaluate_coefficients(coeffs, th)
    b1 = float(np.min(v) - np.max(g * g) / 4.0)
    freqs = np.fft.rfftfreq(n_grid, d=1.0 / n_grid)
    gp = np.fft.irfft(1j * freqs * np.fft.rfft(g), n=n_grid)
    big_g = coeffs.drift_period_integral
    if big_g is None:
        big_g = float(g.sum() * (2.0 * math.pi / n_grid))
    b2 = float(np.min(v + g * g / 4.0 - gp / 2.0) - (big_g / (4.0 * math.pi)) ** 2)
    return max(b1, b2)


def suggested_window(shape, mode, *, eps_max=80.0, step=0.05, root_tol=1e-9) -> SearchWindow:
    """Default window extended downward to the spectral floor when needed."""
    bound = spectral_lower_bound(assemble(shape, mode))
    return SearchWindow(min(-20.0, bound - 0.5), eps_max, step, root_tol)


# ---------------------------------------------------------------------------
# residual evaluation (compiled fast path / generic Python path)

def _matching_values(coeffs, eps_grid, tol, nseg):
    if coeffs.torus_params is not None:
        vals, ok = _kernels.matching_scan(coeffs.torus_params, eps_grid, tol, DEFAULT_ATOL, nseg)
        return np.asarray(vals), np.asarray(ok)
    vals = np.empty(eps_grid.size)
    ok = np.zeros(eps_grid.size, dtype=int)
    for j, eps in enumerate(eps_grid):
        qs, rs, st = _segments(coeffs, eps, tol, DEFAULT_ATOL, nseg)
        if st == 0:
            _, _, _, _, _, _, fsc, _, st2 = _kernels.matching_parts(qs, rs, nseg)
            vals[j] = fsc
            ok[j] = st2
        else:
            vals[j] = np.nan
            ok[j] = st
    return vals, ok


def _matching_at(coeffs, eps, tol, nseg):
    vals, ok = _matching_values(coeffs, np.array([eps], dtype=float), tol, nseg)
    if ok[0] != 0:
        raise IntegrationError(f"matching residual evaluation failed at eps={eps} (status {ok[0]})")
    return float(vals[0])


def _halfshot_values(coeffs, eps_grid, tol):
    """Scaled parity residuals psi_A'(pi)/(1+|psi_A|+|psi_A'|) and the odd
    analogue; the normalization keeps deep-well (hyperbolic) trial energies
    resolvable at double precision without moving the roots."""
    if coeffs.torus_params is not None:
        re, ro, ok = _kernels.halfshot_scan(coeffs.torus_params, eps_grid, tol, DEFAULT_ATOL)
        return np.asarray(re), np.asarray(ro), np.asarray(ok)
    re = np.empty(eps_grid.size)
    ro = np.empty(eps_grid.size)
    ok = np.zeros(eps_grid.size, dtype=int)
    for j, eps in enumerate(eps_grid):
        y, st = _propagate4_py(coeffs.drift, coeffs.potential, eps, [1.0, 0.0, 0.0, 1.0], 0.0, math.pi, tol, DEFAULT_ATOL)
        re[j] = y[1] / (1.0 + abs(y[0]) + abs(y[1]))
        ro[j] = y[2] / (1.0 + abs(y[2]) + abs(y[3]))
        ok[j] = st
    return re, ro, ok


def _halfshot_at(coeffs, eps, tol, channel, reverse=False):
    if reverse:
        if coeffs.torus_params is not None:
            re, ro, st = _kernels.halfshot_value_rev(coeffs.torus_params, eps, tol, DEFAULT_ATOL)
        else:
            y, st = _propagate4_py(
                coeffs.drift, coeffs.potential, eps, [1.0, 0.0, 0.0, 1.0], math.pi, 0.0, tol, DEFAULT_ATOL
            )
            re = y[1] / (1.0 + abs(y[0]) + abs(y[1]))
            ro = y[2] / (1.0 + abs(y[2]) + abs(y[3]))
        if st != 0:
            raise IntegrationError(f"reverse half-interval residual failed at eps={eps} (status {st})")
        return float(re) if channel is Parity.EVEN else float(ro)
    re, ro, ok = _halfshot_values(coeffs, np.array([eps], dtype=float), tol)
    if ok[0] != 0:
        raise IntegrationError(f"half-interval residual failed at eps={eps} (status {ok[0]})")
    return float(re[0]) if channel is Parity.EVEN else float(ro[0])


# ---------------------------------------------------------------------------
# root refinement

def _bisect(fn, lo, hi, flo, fhi, xtol):
    """Sign-based bisection to bracket width xtol; returns the midpoint."""
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid == lo or mid == hi:
            return mid
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def _refine_root(coeffs, lo, hi, flo, fhi, residual_fn, tol, nseg, root_tol):
    """Refine a bracketed sign change, then keep halving on the same sign
    until the scale-normalized matching residual clears root_tol (or the
    bracket reaches machine width)."""
    xtol = max(root_tol * 1e-4, 32.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)))
    root = _bisect(residual_fn, lo, hi, flo, fhi, xtol)
    res = abs(_matching_at(coeffs, root, tol, nseg))
    if res < 0.5 * root_tol:
        return root, res
    # continue on the matching residual's own sign
    f_root = _matching_at(coeffs, root, tol, nseg)
    a, b = max(lo, root - xtol), min(hi, root + xtol)
    fa, fb = _matching_at(coeffs, a, tol, nseg), _matching_at(coeffs, b, tol, nseg)
    if (fa < 0.0) != (fb < 0.0):
        for _ in range(60):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            fm = _matching_at(coeffs, mid, tol, nseg)
            if abs(fm) < 0.5 * root_tol:
                return mid, abs(fm)
            if (fm < 0.0) == (fa < 0.0):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
    best = min((abs(fa), a), (abs(fb), b), (abs(f_root), root))
    if best[0] >= root_tol:
        log.warning("matching residual stuck at %.3e near eps=%.12g", best[0], best[1])
    return best[1], best[0]


def _golden_probe(fn, a, b, fa, fb, max_iter=48):
    """Minimize |fn| on [a, b]; short-circuit when a sign flip appears.

    Returns ('flip', x, fx) on a sign change against the endpoints, else
    ('min', x_best, f_best).
    """
    sign_ref = fa < 0.0
    best_x, best_f = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for x, f in ((x1, f1), (x2, f2)):
        if (f < 0.0) != sign_ref:
            return "flip", x, f
        if abs(f) < abs(best_f):
            best_x, best_f = x, f
    lo, hi = a, b
    for _ in range(max_iter):
        if abs(f1) < abs(f2):
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = fn(x1)
            x_new, f_new = x1, f1
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = fn(x2)
            x_new, f_new = x2, f2
        if (f_new < 0.0) != sign_ref:
            return "flip", x_new, f_new
        if abs(f_new) < abs(best_f):
            best_x, best_f = x_new, f_new
        if hi - lo < 1e-13 * max(1.0, abs(lo)):
            break
    return "min", best_x, best_f


def _parity_roots_in(coeffs, a, b, tol, root_tol, n_probe=33):
    """Half-interval parity roots inside [a, b] (used on suspected doubles)."""
    grid = np.linspace(a, b, n_probe)
    re, ro, ok = _halfshot_values(coeffs, grid, tol)
    found = []
    for channel, vals in ((Parity.EVEN, re), (Parity.ODD, ro)):
        for i in range(n_probe - 1):
            if ok[i] or ok[i + 1]:
                continue
            if vals[i] == 0.0:
                found.append((grid[i], channel))
            elif vals[i] * vals[i + 1] < 0.0:
                fn = lambda e, ch=channel: _halfshot_at(coeffs, e, tol, ch)
                xtol = max(root_tol * 1e-4, 32.0 * np.finfo(float).eps * max(1.0, abs(grid[i])))
                root = _bisect(fn, grid[i], grid[i + 1], vals[i], vals[i + 1], xtol)
                found.append((root, channel))
                break  # one root per channel inside a flagged minimum
    return found


# ---------------------------------------------------------------------------
# scanning drivers

def _scan_grid(window, lower_bound):
    lo = max(window.eps_min, lower_bound - window.step)
    if lo >= window.eps_max:
        return np.empty(0)
    n = int(math.floor((window.eps_max - lo) / window.step)) + 1
    return lo + window.step * np.arange(n)


def _refine_parity_root(coeffs, lo, hi, flo, fhi, channel, tol, root_tol):
    """Bisect a parity-channel sign change until the scaled channel residual
    clears root_tol.

    The forward (theta = 0 anchored) residual fixes the root location to
    machine width; for states localized near theta = pi its value at the
    root can stay large because the crossing is sharper than one ulp, so the
    equivalent reverse-anchored residual is evaluated (and if necessary
    re-bisected in a tight neighbourhood) to certify the same root.
    """
    fn = lambda e: _halfshot_at(coeffs, e, tol, channel)
    xtol = max(root_tol * 1e-4, 32.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)))
    root = _bisect(fn, lo, hi, flo, fhi, xtol)
    res = abs(fn(root))
    if res < 0.5 * root_tol:
        return root, res
    best = (res, root)
    fn_rev = lambda e: _halfshot_at(coeffs, e, tol, channel, reverse=True)
    res_rev = abs(fn_rev(root))
    if res_rev < best[0]:
        best = (res_rev, root)
    if best[0] < 0.5 * root_tol:
        return best[1], best[0]
    delta = max(4.0 * xtol, 64.0 * np.finfo(float).eps * max(1.0, abs(root)))
    for _ in range(6):
        a, b = root - delta, root + delta
        fa, fb = fn_rev(a), fn_rev(b)
        if (fa < 0.0) != (fb < 0.0):
            tight = max(root_tol * 1e-6, 8.0 * np.finfo(float).eps * max(1.0, abs(root)))
            r2 = _bisect(fn_rev, a, b, fa, fb, tight)
            rr = abs(fn_rev(r2))
            if rr < best[0]:
                best = (rr, r2)
            break
        delta *= 8.0
        if delta > max(hi - lo, 1e-6):
            break
    if best[0] >= root_tol:
        log.warning("parity residual stuck at %.3e near eps=%.12g", best[0], best[1])
    return best[1], best[0]


def _find_roots_parity(coeffs, window, tol, max_states, eps_cap):
    grid = _scan_grid(window, spectral_lower_bound(coeffs))
    roots = []
    carry = None  # (x, re, ro, ok) of the last grid point seen
    for start in range(0, grid.size, _CHUNK):
        chunk = grid[start : start + _CHUNK]
        if eps_cap is not None and chunk[0] > eps_cap and roots:
            break
        re, ro, ok = _halfshot_values(coeffs, chunk, tol)
        xs = chunk
        if carry is not None:
            xs = np.concatenate(([carry[0]], xs))
            re = np.concatenate(([carry[1]], re))
            ro = np.concatenate(([carry[2]], ro))
            ok = np.concatenate(([carry[3]], ok))
        for channel, vals in ((Parity.EVEN, re), (Parity.ODD, ro)):
            for i in range(xs.size - 1):
                if ok[i] or ok[i + 1] or not (np.isfinite(vals[i]) and np.isfinite(vals[i + 1])):
                    continue
                if vals[i] == 0.0:
                    roots.append((xs[i], channel, 0.0))
                elif vals[i] * vals[i + 1] < 0.0:
                    root, res = _refine_parity_root(
                        coeffs, xs[i], xs[i + 1], vals[i], vals[i + 1], channel, tol, window.root_tol
                    )
                    roots.append((root, channel, res))
        carry = (xs[-1], re[-1], ro[-1], ok[-1])
        roots.sort(key=lambda rc: rc[0])
        if max_states is not None and len(_dedup(roots, window.root_tol)) >= max_states:
            break
        if eps_cap is not None and chunk[-1] > eps_cap and roots:
            break
    return _dedup(roots, window.root_tol)


def _find_roots_full(coeffs, window, tol, max_states, eps_cap):
    nseg = default_segment_count(coeffs)
    grid = _scan_grid(window, spectral_lower_bound(coeffs))
    fn = lambda e: _matching_at(coeffs, e, tol, nseg)
    roots = []
    carry_x, carry_f, carry_ok = [], [], []
    for start in range(0, grid.size, _CHUNK):
        chunk = grid[start : start + _CHUNK]
        if eps_cap is not None and chunk[0] > eps_cap and roots:
            break
        fs, ok = _matching_values(coeffs, chunk, tol, nseg)
        xs = np.concatenate((carry_x, chunk))
        fs = np.concatenate((carry_f, fs))
        oks = np.concatenate((carry_ok, ok)).astype(int)

        features = []  # (position, kind, payload)
        for i in range(len(xs) - 1):
            if oks[i] or oks[i + 1] or not (np.isfinite(fs[i]) and np.isfinite(fs[i + 1])):
                continue
            if fs[i] == 0.0:
                features.append((xs[i], "exact", i))
            elif fs[i] * fs[i + 1] < 0.0:
                features.append((xs[i], "bracket", i))
        for i in range(1, len(xs) - 1):
            if oks[i - 1] or oks[i] or oks[i + 1]:
                continue
            same_sign = (fs[i - 1] > 0) == (fs[i] > 0) == (fs[i + 1] > 0)
            if same_sign and abs(fs[i]) < abs(fs[i - 1]) and abs(fs[i]) < abs(fs[i + 1]):
                features.append((xs[i], "minimum", i))
        features.sort(key=lambda f: f[0])

        for pos, kind, i in features:
            if kind == "exact":
                roots.append((xs[i], None, 0.0))
            elif kind == "bracket":
                root, res = _refine_root(
                    coeffs, xs[i], xs[i + 1], fs[i], fs[i + 1], fn, tol, nseg, window.root_tol
                )
                roots.append((root, None, res))
            else:
                roots.extend(
                    _probe_minimum(coeffs, xs, fs, i, fn, tol, nseg, window.root_tol)
                )
            if max_states is not None and len(_dedup(roots, window.root_tol)) >= max_states:
                break
        roots.sort(key=lambda rc: rc[0])
        if max_states is not None and len(_dedup(roots, window.root_tol)) >= max_states:
            break
        if eps_cap is not None and chunk[-1] > eps_cap and roots:
            break
        carry_x, carry_f, carry_ok = list(xs[-2:]), list(fs[-2:]), list(oks[-2:])
    return _dedup(roots, window.root_tol)


def _probe_minimum(coeffs, xs, fs, i, fn, tol, nseg, root_tol):
    """Inspect a grid minimum of |det(M - I)| that lacks a sign change.

    Close root pairs show up as an interior sign flip; true double roots are
    confirmed through the half-interval parity residuals.  Unresolvable
    candidates are reported and skipped.
    """
    a, b = xs[i - 1], xs[i + 1]
    fa, fb = fs[i - 1], fs[i + 1]
    flagged = abs(fs[i]) < DOUBLE_ROOT_FLAG
    kind, x, fx = _golden_probe(fn, a, b, fa, fb)
    out = []
    if kind == "flip":
        root1, res1 = _refine_root(coeffs, a, x, fa, fx, fn, tol, nseg, root_tol)
        root2, res2 = _refine_root(coeffs, x, b, fx, fb, fn, tol, nseg, root_tol)
        return [(root1, None, res1), (root2, None, res2)]
    if abs(fx) < root_tol:
        pairs = _parity_roots_in(coeffs, a, b, tol, root_tol)
        accepted = []
        for eps, channel in pairs:
            res = abs(_matching_at(coeffs, eps, tol, nseg))
            if res < root_tol:
                accepted.append((eps, channel, res))
            else:
                log.warning(
                    "parity probe near eps=%.9g rejected (matching residual %.2e)", eps, res
                )
        if accepted:
            return accepted
        log.warning(
            "double-root candidate at eps=%.9g (|residual| %.2e) could not be split by parity",
            x,
            abs(fx),
        )
        return out
    if flagged:
        log.warning(
            "flagged minimum at eps=%.9g: no sign change and residual %.2e did not reach root_tol",
            xs[i],
            abs(fx),
        )
    return out


def _dedup(roots, root_tol):
    """Drop repeats closer than 10*root_tol within the same parity channel;
    degenerate even/odd pairs at the same energy are both kept."""
    roots = sorted(roots, key=lambda rc: (rc[0], rc[1].value if rc[1] else ""))
    kept = []
    for eps, channel, res in roots:
        dup = any(
            abs(eps - e0) <= 10.0 * root_tol and channel == c0 for e0, c0, _ in kept
        )
        if not dup:
            kept.append((eps, channel, res))
    return kept


# ---------------------------------------------------------------------------
# eigenfunction assembly

def _null_vector(m: Monodromy):
    """Initial (psi, psi') spanning the periodic solution at an eigenvalue."""
    q, u = m.q, m.u
    b = np.array(
        [[u[0, 0] - q[0, 0], u[0, 1] - q[1, 0]], [-q[0, 1], u[1, 1] - q[1, 1]]]
    )
    n0 = math.hypot(b[0, 0], b[0, 1])
    n1 = math.hypot(b[1, 0], b[1, 1])
    if max(n0, n1) < 1e-12:
        return np.array([1.0, 0.0])
    if n0 >= n1:
        v = np.array([-b[0, 1], b[0, 0]]) / n0
    else:
        v = np.array([-b[1, 1], b[1, 0]]) / n1
    return v / math.hypot(v[0], v[1])


def _sample_eigenfunction(coeffs, eps, v0, samples, tol):
    """Sample the periodic eigenfunction on a uniform grid.

    The revolution is rebuilt from the QR segments: coefficient vectors are
    recovered by backward triangular solves from the endpoint (which damps
    the exponentially growing direction), then each segment's orthonormal
    basis is propagated across its own subinterval only.
    """
    nseg = default_segment_count(coeffs)
    qs, rs, st = _segments(coeffs, eps, tol, DEFAULT_ATOL, nseg)
    if st != 0:
        raise IntegrationError(f"eigenfunction sampling failed at eps={eps} (status {st})")

    cs = np.empty((nseg + 1, 2))
    cs[nseg] = qs[nseg].T @ np.asarray(v0, dtype=float)
    for i in range(nseg, 0, -1):
        r = rs[i - 1]
        c2 = cs[i][1] / r[1, 1]
        c1 = (cs[i][0] - r[0, 1] * c2) / r[0, 0]
        cs[i - 1] = (c1, c2)

    twopi = 2.0 * math.pi
    thetas = np.arange(samples) * (twopi / samples)
    seg_of = np.minimum((thetas / (twopi / nseg)).astype(int), nseg - 1)
    psi = np.empty(samples)
    for i in range(nseg):
        sel = np.nonzero(seg_of == i)[0]
        if sel.size == 0:
            continue
        ts = thetas[sel]
        t0 = twopi * i / nseg
        q_flat = np.array([qs[i, 0, 0], qs[i, 1, 0], qs[i, 0, 1], qs[i, 1, 1]])
        out = np.empty((ts.size, 4))
        if coeffs.torus_params is not None:
            st = _kernels.record_basis(coeffs.torus_params, eps, q_flat, t0, ts, tol, DEFAULT_ATOL, out)
            if st != 0:
                raise IntegrationError(f"eigenfunction sampling failed in segment {i} (status {st})")
        else:
            y = list(q_flat)
            t_prev = t0
            for j, t in enumerate(ts):
                y, st = _propagate4_py(coeffs.drift, coeffs.potential, eps, y, t_prev, t, tol, DEFAULT_ATOL)
                if st != 0:
                    raise IntegrationError(f"eigenfunction sampling failed in segment {i} (status {st})")
                out[j] = y
                t_prev = t
        psi[sel] = out[:, 0] * cs[i][0] + out[:, 2] * cs[i][1]

    w = np.asarray(coeffs.weight(thetas), dtype=float)
    if w.shape != thetas.shape:
        w = np.array([float(coeffs.weight(t)) for t in thetas])
    norm2 = float(np.sum(psi * psi * w) * (twopi / samples))
    if norm2 <= 0 or not math.isfinite(norm2):
        raise IntegrationError(f"eigenfunction normalization failed at eps={eps}")
    psi = psi / math.sqrt(norm2)
    if psi[int(np.argmax(np.abs(psi)))] < 0:
        psi = -psi
    return thetas, psi


def _classify_numeric(thetas, psi, weight_values, rel_tol=1e-4):
    rev = np.empty_like(psi)
    rev[0] = psi[0]
    rev[1:] = psi[:0:-1]
    w = weight_values
    norm = math.sqrt(float(np.sum(psi * psi * w)))
    d_even = math.sqrt(float(np.sum((rev - psi) ** 2 * w)))
    d_odd = math.sqrt(float(np.sum((rev + psi) ** 2 * w)))
    if d_even <= rel_tol * norm:
        return Parity.EVEN
    if d_odd <= rel_tol * norm:
        return Parity.ODD
    return Parity.UNCLASSIFIED


def parity_of(solution: EigenSolution, coeffs: CoefficientSet | None = None) -> Parity:
    """Parity label of a converged solution.

    Rederived-variant solutions keep the label of the half-interval problem
    that produced them; otherwise the sampled eigenfunction is compared with
    its theta -> 2 pi - theta reversal in the weighted L2 norm (relative
    tolerance 1e-4), returning UNCLASSIFIED when neither sign matches.
    """
    if solution.mode.variant is HamiltonianVariant.REDERIVED and solution.parity is not Parity.UNCLASSIFIED:
        return solution.parity
    if coeffs is None:
        coeffs = assemble(solution.shape, solution.mode)
    w = np.asarray(coeffs.weight(solution.thetas), dtype=float)
    if w.shape != solution.thetas.shape:
        w = np.array([float(coeffs.weight(t)) for t in solution.thetas])
    return _classify_numeric(solution.thetas, solution.psi, w)


# ---------------------------------------------------------------------------
# public API

def find_eigenvalues(
    shape: TorusShape,
    mode: FieldMode,
    window: SearchWindow | None = None,
    *,
    max_states: int | None = None,
    samples: int = 512,
    tol: float = DEFAULT_RTOL,
    _eps_cap: float | None = None,
) -> list[EigenSolution]:
    """Eigenvalues (and eigenfunctions) inside the search window, ascending.

    The rederived variant uses the parity-split half-interval search; the
    as-printed variant scans the full periodicity matching determinant.
    An empty window yields an empty list.
    """
    window = window or SearchWindow()
    coeffs = assemble(shape, mode)
    if mode.variant is HamiltonianVariant.REDERIVED:
        roots = _find_roots_parity(coeffs, window, tol, max_states, _eps_cap)
    else:
        roots = _find_roots_full(coeffs, window, tol, max_states, _eps_cap)
    roots = [rc for rc in roots if window.eps_min <= rc[0] <= window.eps_max]
    if max_states is not None:
        roots = roots[:max_states]

    solutions = []
    for eps, channel, res in roots:
        if channel is Parity.EVEN:
            v0 = np.array([1.0, 0.0])
        elif channel is Parity.ODD:
            v0 = np.array([0.0, 1.0])
        else:
            m = monodromy(coeffs, eps, tol)
            v0 = _null_vector(m)
        thetas, psi = _sample_eigenfunction(coeffs, eps, v0, samples, tol)
        if mode.variant is HamiltonianVariant.REDERIVED and channel is not None:
            parity = channel
        else:
            w = np.asarray(coeffs.weight(thetas), dtype=float)
            parity = _classify_numeric(thetas, psi, w)
        solutions.append(
            EigenSolution(
                epsilon=float(eps),
                parity=parity,
                thetas=thetas,
                psi=psi,
                residual=float(res),
                mode=mode,
                shape=shape,
            )
        )
    solutions.sort(key=lambda s: s.epsilon)
    return solutions


def _nu_order(nu_values):
    """Canonical minimization order: ascending |nu|, positive before negative."""
    return sorted(set(int(n) for n in nu_values), key=lambda n: (abs(n), 0 if n >= 0 else 1))


def ground_state(
    shape: TorusShape,
    *,
    gamma: float,
    curvature_on: bool = True,
    variant=HamiltonianVariant.AS_PRINTED,
    nu_range=None,
    fixed_nu: int | None = None,
    window: SearchWindow | None = None,
    samples: int = 512,
    tol: float = DEFAULT_RTOL,
):
    """Minimize the lowest eigenvalue over the azimuthal mode number.

    Returns (nu_star, solution).  Ties break toward smaller |nu|, then
    positive nu (guaranteed by the strict-improvement iteration order).
    With ``fixed_nu`` the minimization is skipped.
    """
    variant = HamiltonianVariant.parse(variant)
    if fixed_nu is not None:
        nus = [int(fixed_nu)]
    else:
        nus = _nu_order(nu_range if nu_range is not None else range(-10, 11))
    window = window or SearchWindow()

    best_nu, best_sol = None, None
    for nu in nus:
        mode = FieldMode(gamma=gamma, nu=nu, curvature_on=curvature_on, variant=variant)
        cap = None if best_sol is None else best_sol.epsilon + window.step
        sols = find_eigenvalues(
            shape, mode, window, max_states=1, samples=samples, tol=tol, _eps_cap=cap
        )
        if not sols:
            continue
        if best_sol is None or sols[0].epsilon < best_sol.epsilon:
            best_nu, best_sol = nu, sols[0]
    if best_sol is None:
        raise RuntimeError(
            f"no eigenvalue found in [{window.eps_min}, {window.eps_max}] for any nu in {nus}"
        )
    return best_nu, best_sol
