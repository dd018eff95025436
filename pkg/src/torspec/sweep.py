"""Flux sweeps: ground-state energy versus flux parameter, CSV/plotdata output.

A sweep evaluates one solver (torus, ring or ribbon) over a gamma grid,
minimizing over the azimuthal mode unless a fixed nu is requested.  Rows
carry enough metadata to be regrouped into curves; emission is deterministic
(17-significant-digit decimal, byte-identical across repeated runs).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import HamiltonianVariant, TorusShape
from .limits import (
    RibbonSpec,
    RingSpec,
    ribbon_ground_state,
    ribbon_ground_state_min_nu,
    ring_fd_error_estimate,
    ring_ground_state,
    ring_ground_state_min_nu,
)
from .spectrum import Parity, SearchWindow, ground_state, spectral_lower_bound

log = logging.getLogger(__name__)

CSV_HEADER = "gamma,nu_star,epsilon0,parity,residual,solver,variant,curvature,alpha,beta"

SOLVERS = ("torus", "ring", "ribbon")


@dataclass(frozen=True)
class SweepConfig:
    alpha: float
    beta: float
    gamma_min: float = 0.0
    gamma_max: float = 2.104
    gamma_steps: int = 41
    nu_max: int = 10
    fixed_nu: int | None = None
    curvature_on: bool = True
    variant: HamiltonianVariant = HamiltonianVariant.AS_PRINTED
    solver: str = "torus"
    out: str | None = None
    fmt: str = "csv"
    window: SearchWindow | None = None
    tol: float = 1e-10
    samples: int = 512

    def __post_init__(self):
        if self.gamma_steps < 1:
            raise ValueError(f"gamma grid needs at least one point, got {self.gamma_steps}")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.fmt not in ("csv", "plotdata"):
            raise ValueError(f"format must be 'csv' or 'plotdata', got {self.fmt!r}")
        object.__setattr__(self, "variant", HamiltonianVariant.parse(self.variant))

    def gammas(self) -> np.ndarray:
        if self.gamma_steps == 1:
            return np.array([self.gamma_min])
        return np.linspace(self.gamma_min, self.gamma_max, self.gamma_steps)

    def nu_values(self):
        return range(-self.nu_max, self.nu_max + 1)


@dataclass
class SweepRow:
    gamma: float
    nu_star: int
    epsilon0: float
    parity: str
    residual: float
    solver: str
    variant: str
    curvature: str
    alpha: float
    beta: float
    status: str = "ok"  # bookkeeping only; not emitted

    def curve_key(self):
        return (self.solver, self.variant, self.curvature, self.alpha, self.beta)


@dataclass
class SweepTable:
    rows: list[SweepRow] = field(default_factory=list)

    def append(self, row: SweepRow):
        self.rows.append(row)

    def extend(self, other: "SweepTable"):
        self.rows.extend(other.rows)

    def __len__(self):
        return len(self.rows)

    def validate(self):
        """Per curve: rows sorted by gamma, one row per gamma."""
        seen = {}
        for row in self.rows:
            key = row.curve_key()
            if key in seen and row.gamma <= seen[key]:
                raise ValueError(f"rows of curve {key} not strictly increasing in gamma")
            seen[key] = row.gamma
        return self


def _torus_point(config: SweepConfig, gamma: float) -> SweepRow:
    shape = TorusShape(alpha=config.alpha, beta=config.beta)
    window = config.window
    if window is None:
        from .hamiltonian import FieldMode, assemble

        mode0 = FieldMode(gamma=gamma, nu=0, curvature_on=config.curvature_on, variant=config.variant)
        bound = spectral_lower_bound(assemble(shape, mode0))
        window = SearchWindow(eps_min=min(-20.0, bound - 0.5))
    nu_star, sol = ground_state(
        shape,
        gamma=gamma,
        curvature_on=config.curvature_on,
        variant=config.variant,
        nu_range=config.nu_values(),
        fixed_nu=config.fixed_nu,
        window=window,
        samples=config.samples,
        tol=config.tol,
    )
    return SweepRow(
        gamma=gamma,
        nu_star=nu_star,
        epsilon0=sol.epsilon,
        parity=sol.parity.value,
        residual=sol.residual,
        solver="torus",
        variant=config.variant.value,
        curvature="on" if config.curvature_on else "off",
        alpha=config.alpha,
        beta=config.beta,
    )


def _ring_point(config: SweepConfig, gamma: float) -> SweepRow:
    if config.fixed_nu is not None:
        nu_star = config.fixed_nu
        eps = ring_ground_state(RingSpec(alpha=config.alpha, gamma=gamma, nu=nu_star))
    else:
        nu_star, eps = ring_ground_state_min_nu(config.alpha, gamma, config.nu_values())
    err = ring_fd_error_estimate(RingSpec(alpha=config.alpha, gamma=gamma, nu=nu_star))
    return SweepRow(
        gamma=gamma,
        nu_star=nu_star,
        epsilon0=eps,
        parity=Parity.UNCLASSIFIED.value,
        residual=err,
        solver="ring",
        variant=config.variant.value,
        curvature="off",
        alpha=config.alpha,
        beta=config.beta,
    )


def _ribbon_point(config: SweepConfig, gamma: float) -> SweepRow:
    if config.fixed_nu is not None:
        nu_star = config.fixed_nu
        eps = ribbon_ground_state(
            RibbonSpec(beta=config.beta, alpha=config.alpha, gamma=gamma, nu=nu_star)
        )
    else:
        nu_star, eps = ribbon_ground_state_min_nu(
            config.beta, config.alpha, gamma, config.nu_values()
        )
    return SweepRow(
        gamma=gamma,
        nu_star=nu_star,
        epsilon0=eps,
        parity=Parity.UNCLASSIFIED.value,
        residual=0.0,
        solver="ribbon",
        variant=config.variant.value,
        curvature="off",
        alpha=config.alpha,
        beta=config.beta,
    )


_POINT_SOLVERS = {"torus": _torus_point, "ring": _ring_point, "ribbon": _ribbon_point}


def run_sweep(config: SweepConfig) -> SweepTable:
    """Evaluate the configured solver over the gamma grid.

    Points are computed in gamma order (deterministic output); per-point
    failures are recorded in the row's status field with epsilon0 = nan and
    the sweep continues.
    """
    solver_fn = _POINT_SOLVERS[config.solver]
    table = SweepTable()
    for gamma in config.gammas():
        try:
            table.append(solver_fn(config, float(gamma)))
        except Exception as exc:  # per-point failure; keep sweeping
            log.warning("sweep point gamma=%.6g failed: %s", gamma, exc)
            table.append(
                SweepRow(
                    gamma=float(gamma),
                    nu_star=config.fixed_nu or 0,
                    epsilon0=float("nan"),
                    parity=Parity.UNCLASSIFIED.value,
                    residual=float("nan"),
                    solver=config.solver,
                    variant=config.variant.value,
                    curvature="on" if (config.solver == "torus" and config.curvature_on) else "off",
                    alpha=config.alpha,
                    beta=config.beta,
                    status=f"error: {exc}",
                )
            )
    return table


# ---------------------------------------------------------------------------
# emission

def _fmt(x: float) -> str:
    """Round-trip decimal for IEEE doubles (17 significant digits)."""
    return format(float(x), ".17g")


def format_csv(table: SweepTable) -> str:
    if not table.rows:
        raise ValueError("empty sweep")
    lines = [CSV_HEADER]
    for r in table.rows:
        lines.append(
            ",".join(
                (
                    _fmt(r.gamma),
                    str(int(r.nu_star)),
                    _fmt(r.epsilon0),
                    r.parity,
                    _fmt(r.residual),
                    r.solver,
                    r.variant,
                    r.curvature,
                    _fmt(r.alpha),
                    _fmt(r.beta),
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> SweepTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized sweep CSV header")
    table = SweepTable()
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 10:
            raise ValueError(f"malformed sweep CSV row: {ln!r}")
        table.append(
            SweepRow(
                gamma=float(parts[0]),
                nu_star=int(parts[1]),
                epsilon0=float(parts[2]),
                parity=parts[3],
                residual=float(parts[4]),
                solver=parts[5],
                variant=parts[6],
                curvature=parts[7],
                alpha=float(parts[8]),
                beta=float(parts[9]),
            )
        )
    return table


def format_plotdata(table: SweepTable) -> str:
    """Gnuplot-style blocks: one whitespace-separated block per curve,
    blank-line separated, with a comment header naming the curve."""
    if not table.rows:
        raise ValueError("empty sweep")
    groups: dict = {}
    for r in table.rows:
        groups.setdefault(r.curve_key(), []).append(r)
    blocks = []
    for key in sorted(groups, key=str):
        solver, variant, curvature, alpha, beta = key
        rows = sorted(groups[key], key=lambda r: r.gamma)
        lines = [
            f"# solver={solver} variant={variant} curvature={curvature} "
            f"alpha={_fmt(alpha)} beta={_fmt(beta)}",
            "# gamma epsilon0 nu_star parity residual",
        ]
        for r in rows:
            lines.append(
                f"{_fmt(r.gamma)} {_fmt(r.epsilon0)} {int(r.nu_star)} {r.parity} {_fmt(r.residual)}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def emit(table: SweepTable, fmt: str = "csv", path=None) -> str:
    """Render the table; write it to path when given.  Raises on empty
    tables and reports I/O failures with the offending path."""
    if fmt == "csv":
        text = format_csv(table)
    elif fmt == "plotdata":
        text = format_plotdata(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write sweep output to {path}: {exc}") from exc
    return text
