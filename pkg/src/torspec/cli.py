"""Command-line driver for flux sweeps.

Usage example:

    torspec-sweep --alpha 0.5 --beta 0.1 --gamma-min 0 --gamma-max 1.052 \
        --gamma-steps 11 --curvature on --variant printed --solver torus \
        --out fig4_torus_on.csv

A config file of key=value lines (keys matching the flag names, with '-' or
'_') can seed any option via --config; explicit flags override the file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .geometry import HamiltonianVariant
from .spectrum import SearchWindow
from .sweep import SweepConfig, emit, run_sweep

_DEFAULTS = {
    "alpha": 0.5,
    "beta": 0.1,
    "gamma_min": 0.0,
    "gamma_max": 2.104,
    "gamma_steps": 41,
    "nu_max": 10,
    "fixed_nu": None,
    "curvature": "on",
    "variant": "printed",
    "solver": "torus",
    "out": None,
    "format": "csv",
    "window_min": None,
    "window_max": None,
    "scan_step": None,
    "root_tol": None,
}

_CASTS = {
    "alpha": float,
    "beta": float,
    "gamma_min": float,
    "gamma_max": float,
    "gamma_steps": int,
    "nu_max": int,
    "fixed_nu": int,
    "curvature": str,
    "variant": str,
    "solver": str,
    "out": str,
    "format": str,
    "window_min": float,
    "window_max": float,
    "scan_step": float,
    "root_tol": float,
}


def _build_parser():
    p = argparse.ArgumentParser(
        prog="torspec-sweep",
        description="Ground-state energy flux sweeps for the elliptical torus and its flat limits.",
    )
    p.add_argument("--config", type=str, default=None, help="key=value file; flags override it")
    p.add_argument("--alpha", type=float, help="horizontal semi-axis / major radius")
    p.add_argument("--beta", type=float, help="vertical semi-axis / major radius")
    p.add_argument("--gamma-min", type=float, dest="gamma_min")
    p.add_argument("--gamma-max", type=float, dest="gamma_max")
    p.add_argument("--gamma-steps", type=int, dest="gamma_steps")
    p.add_argument("--nu-max", type=int, dest="nu_max", help="minimize over nu in [-nu_max, nu_max]")
    p.add_argument("--fixed-nu", type=int, dest="fixed_nu", help="skip minimization, use this nu")
    p.add_argument("--curvature", choices=["on", "off"])
    p.add_argument("--variant", choices=["printed", "rederived"])
    p.add_argument("--solver", choices=["torus", "ring", "ribbon"])
    p.add_argument("--out", type=str, help="output path (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "plotdata"], dest="format")
    p.add_argument("--window-min", type=float, dest="window_min", help="scan window lower edge")
    p.add_argument("--window-max", type=float, dest="window_max", help="scan window upper edge")
    p.add_argument("--scan-step", type=float, dest="scan_step")
    p.add_argument("--root-tol", type=float, dest="root_tol")
    return p


def _read_config(path):
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
        values[key] = _CASTS[key](value)
    return values


def _settings(args):
    settings = dict(_DEFAULTS)
    if args.config:
        settings.update(_read_config(args.config))
    for key in _DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            settings[key] = flag_value
    return settings


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        s = _settings(args)
        window = None
        if any(s[k] is not None for k in ("window_min", "window_max", "scan_step", "root_tol")):
            window = SearchWindow(
                eps_min=s["window_min"] if s["window_min"] is not None else -20.0,
                eps_max=s["window_max"] if s["window_max"] is not None else 80.0,
                step=s["scan_step"] if s["scan_step"] is not None else 0.05,
                root_tol=s["root_tol"] if s["root_tol"] is not None else 1e-9,
            )
        config = SweepConfig(
            alpha=s["alpha"],
            beta=s["beta"],
            gamma_min=s["gamma_min"],
            gamma_max=s["gamma_max"],
            gamma_steps=s["gamma_steps"],
            nu_max=s["nu_max"],
            fixed_nu=s["fixed_nu"],
            curvature_on=(s["curvature"] == "on"),
            variant=HamiltonianVariant.parse(s["variant"]),
            solver=s["solver"],
            out=s["out"],
            fmt=s["format"],
            window=window,
        )
        table = run_sweep(config)
        text = emit(table, fmt=config.fmt, path=config.out)
        if config.out is None:
            sys.stdout.write(text)
        failures = [r for r in table.rows if r.status != "ok"]
        if failures:
            print(f"warning: {len(failures)} sweep point(s) failed", file=sys.stderr)
        return 0
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"torspec-sweep: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
