"""Spectra of an electron on an elliptical torus surface in an axial field."""

from .geometry import (
    CurvaturePair,
    HamiltonianVariant,
    ProfileSample,
    TorusShape,
    curvature_potential,
    curvatures,
    frame_self_check,
    profile,
)
from .hamiltonian import (
    FLUX_PER_TESLA,
    CoefficientSet,
    FieldMode,
    assemble,
    evaluate_coefficients,
    flux_from_tesla,
)
from .integrator import (
    IntegrationError,
    Monodromy,
    OdeState,
    abel_residual,
    matching_residual,
    monodromy,
    periodicity_residual,
    propagate,
)
from .fd_oracle import FdProblem, OracleSpectrumError, fd_eigenpairs, fd_eigenvalues
from .limits import (
    RibbonSpec,
    RingSpec,
    bessel_cross_product_root,
    ribbon_energies,
    ribbon_energy,
    ribbon_ground_state,
    ribbon_ground_state_min_nu,
    ring_ground_state,
    ring_ground_state_min_nu,
    ring_ground_state_shooting,
)
from .spectrum import (
    EigenSolution,
    Parity,
    SearchWindow,
    find_eigenvalues,
    ground_state,
    parity_of,
    spectral_lower_bound,
    suggested_window,
)
from .sweep import CSV_HEADER, SweepConfig, SweepRow, SweepTable, emit, parse_csv, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "CoefficientSet",
    "CurvaturePair",
    "EigenSolution",
    "FLUX_PER_TESLA",
    "FdProblem",
    "FieldMode",
    "HamiltonianVariant",
    "IntegrationError",
    "Monodromy",
    "OdeState",
    "OracleSpectrumError",
    "Parity",
    "ProfileSample",
    "RibbonSpec",
    "RingSpec",
    "SearchWindow",
    "SweepConfig",
    "SweepRow",
    "SweepTable",
    "TorusShape",
    "abel_residual",
    "assemble",
    "bessel_cross_product_root",
    "curvature_potential",
    "curvatures",
    "emit",
    "evaluate_coefficients",
    "fd_eigenpairs",
    "fd_eigenvalues",
    "find_eigenvalues",
    "flux_from_tesla",
    "frame_self_check",
    "ground_state",
    "matching_residual",
    "monodromy",
    "parity_of",
    "parse_csv",
    "periodicity_residual",
    "profile",
    "propagate",
    "ribbon_energies",
    "ribbon_energy",
    "ribbon_ground_state",
    "ribbon_ground_state_min_nu",
    "ring_ground_state",
    "ring_ground_state_min_nu",
    "ring_ground_state_shooting",
    "run_sweep",
    "spectral_lower_bound",
    "suggested_window",
]
