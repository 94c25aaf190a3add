"""Stokes eigenmodes and truncated flow evolution on the periodic slip channel.

The package computes the full spectrum of the Stokes operator on the
doubly periodic channel with slip-with-friction walls, builds the
eigenfields explicitly, projects the quadratic convection term onto the
divergence-free wall-parallel subspace, and integrates the resulting
truncated evolution.  Everything is driven by three inputs: a wall
friction (frictionless, finite, or no-slip), a wavenumber triple
(m, n, p), and the pressure family of the mode.
"""

from .core import (
    EigenMode,
    Friction,
    FrictionKind,
    PlanarCoeffs,
    PressureFamily,
    WaveIndex,
    ZProfile,
)
from .eigensolver import (
    EigenvalueBracket,
    SolveResult,
    beta_sweep,
    bracket_for,
    eigenvalue,
    solve_details,
)
from .errors import (
    BlowupDetected,
    HypothesisViolated,
    InvalidCase,
    InvalidCount,
    InvalidIndex,
    NoRootInBracket,
    SlipchanError,
    StabilityViolation,
    ZeroMode,
)
from .fields import PlanarField, ScalarField
from .galerkin import (
    GalerkinState,
    GalerkinSystem,
    SolutionFamily,
    assemble,
    energy_report,
    explicit_solution,
    integrate,
    load_manifest,
    run_simulation,
)
from .helmholtz import convect, leray_project, triple_product
from .modes import (
    SpectrumEntry,
    build_mode,
    emit_table,
    enumerate_spectrum,
    multiplicity_of_value,
)

__version__ = "0.1.0"

__all__ = [
    "BlowupDetected",
    "EigenMode",
    "EigenvalueBracket",
    "Friction",
    "FrictionKind",
    "GalerkinState",
    "GalerkinSystem",
    "HypothesisViolated",
    "InvalidCase",
    "InvalidCount",
    "InvalidIndex",
    "NoRootInBracket",
    "PlanarCoeffs",
    "PlanarField",
    "PressureFamily",
    "ScalarField",
    "SlipchanError",
    "SolutionFamily",
    "SolveResult",
    "SpectrumEntry",
    "StabilityViolation",
    "WaveIndex",
    "ZProfile",
    "ZeroMode",
    "assemble",
    "beta_sweep",
    "bracket_for",
    "build_mode",
    "convect",
    "emit_table",
    "energy_report",
    "enumerate_spectrum",
    "eigenvalue",
    "explicit_solution",
    "integrate",
    "leray_project",
    "load_manifest",
    "multiplicity_of_value",
    "run_simulation",
    "solve_details",
    "triple_product",
    "__version__",
]
