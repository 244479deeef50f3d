"""Eigenvalue asymptotics of thin broken waveguides."""

from ._core import (
    DegenerateGeometry,
    NoBoundState,
    OutOfRange,
    PreconditionError,
    TruncationDominant,
    airy_norm_sq,
    airy_rev,
    airy_zero,
    bo_eigenvalues,
    fit_expansion,
    guide_eigenvalues,
    quasimode_coefficients,
    run_cli,
    toy_branch_trace,
    toy_eigenvalue_exact,
    triangle_eigenvalues,
)

__all__ = [
    "DegenerateGeometry",
    "NoBoundState",
    "OutOfRange",
    "PreconditionError",
    "TruncationDominant",
    "airy_norm_sq",
    "airy_rev",
    "airy_zero",
    "bo_eigenvalues",
    "fit_expansion",
    "guide_eigenvalues",
    "quasimode_coefficients",
    "run_cli",
    "toy_branch_trace",
    "toy_eigenvalue_exact",
    "triangle_eigenvalues",
]
