"""Exact cohomology of morphisms of differential algebras of weight lambda."""

__version__ = "0.1.0"

from .exactlin import ContainmentError, InputError, Matrix, Subspace, kernel_basis, quotient_dim, rank, solve
from .structures import (
    DiffAlgebraMorphism,
    DifferentialAlgebra,
    DifferentialBimodule,
    PhiBimodule,
    mapping_module,
    mapping_ring,
    self_coefficients,
    triangle_bimodule,
    triangle_phi_bimodule,
    validate,
)
from .cohomology import BrokenComplexError, CohomologyReport, cohomology, same_class
from .cct import CctCertificate, cct_check

__all__ = [
    "ContainmentError",
    "InputError",
    "Matrix",
    "Subspace",
    "kernel_basis",
    "quotient_dim",
    "rank",
    "solve",
    "DiffAlgebraMorphism",
    "DifferentialAlgebra",
    "DifferentialBimodule",
    "PhiBimodule",
    "mapping_module",
    "mapping_ring",
    "self_coefficients",
    "triangle_bimodule",
    "triangle_phi_bimodule",
    "validate",
    "BrokenComplexError",
    "CohomologyReport",
    "cohomology",
    "same_class",
    "CctCertificate",
    "cct_check",
]
