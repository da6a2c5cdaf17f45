"""bottomforge: exact-arithmetic toolkit for bottom complexes of pointed
rational cones — construction, verification, gluing, and enumeration."""

__version__ = "0.1.0"

from .cone import Cone, ConeFace, build_cone, enumerate_faces, facet_lattice_isomorphism
from .bottomcx import (
    EmbeddedComplex,
    VerificationReport,
    bottom_complex,
    cones_lattice_isomorphic,
    is_convex_towards_zero,
    realize_path,
    verify_bottom,
    verify_reduced_bottom,
)
from .monoid import (
    HilbertBasis,
    LatticePolytope,
    hilbert_basis,
    is_normal,
    is_unimodular_simplex,
    lattice_distance_one,
    lattice_points,
    max_decomposition_length,
)

__all__ = [
    "Cone",
    "ConeFace",
    "EmbeddedComplex",
    "HilbertBasis",
    "LatticePolytope",
    "VerificationReport",
    "bottom_complex",
    "build_cone",
    "cones_lattice_isomorphic",
    "enumerate_faces",
    "facet_lattice_isomorphism",
    "hilbert_basis",
    "is_convex_towards_zero",
    "is_normal",
    "is_unimodular_simplex",
    "lattice_distance_one",
    "lattice_points",
    "max_decomposition_length",
    "realize_path",
    "verify_bottom",
    "verify_reduced_bottom",
]
