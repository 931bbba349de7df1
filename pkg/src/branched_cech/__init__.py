"""Exact-arithmetic computation of the cohomology of a 7-sheeted branched
cover of the boundary 3-sphere of the reflexive 4-simplex, plus the mod-2
square-map analysis for smooth toric Fano fourfolds."""

from .exact_linalg import (AbelianGroup, BitMatrix, SmithForm,
                           SparseIntMatrix, cohomology_at, invariant_factors,
                           rank_mod2, smith_normal_form)
from .lattice import (LatticePolytope, batyrev_h21, count_antik_sections,
                      enumerate_lattice_points, face_lattice,
                      quintic_polytope, relative_interior_points)

__all__ = [
    "AbelianGroup", "BitMatrix", "SmithForm", "SparseIntMatrix",
    "cohomology_at", "invariant_factors", "rank_mod2", "smith_normal_form",
    "LatticePolytope", "batyrev_h21", "count_antik_sections",
    "enumerate_lattice_points", "face_lattice", "quintic_polytope",
    "relative_interior_points",
]

__version__ = "0.1.0"
