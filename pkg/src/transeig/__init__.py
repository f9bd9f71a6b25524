"""Transmission eigenvalues of the Helmholtz problem computed with
non-conforming plate elements (Adini rectangles and Morley-Zienkiewicz
triangles) and a shift-invert Arnoldi block eigensolver."""

from .assembly import AssembledSystem, BlockProblem, assemble, build_block_problem
from .elements import (ADINI, MZ, DofMap, ReferenceBasis, adini_basis,
                       build_dof_map, interpolate, local_matrices, mz_basis)
from .eigensolver import (EigenPair, SolverConfig, certify, factorize,
                          scan_shifts, shift_invert_arnoldi)
from .experiments import ExperimentConfig, convergence_study, reproduce_tables, run_case
from .mesh import (Mesh, build_disk_tri_mesh, build_square_rect_mesh,
                   build_structured_tri_mesh, validate_mesh)
from .quadrature import QuadRule, map_rule, rectangle_rule, triangle_rule
from .refraction import RefractionModel, coefficients_at, make_model

__all__ = [
    "ADINI", "MZ", "AssembledSystem", "BlockProblem", "DofMap", "EigenPair",
    "ExperimentConfig", "Mesh", "QuadRule", "ReferenceBasis",
    "RefractionModel", "SolverConfig", "adini_basis", "assemble",
    "build_block_problem", "build_disk_tri_mesh", "build_dof_map",
    "build_square_rect_mesh", "build_structured_tri_mesh", "certify",
    "coefficients_at", "convergence_study", "factorize", "interpolate",
    "local_matrices", "make_model", "map_rule", "mz_basis", "rectangle_rule",
    "reproduce_tables", "run_case", "scan_shifts", "shift_invert_arnoldi",
    "triangle_rule", "validate_mesh",
]

__version__ = "0.1.0"
