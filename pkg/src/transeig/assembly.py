"""Global sparse matrices and the doubled block eigenproblem.

Local 12 x 12 contributions are scattered into four global matrices over
the free DOFs (constrained rows/columns are dropped).  The block pencil
couples the primal field u with the auxiliary field equal to lambda * u:

    [ stiffness   0    ] [u]            [ coupling  weighted_mass ] [u]
    [    0      mass_M ] [w]  = lambda  [  mass_M        0        ] [w]

where mass_M is either the assembled mass matrix or the identity; both
choices generate the same spectrum because the second block row encodes
w = lambda * u either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .elements import DofMap, ReferenceBasis, local_matrices
from .mesh import Mesh
from .quadrature import QuadRule, rectangle_rule, triangle_rule
from .refraction import RefractionModel

DEFAULT_TRIANGLE_DEGREE = 8
DEFAULT_RECTANGLE_POINTS = 5


def default_rule(cell_kind: str) -> QuadRule:
    if cell_kind == "rectangle":
        return rectangle_rule(DEFAULT_RECTANGLE_POINTS)
    return triangle_rule(DEFAULT_TRIANGLE_DEGREE)


@dataclass(frozen=True)
class AssembledSystem:
    """The four global matrices on the free DOFs.

    stiffness must be symmetric positive definite and mass symmetric
    positive definite; coupling is non-symmetric for non-constant n.
    """

    stiffness: sp.csr_matrix
    coupling: sp.csr_matrix
    weighted_mass: sp.csr_matrix
    mass: sp.csr_matrix
    n_dofs: int
    use_identity_mass: bool = False


@dataclass(frozen=True)
class BlockProblem:
    """2N x 2N pencil (left, right); eigenvalues are the lambda values."""

    left: sp.csr_matrix
    right: sp.csr_matrix
    n_dofs: int
    use_identity_mass: bool


def _deterministic_csr(rows, cols, vals, n):
    """Sum duplicate triplets in a cell-order-independent way.

    Triplets are sorted by (row, col, value) before summation, so any
    permutation of the originating cells yields bit-identical matrices.
    """
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    vals = np.asarray(vals, dtype=float)
    order = np.lexsort((vals, cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if len(rows) == 0:
        return sp.csr_matrix((n, n))
    key = rows * n + cols
    starts = np.flatnonzero(np.r_[True, np.diff(key) != 0])
    summed = np.add.reduceat(vals, starts)
    mat = sp.csr_matrix((summed, (rows[starts], cols[starts])), shape=(n, n))
    mat.sort_indices()
    return mat


def assemble(mesh: Mesh, dofmap: DofMap, basis: ReferenceBasis,
             n_model: RefractionModel, rule: QuadRule = None,
             use_identity_mass: bool = False) -> AssembledSystem:
    """Assemble the four global matrices over the free DOFs.

    Cells are visited in index order and triplets reduced in a canonical
    order, so the result is independent of cell ordering.  For constant
    n the local matrices are shared between congruent cells.
    """
    if basis.element_kind != dofmap.element_kind:
        raise ValueError("basis and DOF map use different elements")
    if rule is None:
        rule = default_rule(mesh.cell_kind)
    n = dofmap.n_dofs
    rows, cols = [], []
    vals = {name: [] for name in ("stiffness", "coupling", "weighted_mass", "mass")}
    local_cache = {}
    cache_constant = n_model.kind == "constant"

    for ci, cell in enumerate(mesh.cells):
        verts = mesh.vertices[cell]
        orient = dofmap.edge_orientations[ci] if dofmap.edge_orientations else None
        if cache_constant:
            key = (tuple(np.round(verts - verts[0], 12).ravel()), orient)
            loc = local_cache.get(key)
            if loc is None:
                loc = local_matrices(basis, verts, n_model, rule, orient)
                local_cache[key] = loc
        else:
            loc = local_matrices(basis, verts, n_model, rule, orient)
        gl = dofmap.cell_dofs[ci]
        keep = np.flatnonzero(gl >= 0)
        gi = gl[keep]
        rows.append(np.repeat(gi, len(keep)))
        cols.append(np.tile(gi, len(keep)))
        for name, mat in (("stiffness", loc.bending), ("coupling", loc.coupling),
                          ("weighted_mass", loc.weighted_mass), ("mass", loc.mass)):
            vals[name].append(mat[np.ix_(keep, keep)].ravel())

    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.intp)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.intp)
    mats = {name: _deterministic_csr(rows, cols, np.concatenate(v) if v else [], n)
            for name, v in vals.items()}
    return AssembledSystem(mats["stiffness"], mats["coupling"],
                           mats["weighted_mass"], mats["mass"], n,
                           use_identity_mass)


def build_block_problem(system: AssembledSystem) -> BlockProblem:
    """Materialize the 2N x 2N pencil from the assembled matrices."""
    n = system.n_dofs
    mass_m = sp.identity(n, format="csr") if system.use_identity_mass else system.mass
    zero = sp.csr_matrix((n, n))
    left = sp.bmat([[system.stiffness, zero], [zero, mass_m]], format="csr")
    right = sp.bmat([[system.coupling, system.weighted_mass],
                     [mass_m, zero]], format="csr")
    return BlockProblem(left, right, n, system.use_identity_mass)


def write_matrix(matrix: sp.spmatrix, fh) -> None:
    """Coordinate text export: one `i j value` line per stored entry."""
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
        fh.write(f"{i} {j} {float(v)!r}\n")
