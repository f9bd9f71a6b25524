"""The two 12-DOF plate elements and their local matrices.

Adini rectangle: cubic polynomials plus x^3 y and x y^3 on axis-aligned
rectangles; DOFs are value and both first derivatives at the corners.

Morley-Zienkiewicz (MZ) triangle: the 9-DOF reduced cubic (vertex values
and gradients) enriched with the three quartic bubbles
l1^2 l2 l3, l1 l2^2 l3, l1 l2 l3^2 in barycentric coordinates; the extra
DOFs are the mean normal derivatives over the edges.  The reduced cubic
space is spanned by quadratics plus the three cubics l_i l_j (l_i - l_j);
its correctness is pinned by the Kronecker-delta and quadratic
reproduction tests rather than any particular published formula.

Shape functions are constructed per physical cell by inverting the
12 x 12 DOF/spanning-function matrix; congruent cells share a cached
construction.  Edge-mean DOFs are taken along the global edge normal
(edge oriented from its lower to its higher global vertex index, normal
obtained by clockwise rotation), which makes the functional identical
for both incident cells and builds the mean-gradient continuity into the
assembled space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .mesh import Mesh
from .quadrature import QuadRule, _gauss_unit
from .refraction import RefractionModel

ADINI = "adini"
MZ = "mz"

# exponents (a, b) of the Adini spanning monomials x^a y^b
_ADINI_EXPONENTS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
                    (3, 0), (2, 1), (1, 2), (0, 3), (3, 1), (1, 3)]

# MZ spanning set, each entry a list of (coefficient, barycentric exponents)
_MZ_SPAN = [
    [(1.0, (0, 0, 0))],
    [(1.0, (0, 1, 0))],
    [(1.0, (0, 0, 1))],
    [(1.0, (0, 2, 0))],
    [(1.0, (0, 1, 1))],
    [(1.0, (0, 0, 2))],
    [(1.0, (2, 1, 0)), (-1.0, (1, 2, 0))],
    [(1.0, (0, 2, 1)), (-1.0, (0, 1, 2))],
    [(1.0, (1, 0, 2)), (-1.0, (2, 0, 1))],
    [(1.0, (2, 1, 1))],
    [(1.0, (1, 2, 1))],
    [(1.0, (1, 1, 2))],
]

_EDGE_LOCAL = ((0, 1), (1, 2), (2, 0))
_EDGE_QUAD_N = 5  # exact for the quartic edge traces of both spaces


class BasisError(Exception):
    """Shape-function construction failed (singular DOF matrix)."""


@dataclass(frozen=True)
class DofDescriptor:
    kind: str    # "vertex-value" | "vertex-grad-x" | "vertex-grad-y" | "edge-mean-normal"
    entity: int  # local vertex or local edge index


def _adini_descriptors():
    out = []
    for v in range(4):
        out += [DofDescriptor("vertex-value", v), DofDescriptor("vertex-grad-x", v),
                DofDescriptor("vertex-grad-y", v)]
    return tuple(out)


def _mz_descriptors():
    out = []
    for v in range(3):
        out += [DofDescriptor("vertex-value", v), DofDescriptor("vertex-grad-x", v),
                DofDescriptor("vertex-grad-y", v)]
    out += [DofDescriptor("edge-mean-normal", e) for e in range(3)]
    return tuple(out)


def _eval_monomials(exps, pts):
    """Values and derivatives of x^a y^b monomials at pts: 6 arrays (npts, n)."""
    x, y = pts[:, 0], pts[:, 1]
    z = np.zeros_like(x)

    def p(v, e):
        if e < 0:
            return z
        return v ** e

    val = np.stack([p(x, a) * p(y, b) for a, b in exps], axis=1)
    gx = np.stack([a * p(x, a - 1) * p(y, b) if a else z for a, b in exps], axis=1)
    gy = np.stack([b * p(x, a) * p(y, b - 1) if b else z for a, b in exps], axis=1)
    hxx = np.stack([a * (a - 1) * p(x, a - 2) * p(y, b) if a > 1 else z
                    for a, b in exps], axis=1)
    hxy = np.stack([a * b * p(x, a - 1) * p(y, b - 1) if a and b else z
                    for a, b in exps], axis=1)
    hyy = np.stack([b * (b - 1) * p(x, a) * p(y, b - 2) if b > 1 else z
                    for a, b in exps], axis=1)
    return val, gx, gy, hxx, hxy, hyy


def _bary_coefficients(verts):
    """L with columns the (1, x, y) coefficients of the barycentric functions."""
    V = np.ones((3, 3))
    V[:, 1:] = verts
    return np.linalg.inv(V)


def _eval_mz_span(L, pts):
    """Values/derivatives of the MZ spanning set at physical points."""
    npts = len(pts)
    P = np.column_stack([np.ones(npts), pts[:, 0], pts[:, 1]])
    lam = P @ L
    g = L[1:, :].T  # constant gradients of the barycentric functions
    ns = len(_MZ_SPAN)
    val = np.zeros((npts, ns))
    gx = np.zeros((npts, ns))
    gy = np.zeros((npts, ns))
    hxx = np.zeros((npts, ns))
    hxy = np.zeros((npts, ns))
    hyy = np.zeros((npts, ns))

    def lampow(e):
        out = np.ones(npts)
        for i in range(3):
            if e[i]:
                out = out * lam[:, i] ** e[i]
        return out

    for s, terms in enumerate(_MZ_SPAN):
        for coef, e in terms:
            e = np.asarray(e)
            val[:, s] += coef * lampow(e)
            for i in range(3):
                if e[i] == 0:
                    continue
                de = e.copy()
                de[i] -= 1
                t1 = coef * e[i] * lampow(de)
                gx[:, s] += t1 * g[i, 0]
                gy[:, s] += t1 * g[i, 1]
                for j in range(3):
                    if de[j] == 0:
                        continue
                    de2 = de.copy()
                    de2[j] -= 1
                    t2 = coef * e[i] * de[j] * lampow(de2)
                    hxx[:, s] += t2 * g[i, 0] * g[j, 0]
                    hxy[:, s] += t2 * g[i, 0] * g[j, 1]
                    hyy[:, s] += t2 * g[i, 1] * g[j, 1]
    return val, gx, gy, hxx, hxy, hyy


def _edge_quadrature(va, vb):
    """Points and mean-weights along the segment va -> vb."""
    u, w = _gauss_unit(_EDGE_QUAD_N)
    pts = va[None, :] + u[:, None] * (vb - va)[None, :]
    return pts, w


def _global_edge_normal(va, vb):
    """Unit normal of the edge oriented va -> vb (tangent rotated clockwise)."""
    t = vb - va
    t = t / np.hypot(*t)
    return np.array([t[1], -t[0]])


class CellBasis:
    """Shape functions of one element bound to one physical cell."""

    def __init__(self, element_kind, vertices, edge_orientations=None):
        self.element_kind = element_kind
        self.vertices = np.asarray(vertices, dtype=float)
        if element_kind == ADINI:
            self.descriptors = _adini_descriptors()
            self._init_adini()
        elif element_kind == MZ:
            self.descriptors = _mz_descriptors()
            self.edge_orientations = tuple(edge_orientations or _EDGE_LOCAL)
            self._init_mz()
        else:
            raise ValueError(f"unknown element kind {element_kind!r}")
        self._quad_cache = {}
        self._rep = self  # representative of the congruence class

    # -- construction ---------------------------------------------------

    def _init_adini(self):
        v = self.vertices
        self._hx = v[1, 0] - v[0, 0]
        self._hy = v[3, 1] - v[0, 1]
        if self._hx <= 0 or self._hy <= 0:
            raise BasisError("rectangle cell is degenerate or mis-ordered")
        corners = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        val, gx, gy, *_ = _eval_monomials(_ADINI_EXPONENTS, corners)
        M = np.zeros((12, 12))
        for i in range(4):
            M[3 * i + 0] = val[i]
            M[3 * i + 1] = gx[i]
            M[3 * i + 2] = gy[i]
        self._coeff = _checked_inverse(M)
        # physical k-th shape function is scale[k] * reference one
        self._scale = np.tile([1.0, self._hx, self._hy], 4)

    def _init_mz(self):
        v = self.vertices
        self._L = _bary_coefficients(v)
        val, gx, gy, *_ = _eval_mz_span(self._L, v)
        M = np.zeros((12, 12))
        for i in range(3):
            M[3 * i + 0] = val[i]
            M[3 * i + 1] = gx[i]
            M[3 * i + 2] = gy[i]
        for k, (a, b) in enumerate(self.edge_orientations):
            pts, w = _edge_quadrature(v[a], v[b])
            nrm = _global_edge_normal(v[a], v[b])
            _, egx, egy, *_ = _eval_mz_span(self._L, pts)
            M[9 + k] = w @ (egx * nrm[0] + egy * nrm[1])
        self._coeff = _checked_inverse(M)

    # -- evaluation -----------------------------------------------------

    def eval_all(self, points):
        """Six (npts, 12) arrays: value, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.element_kind == ADINI:
            v0 = self.vertices[0]
            ref = (points - v0) / np.array([self._hx, self._hy])
            val, gx, gy, hxx, hxy, hyy = _eval_monomials(_ADINI_EXPONENTS, ref)
            C = self._coeff * self._scale[None, :]
            return (val @ C, (gx @ C) / self._hx, (gy @ C) / self._hy,
                    (hxx @ C) / self._hx ** 2, (hxy @ C) / (self._hx * self._hy),
                    (hyy @ C) / self._hy ** 2)
        out = _eval_mz_span(self._L, points)
        return tuple(arr @ self._coeff for arr in out)

    def eval_rel_cached(self, rel_points, key):
        """eval_all at vertices[0] + rel_points, cached per congruence class.

        Shape-function arrays are translation-invariant in the offset
        coordinates, so the congruence representative evaluates once per
        rule and every translated copy reuses the arrays.
        """
        rep = self._rep
        if key not in rep._quad_cache:
            rep._quad_cache[key] = rep.eval_all(rep.vertices[0] + rel_points)
        return rep._quad_cache[key]

    # -- DOF functionals -------------------------------------------------

    def apply_dofs(self, f: Callable, grad_f: Callable) -> np.ndarray:
        """Apply the 12 DOF functionals to a smooth function."""
        v = self.vertices
        out = np.zeros(12)
        nvert = 4 if self.element_kind == ADINI else 3
        fv = np.asarray(f(v), dtype=float)
        gv = np.asarray(grad_f(v), dtype=float)
        for i in range(nvert):
            out[3 * i + 0] = fv[i]
            out[3 * i + 1] = gv[i, 0]
            out[3 * i + 2] = gv[i, 1]
        if self.element_kind == MZ:
            for k, (a, b) in enumerate(self.edge_orientations):
                pts, w = _edge_quadrature(v[a], v[b])
                nrm = _global_edge_normal(v[a], v[b])
                out[9 + k] = w @ (np.asarray(grad_f(pts)) @ nrm)
        return out

    def evaluate(self, coefficients, points):
        """Evaluate the function with the given local DOF coefficients."""
        val, *_ = self.eval_all(points)
        return val @ np.asarray(coefficients)


def _checked_inverse(M):
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise BasisError(f"DOF matrix numerically singular (cond {cond:.3e})")
    return np.linalg.inv(M)


class ReferenceBasis:
    """Element family handle: reference-cell evaluators plus a cell cache."""

    def __init__(self, element_kind):
        if element_kind not in (ADINI, MZ):
            raise ValueError(f"unknown element kind {element_kind!r}")
        self.element_kind = element_kind
        self.dof_count = 12
        if element_kind == ADINI:
            self.reference_vertices = np.array([[0.0, 0.0], [1.0, 0.0],
                                                [1.0, 1.0], [0.0, 1.0]])
        else:
            self.reference_vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        self._reference = CellBasis(element_kind, self.reference_vertices)
        self.dof_functionals = self._reference.descriptors
        self._cache = {}

    def reference_cell(self) -> CellBasis:
        return self._reference

    def cell_basis(self, vertices, edge_orientations=None) -> CellBasis:
        """Shape functions on a physical cell, shared between congruent cells."""
        vertices = np.asarray(vertices, dtype=float)
        rel = np.round(vertices - vertices[0], 12)
        key = (tuple(rel.ravel()), tuple(edge_orientations or ()))
        hit = self._cache.get(key)
        if hit is not None and np.allclose(hit.vertices - hit.vertices[0],
                                           vertices - vertices[0], atol=1e-12):
            return _translated(hit, vertices)
        cb = CellBasis(self.element_kind, vertices, edge_orientations)
        self._cache[key] = cb
        return cb


def _translated(cached: CellBasis, vertices) -> CellBasis:
    """Reuse a congruent cell's construction under pure translation."""
    if np.array_equal(cached.vertices, vertices):
        return cached
    shifted = CellBasis.__new__(CellBasis)
    shifted.element_kind = cached.element_kind
    shifted.vertices = np.asarray(vertices, dtype=float)
    shifted.descriptors = cached.descriptors
    shifted._coeff = cached._coeff
    shifted._quad_cache = cached._quad_cache
    shifted._rep = cached._rep
    if cached.element_kind == ADINI:
        shifted._hx = cached._hx
        shifted._hy = cached._hy
        shifted._scale = cached._scale
    else:
        shifted.edge_orientations = cached.edge_orientations
        shifted._L = _bary_coefficients(shifted.vertices)
    return shifted


def adini_basis() -> ReferenceBasis:
    """Adini rectangle family."""
    return ReferenceBasis(ADINI)


def mz_basis() -> ReferenceBasis:
    """Morley-Zienkiewicz triangle family."""
    return ReferenceBasis(MZ)


def interpolate(basis: ReferenceBasis, cell_vertices, f: Callable,
                grad_f: Callable, edge_orientations=None) -> np.ndarray:
    """Local nodal interpolation: the 12 DOF values of f on the cell."""
    cb = basis.cell_basis(cell_vertices, edge_orientations)
    return cb.apply_dofs(f, grad_f)


@dataclass(frozen=True)
class LocalMatrices:
    """The four 12 x 12 cell contributions.

    bending: stabilized second-order form (Laplacian product weighted by
    inv_contrast - mu plus mu times the full Hessian inner product).
    coupling: mixed gradient form with the contrast coefficients expanded
    by the product rule.
    weighted_mass: -(mass_ratio) weighted L2 product.
    mass: plain L2 product.
    Row index = test function, column = trial function.
    """

    bending: np.ndarray
    coupling: np.ndarray
    weighted_mass: np.ndarray
    mass: np.ndarray


def local_matrices(basis: ReferenceBasis, cell_vertices,
                   n_model: RefractionModel, rule: QuadRule,
                   edge_orientations=None) -> LocalMatrices:
    """Integrate the four local forms on one cell with the mapped rule."""
    from .quadrature import map_rule

    cb = basis.cell_basis(cell_vertices, edge_orientations)
    pts, w = map_rule(rule, cb.vertices)
    rel = pts - cb.vertices[0]
    key = (rule.kind, rule.exactness_degree, len(rule.points))
    val, gx, gy, hxx, hxy, hyy = cb.eval_rel_cached(rel, key)
    co = n_model.coefficients_at(pts)
    mu = n_model.mu

    lap = hxx + hyy
    bend = (np.einsum("p,pl,pj->lj", w * co.lead, lap, lap)
            + mu * (np.einsum("p,pl,pj->lj", w, hxx, hxx)
                    + 2.0 * np.einsum("p,pl,pj->lj", w, hxy, hxy)
                    + np.einsum("p,pl,pj->lj", w, hyy, hyy)))

    wg = w * (co.inv_contrast + co.mass_ratio)
    grad2 = (np.einsum("p,pl,pj->lj", wg, gx, gx)
             + np.einsum("p,pl,pj->lj", wg, gy, gy))
    # product-rule remainders: (grad coefficient . grad test) * trial and
    # (grad coefficient . grad trial) * test
    dgx = co.grad_inv_contrast[:, 0]
    dgy = co.grad_inv_contrast[:, 1]
    gdot = gx * (w * dgx)[:, None] + gy * (w * dgy)[:, None]
    coupling = grad2 + np.einsum("pl,pj->lj", gdot, val) + np.einsum("pl,pj->lj", val, gdot)

    mass = np.einsum("p,pl,pj->lj", w, val, val)
    wmass = -np.einsum("p,pl,pj->lj", w * co.mass_ratio, val, val)
    return LocalMatrices(bend, coupling, wmass, mass)


@dataclass(frozen=True)
class DofMap:
    """Global numbering of the free DOFs with boundary DOFs eliminated.

    cell_dofs[c, k] is the free-DOF index of local DOF k on cell c, or -1
    when that DOF is constrained.  edge_orientations[c] lists, for the MZ
    element, the local vertex order of each cell edge matching the global
    (lower index -> higher index) orientation.
    """

    element_kind: str
    cell_dofs: np.ndarray
    n_dofs: int
    n_constrained: int
    edge_orientations: Optional[tuple]


def build_dof_map(mesh: Mesh, element_kind: str) -> DofMap:
    """Number the free DOFs of the element space on the mesh.

    Constrained: all three vertex DOFs at boundary vertices (both
    elements) and the edge-mean DOFs on boundary edges (MZ).
    """
    if element_kind == ADINI and mesh.cell_kind != "rectangle":
        raise ValueError("adini element requires a rectangle mesh")
    if element_kind == MZ and mesh.cell_kind != "triangle":
        raise ValueError("mz element requires a triangle mesh")

    free = {}
    for v in range(mesh.n_vertices):
        if not mesh.boundary_vertex[v]:
            for comp in range(3):
                free[("v", v, comp)] = len(free)
    if element_kind == MZ:
        for ei, (a, b) in enumerate(mesh.edges):
            if not mesh.boundary_edge[ei]:
                free[("e", int(a), int(b))] = len(free)

    nloc = 12
    cell_dofs = np.full((mesh.n_cells, nloc), -1, dtype=np.intp)
    orientations = [] if element_kind == MZ else None
    for ci, cell in enumerate(mesh.cells):
        k = 0
        for v in cell:
            for comp in range(3):
                cell_dofs[ci, k] = free.get(("v", int(v), comp), -1)
                k += 1
        if element_kind == MZ:
            cell_orient = []
            for la, lb in _EDGE_LOCAL:
                p, q = int(cell[la]), int(cell[lb])
                cell_dofs[ci, k] = free.get(("e", min(p, q), max(p, q)), -1)
                k += 1
                cell_orient.append((la, lb) if p < q else (lb, la))
            orientations.append(tuple(cell_orient))
    n_total = 3 * mesh.n_vertices + (mesh.n_edges if element_kind == MZ else 0)
    return DofMap(element_kind, cell_dofs, len(free), n_total - len(free),
                  tuple(orientations) if orientations is not None else None)
