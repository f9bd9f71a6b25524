import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from oracles import dense_shift_invert_eigs
from transeig.assembly import assemble, build_block_problem, write_matrix
from transeig.elements import ADINI, MZ, build_dof_map
from transeig.eigensolver import SolverConfig, shift_invert_arnoldi
from transeig.mesh import _finish, build_square_rect_mesh, build_structured_tri_mesh
from transeig.quadrature import map_rule, triangle_rule
from transeig.refraction import make_model


@pytest.fixture(scope="module")
def n16():
    return make_model("constant", 16.0, mu=1 / 15)


@pytest.fixture(scope="module")
def adini_system(rect_mesh_2_mod, n16, adini_mod):
    mesh = rect_mesh_2_mod
    dofmap = build_dof_map(mesh, ADINI)
    return assemble(mesh, dofmap, adini_mod, n16)


@pytest.fixture(scope="module")
def rect_mesh_2_mod():
    return build_square_rect_mesh(2)


@pytest.fixture(scope="module")
def adini_mod():
    from transeig import adini_basis
    return adini_basis()


@pytest.fixture(scope="module")
def mz_mod():
    from transeig import mz_basis
    return mz_basis()


def test_adini_2x2_structure(adini_system):
    system = adini_system
    assert system.n_dofs == 3
    A = system.stiffness.toarray()
    assert A.shape == (3, 3)
    assert np.all(np.diag(A) > 0)
    assert np.abs(A - A.T).max() <= 1e-12 * np.abs(A).max()


def test_weighted_mass_factors_for_constant_n(adini_system):
    C = adini_system.weighted_mass.toarray()
    G = adini_system.mass.toarray()
    assert np.abs(C + 16 / 15 * G).max() <= 1e-13 * np.abs(G).max()


def test_coupling_symmetric_for_constant_n(adini_system):
    B = adini_system.coupling.toarray()
    assert np.abs(B - B.T).max() <= 1e-12 * np.abs(B).max()


def _spd_pivots(matrix):
    """LDL-style pivots via SuperLU with diagonal pivoting forced."""
    lu = spla.splu(sp.csc_matrix(matrix), permc_spec="MMD_AT_PLUS_A",
                   diag_pivot_thresh=0.0)
    return lu.U.diagonal().real


@pytest.mark.parametrize("element,mesh_fn", [
    (ADINI, lambda: build_square_rect_mesh(4)),
    (MZ, lambda: build_structured_tri_mesh("square", 4)),
    (MZ, lambda: build_structured_tri_mesh("lshape", 2)),
])
def test_stiffness_and_mass_positive_definite(element, mesh_fn, n16,
                                              adini_mod, mz_mod):
    mesh = mesh_fn()
    basis = adini_mod if element == ADINI else mz_mod
    system = assemble(mesh, build_dof_map(mesh, element), basis, n16)
    for mat in (system.stiffness, system.mass):
        assert np.all(_spd_pivots(mat) > 0)
        d = (mat - mat.T).tocoo()
        scale = np.abs(mat.data).max()
        assert (np.abs(d.data).max() if d.nnz else 0.0) <= 1e-12 * scale


def test_mass_quadratic_form_matches_direct_quadrature(mz_mod, n16):
    """x^T G x for an interpolated smooth function equals the directly
    integrated squared interpolant."""
    mesh = build_structured_tri_mesh("square", 3)
    dofmap = build_dof_map(mesh, MZ)
    system = assemble(mesh, dofmap, mz_mod, n16)

    f = lambda pts: pts[:, 0] ** 2 * (1 - pts[:, 0]) * pts[:, 1]
    gf = lambda pts: np.column_stack([
        (2 * pts[:, 0] - 3 * pts[:, 0] ** 2) * pts[:, 1],
        pts[:, 0] ** 2 * (1 - pts[:, 0])])
    coeffs = np.zeros(dofmap.n_dofs)
    locs = []
    for ci, cell in enumerate(mesh.cells):
        cb = mz_mod.cell_basis(mesh.vertices[cell], dofmap.edge_orientations[ci])
        local = cb.apply_dofs(f, gf)
        locs.append((cb, local))
        for k, g in enumerate(dofmap.cell_dofs[ci]):
            if g >= 0:
                coeffs[g] = local[k]
    quad_form = float(coeffs @ (system.mass @ coeffs))
    rule = triangle_rule(10)
    direct = 0.0
    for ci, cell in enumerate(mesh.cells):
        cb, local = locs[ci]
        masked = np.where(dofmap.cell_dofs[ci] >= 0, local, 0.0)
        pts, w = map_rule(rule, mesh.vertices[cell])
        direct += float(np.sum(w * cb.evaluate(masked, pts) ** 2))
    assert quad_form == pytest.approx(direct, rel=1e-12)


def test_cell_permutation_leaves_matrices_bit_identical(mz_mod, n16):
    mesh = build_structured_tri_mesh("square", 3)
    rng = np.random.default_rng(0)
    perm = rng.permutation(mesh.n_cells)
    permuted = _finish(mesh.vertices, mesh.cells[perm], "triangle")
    sys_a = assemble(mesh, build_dof_map(mesh, MZ), mz_mod, n16)
    sys_b = assemble(permuted, build_dof_map(permuted, MZ), mz_mod, n16)
    for name in ("stiffness", "coupling", "weighted_mass", "mass"):
        a = getattr(sys_a, name)
        b = getattr(sys_b, name)
        assert np.array_equal(a.indptr, b.indptr)
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.data, b.data)  # exact


def test_block_problem_layout(adini_system):
    problem = build_block_problem(adini_system)
    n = adini_system.n_dofs
    assert problem.left.shape == (2 * n, 2 * n)
    L = problem.left.toarray()
    R = problem.right.toarray()
    assert np.all(L[:n, n:] == 0)
    assert np.all(L[n:, :n] == 0)
    assert np.all(R[n:, n:] == 0)
    assert np.allclose(L[n:, n:], adini_system.mass.toarray())
    assert np.allclose(R[n:, :n], adini_system.mass.toarray())


def test_identity_mass_spectrum_matches_on_2x2(rect_mesh_2_mod, adini_mod, n16):
    mesh = rect_mesh_2_mod
    dofmap = build_dof_map(mesh, ADINI)
    sys_g = assemble(mesh, dofmap, adini_mod, n16)
    sys_i = assemble(mesh, dofmap, adini_mod, n16, use_identity_mass=True)
    lam_g = dense_shift_invert_eigs(build_block_problem(sys_g).left,
                                    build_block_problem(sys_g).right, 3.0, 4)
    lam_i = dense_shift_invert_eigs(build_block_problem(sys_i).left,
                                    build_block_problem(sys_i).right, 3.0, 4)
    for a, b in zip(lam_g, lam_i):
        assert abs(a - b) <= 1e-10 * (1 + abs(a))


def test_second_block_row_encodes_auxiliary_field(rect_mesh_2_mod, adini_mod, n16):
    mesh = rect_mesh_2_mod
    dofmap = build_dof_map(mesh, ADINI)
    system = assemble(mesh, dofmap, adini_mod, n16, use_identity_mass=True)
    problem = build_block_problem(system)
    pairs = shift_invert_arnoldi(problem, SolverConfig(sigma=3.0, nev=2))
    for p in pairs:
        u, aux = p.blocks(system.n_dofs)
        assert np.linalg.norm(aux - p.value * u) <= 1e-8 * np.linalg.norm(u)


def test_matrix_export_round_trips(adini_system, tmp_path):
    path = tmp_path / "stiffness.txt"
    with open(path, "w") as fh:
        write_matrix(adini_system.stiffness, fh)
    rows, cols, vals = [], [], []
    for line in path.read_text().strip().split("\n"):
        i, j, v = line.split()
        rows.append(int(i))
        cols.append(int(j))
        vals.append(float(v))
    rebuilt = sp.csr_matrix((vals, (rows, cols)), shape=(3, 3))
    assert np.array_equal(rebuilt.toarray(), adini_system.stiffness.toarray())


def test_element_dofmap_mismatch(rect_mesh_2_mod, mz_mod, n16):
    dofmap = build_dof_map(rect_mesh_2_mod, ADINI)
    with pytest.raises(ValueError):
        assemble(rect_mesh_2_mod, dofmap, mz_mod, n16)
