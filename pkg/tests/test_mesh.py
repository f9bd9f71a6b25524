import io
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transeig.mesh import (Mesh, MeshError, build_disk_tri_mesh,
                           build_square_rect_mesh, build_structured_tri_mesh,
                           cell_area, validate_mesh, write_mesh, _finish)


def test_single_rectangle():
    mesh = build_square_rect_mesh(1)
    assert mesh.n_cells == 1
    assert mesh.n_vertices == 4
    assert int(mesh.boundary_edge.sum()) == 4


def test_rect_mesh_32_matches_reference_size():
    mesh = build_square_rect_mesh(32)
    assert mesh.n_vertices == 1089
    assert mesh.h_max == pytest.approx(np.sqrt(2) / 32, rel=1e-14)


def test_rect_mesh_2_hand_enumeration():
    # 3x3 vertex grid: 12 edges total, 8 on the boundary, 4 interior
    mesh = build_square_rect_mesh(2)
    diag = validate_mesh(mesh)
    assert diag.n_vertices == 9
    assert diag.n_cells == 4
    assert diag.n_edges == 12
    assert diag.n_boundary_edges == 8
    assert diag.area == pytest.approx(1.0, abs=1e-15)


def test_rect_mesh_rejects_zero():
    with pytest.raises(ValueError):
        build_square_rect_mesh(0)


def test_square_tri_minimal():
    mesh = build_structured_tri_mesh("square", 1)
    assert mesh.n_cells == 2
    assert validate_mesh(mesh).area == pytest.approx(1.0, abs=1e-15)


def test_lshape_hand_enumeration():
    mesh = build_structured_tri_mesh("lshape", 1)
    assert mesh.n_cells == 6
    assert validate_mesh(mesh).area == pytest.approx(3.0, abs=1e-14)
    # the lower-right quadrant is excluded
    centers = mesh.vertices[mesh.cells].mean(axis=1)
    assert not np.any((centers[:, 0] > 0) & (centers[:, 1] < 0))


def test_square_tri_32_mesh_size():
    mesh = build_structured_tri_mesh("square", 32)
    assert mesh.h_max == pytest.approx(np.sqrt(2) / 32, rel=1e-14)


def test_triangle_domain_area():
    mesh = build_structured_tri_mesh("triangle", 4)
    # equilateral triangle with side sqrt(3): area = sqrt(3)/4 * 3
    assert validate_mesh(mesh).area == pytest.approx(3 * np.sqrt(3) / 4, rel=1e-13)


def test_unknown_domain_rejected():
    with pytest.raises(ValueError):
        build_structured_tri_mesh("hexagon", 2)


def test_disk_fan_level0():
    mesh = build_disk_tri_mesh(0)
    assert mesh.n_cells == 6
    radii = np.linalg.norm(mesh.vertices[1:], axis=1)
    assert np.allclose(radii, 0.5, atol=1e-15)


def test_disk_boundary_projection():
    mesh = build_disk_tri_mesh(3)
    boundary = mesh.vertices[mesh.boundary_vertex]
    assert np.max(np.abs(np.linalg.norm(boundary, axis=1) - 0.5)) < 1e-14


def test_disk_area_increases_to_quarter_pi():
    # inscribed polygon area: (1/2) N R^2 sin(2 pi / N)
    areas = [validate_mesh(build_disk_tri_mesh(level)).area for level in range(4)]
    for level, area in enumerate(areas):
        npoly = 6 * 2 ** level
        expected = 0.5 * npoly * 0.25 * np.sin(2 * np.pi / npoly)
        assert area == pytest.approx(expected, rel=1e-12)
    assert all(a < b for a, b in zip(areas, areas[1:]))
    assert areas[-1] < np.pi / 4


def test_disk_h_halves_roughly():
    # the first refinement loses some ratio to the boundary projection
    h = [build_disk_tri_mesh(level).h_max for level in range(5)]
    for coarse, fine in zip(h, h[1:]):
        assert 1.5 < coarse / fine < 2.2
    for coarse, fine in zip(h[1:], h[2:]):
        assert 1.8 < coarse / fine < 2.2


@pytest.mark.parametrize("make", [
    lambda: build_square_rect_mesh(3),
    lambda: build_structured_tri_mesh("square", 3),
    lambda: build_structured_tri_mesh("lshape", 2),
    lambda: build_structured_tri_mesh("triangle", 3),
    lambda: build_disk_tri_mesh(2),
])
def test_euler_relation_and_boundary_counts(make):
    mesh = make()
    assert mesh.n_vertices - mesh.n_edges + mesh.n_cells == 1
    assert int(mesh.boundary_edge.sum()) == int(mesh.boundary_vertex.sum())


@pytest.mark.parametrize("domain", ["square", "lshape", "triangle"])
def test_refinement_quadruples_cells_and_halves_h(domain):
    coarse = build_structured_tri_mesh(domain, 2)
    fine = build_structured_tri_mesh(domain, 4)
    assert fine.n_cells == 4 * coarse.n_cells
    assert fine.h_max == pytest.approx(coarse.h_max / 2, rel=1e-12)


def test_rect_refinement_quadruples_cells():
    assert build_square_rect_mesh(6).n_cells == 4 * build_square_rect_mesh(3).n_cells


@settings(max_examples=15, deadline=None)
@given(m=st.integers(min_value=1, max_value=6),
       domain=st.sampled_from(["square", "lshape", "triangle"]))
def test_generated_tri_meshes_validate(domain, m):
    mesh = build_structured_tri_mesh(domain, m)
    diag = validate_mesh(mesh)
    assert diag.h_max > 0
    assert mesh.n_vertices - mesh.n_edges + mesh.n_cells == 1


def test_validate_flags_flipped_cell():
    mesh = build_square_rect_mesh(2)
    cells = mesh.cells.copy()
    cells[0] = cells[0][::-1]
    bad = replace(mesh, cells=cells)
    with pytest.raises(MeshError, match="negative area"):
        validate_mesh(bad)


def test_validate_flags_dangling_edge():
    mesh = build_square_rect_mesh(2)
    bad = replace(
        mesh,
        edges=np.vstack([mesh.edges, [0, mesh.n_vertices - 1]]),
        edge_cells=np.vstack([mesh.edge_cells, [0, -1]]),
        boundary_edge=np.append(mesh.boundary_edge, True),
    )
    with pytest.raises(MeshError, match="edge incidence"):
        validate_mesh(bad)


def test_validate_flags_overlapping_cells():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(MeshError):
        validate_mesh(_finish(vertices, [(0, 1, 2), (0, 1, 2), (0, 2, 3)],
                              "triangle"))


def test_write_mesh_format():
    mesh = build_square_rect_mesh(1)
    buf = io.StringIO()
    write_mesh(mesh, buf)
    lines = buf.getvalue().strip().split("\n")
    kind, nv, nc, ne = lines[0].split()
    assert kind == "rectangle"
    assert (int(nv), int(nc), int(ne)) == (4, 1, 4)
    assert len(lines) == 1 + 4 + 1 + 4
    # edge records carry two cell slots and a boundary flag
    v0, v1, c0, c1, flag = lines[-1].split()
    assert flag in ("0", "1")


def test_cell_area_positive_ccw():
    mesh = build_structured_tri_mesh("square", 2)
    for cell in mesh.cells:
        assert cell_area(mesh.vertices, cell) > 0
