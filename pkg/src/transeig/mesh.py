"""Structured 2-D meshes for the four experiment domains.

Generates axis-aligned rectangle meshes on the unit square and
triangulations of the unit square, the L-shaped domain, an equilateral
triangle and a disk of radius 1/2.  Meshes are plain containers of
numpy arrays plus edge adjacency; they are never mutated after
construction and can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)


class MeshError(Exception):
    """A mesh invariant is violated."""


@dataclass(frozen=True)
class Mesh:
    """A conforming mesh of triangles or axis-aligned rectangles.

    vertices : (nv, 2) float array
    cells : (nc, 3) or (nc, 4) int array, counter-clockwise vertex indices
    edges : (ne, 2) int array, each row (vmin, vmax), lexicographically sorted
    edge_cells : (ne, 2) int array of incident cell indices, -1 when absent
    boundary_vertex : (nv,) bool
    boundary_edge : (ne,) bool
    cell_kind : "triangle" or "rectangle"
    h_max : longest cell diameter
    """

    vertices: np.ndarray
    cells: np.ndarray
    edges: np.ndarray
    edge_cells: np.ndarray
    boundary_vertex: np.ndarray
    boundary_edge: np.ndarray
    cell_kind: str
    h_max: float

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_index(self) -> dict:
        """Map (vmin, vmax) -> edge row, for DOF numbering."""
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}


def _cell_edges(cell) -> list:
    k = len(cell)
    return [(int(cell[i]), int(cell[(i + 1) % k])) for i in range(k)]


def _finish(vertices, cells, cell_kind) -> Mesh:
    """Extract edge adjacency and boundary flags; compute h_max."""
    vertices = np.asarray(vertices, dtype=float)
    cells = np.asarray(cells, dtype=np.intp)
    incident: dict = {}
    for ci, cell in enumerate(cells):
        for a, b in _cell_edges(cell):
            key = (min(a, b), max(a, b))
            incident.setdefault(key, []).append(ci)
    edge_keys = sorted(incident)
    edges = np.array(edge_keys, dtype=np.intp).reshape(-1, 2)
    edge_cells = np.full((len(edge_keys), 2), -1, dtype=np.intp)
    for i, key in enumerate(edge_keys):
        owners = incident[key]
        if len(owners) > 2:
            raise MeshError(f"edge incidence: edge {key} has {len(owners)} cells")
        edge_cells[i, : len(owners)] = owners
    boundary_edge = edge_cells[:, 1] < 0
    boundary_vertex = np.zeros(len(vertices), dtype=bool)
    for (a, b), is_b in zip(edges, boundary_edge):
        if is_b:
            boundary_vertex[a] = True
            boundary_vertex[b] = True
    h_max = 0.0
    for cell in cells:
        pts = vertices[cell]
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1).max()
        h_max = max(h_max, float(d))
    return Mesh(vertices, cells, edges, edge_cells, boundary_vertex,
                boundary_edge, cell_kind, h_max)


def build_square_rect_mesh(m: int) -> Mesh:
    """Uniform m x m axis-aligned rectangle mesh of the unit square."""
    if m < 1:
        raise ValueError("subdivision count must be >= 1")
    xs = np.linspace(0.0, 1.0, m + 1)
    vertices = np.array([[x, y] for y in xs for x in xs])
    vid = lambda i, j: j * (m + 1) + i
    cells = [
        (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))
        for j in range(m)
        for i in range(m)
    ]
    return _finish(vertices, cells, "rectangle")


def _triangulate_grid_squares(xs, ys, keep) -> Mesh:
    """Split kept grid squares along the lower-left/upper-right diagonal."""
    nx, ny = len(xs) - 1, len(ys) - 1
    vid = lambda i, j: j * (nx + 1) + i
    vertices = np.array([[x, y] for y in ys for x in xs])
    cells = []
    for j in range(ny):
        for i in range(nx):
            if not keep(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])):
                continue
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            cells.append((a, b, c))
            cells.append((a, c, d))
    cells = np.asarray(cells, dtype=np.intp)
    used = np.unique(cells)
    remap = -np.ones(len(vertices), dtype=np.intp)
    remap[used] = np.arange(len(used))
    return _finish(vertices[used], remap[cells], "triangle")


def _triangle_subdivision(m: int) -> Mesh:
    """m segments per side of the equilateral triangle, m**2 congruent cells."""
    v0 = np.array([-SQRT3 / 2.0, -0.5])
    v1 = np.array([SQRT3 / 2.0, -0.5])
    v2 = np.array([0.0, 1.0])
    index = {}
    vertices = []
    for r in range(m + 1):          # r steps toward v2
        for c in range(m - r + 1):  # c steps toward v1
            index[(r, c)] = len(vertices)
            vertices.append(v0 + c / m * (v1 - v0) + r / m * (v2 - v0))
    cells = []
    for r in range(m):
        for c in range(m - r):
            a, b = index[(r, c)], index[(r, c + 1)]
            d = index[(r + 1, c)]
            cells.append((a, b, d))
            if c + 1 <= m - r - 1:
                cells.append((b, index[(r + 1, c + 1)], d))
    return _finish(np.array(vertices), cells, "triangle")


def build_structured_tri_mesh(domain: str, m: int) -> Mesh:
    """Uniform triangulation of one of the flat experiment domains.

    domain : "square" (unit square), "lshape"
        ((-1,1)^2 minus the closed lower-right quadrant) or "triangle"
        (equilateral, vertices (-sqrt(3)/2,-1/2), (sqrt(3)/2,-1/2), (0,1)).
    m : subdivisions per unit side; square/lshape meshes have h_max = sqrt(2)/m.
    """
    if m < 1:
        raise ValueError("subdivision count must be >= 1")
    if domain == "square":
        xs = np.linspace(0.0, 1.0, m + 1)
        return _triangulate_grid_squares(xs, xs, lambda x, y: True)
    if domain == "lshape":
        xs = np.linspace(-1.0, 1.0, 2 * m + 1)
        return _triangulate_grid_squares(xs, xs, lambda x, y: not (x > 0 and y < 0))
    if domain == "triangle":
        return _triangle_subdivision(m)
    raise ValueError(f"unknown domain {domain!r}")


def build_disk_tri_mesh(level: int) -> Mesh:
    """Fan triangulation of the disk of radius 1/2, uniformly refined.

    Each refinement quadrisects every triangle and projects the new
    boundary vertices onto the circle, so the mesh always tiles the
    inscribed polygon with 6 * 2**level boundary vertices.
    """
    if level < 0:
        raise ValueError("refinement level must be >= 0")
    radius = 0.5
    angles = np.linspace(0.0, 2.0 * np.pi, 7)[:-1]
    vertices = [np.zeros(2)] + [radius * np.array([np.cos(t), np.sin(t)]) for t in angles]
    on_circle = [False] + [True] * 6
    cells = [(0, 1 + i, 1 + (i + 1) % 6) for i in range(6)]
    for _ in range(level):
        midpoint: dict = {}
        new_cells = []

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in midpoint:
                p = 0.5 * (vertices[a] + vertices[b])
                boundary = on_circle[a] and on_circle[b]
                if boundary:
                    p = p * (radius / np.linalg.norm(p))
                midpoint[key] = len(vertices)
                vertices.append(p)
                on_circle.append(boundary)
            return midpoint[key]

        for a, b, c in cells:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_cells += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        cells = new_cells
    return _finish(np.array(vertices), cells, "triangle")


def cell_area(vertices: np.ndarray, cell) -> float:
    """Signed area of a triangle or rectangle cell (positive when CCW)."""
    pts = vertices[np.asarray(cell)]
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True)
class MeshDiagnostics:
    n_vertices: int
    n_cells: int
    n_edges: int
    n_boundary_edges: int
    h_max: float
    area: float


def validate_mesh(mesh: Mesh) -> MeshDiagnostics:
    """Check the mesh invariants; raise MeshError naming the first violation.

    Checks positive cell areas, axis alignment of rectangles, the 1-or-2
    cell incidence of every edge, and that the cell areas tile the polygon
    bounded by the boundary edges.
    """
    total = 0.0
    for ci, cell in enumerate(mesh.cells):
        area = cell_area(mesh.vertices, cell)
        if area <= 0.0:
            raise MeshError(f"negative area: cell {ci} has signed area {area:.3e}")
        if mesh.cell_kind == "rectangle":
            p = mesh.vertices[cell]
            ok = (abs(p[0, 1] - p[1, 1]) < 1e-14 and abs(p[2, 1] - p[3, 1]) < 1e-14
                  and abs(p[1, 0] - p[2, 0]) < 1e-14 and abs(p[3, 0] - p[0, 0]) < 1e-14)
            if not ok:
                raise MeshError(f"axis alignment: cell {ci} is not an axis-aligned rectangle")
        total += area
    counts = np.zeros(mesh.n_edges, dtype=int)
    index = mesh.edge_index()
    for cell in mesh.cells:
        for a, b in _cell_edges(cell):
            key = (min(a, b), max(a, b))
            if key not in index:
                raise MeshError(f"edge incidence: cell edge {key} missing from edges")
            counts[index[key]] += 1
    for i in range(mesh.n_edges):
        expected = 1 if mesh.boundary_edge[i] else 2
        if counts[i] != expected:
            raise MeshError(f"edge incidence: edge {i} has {counts[i]} cells, expected {expected}")
    poly_area = _boundary_polygon_area(mesh)
    if abs(total - poly_area) > 1e-12 * max(poly_area, 1.0):
        raise MeshError(f"area mismatch: cells {total!r} vs boundary polygon {poly_area!r}")
    return MeshDiagnostics(mesh.n_vertices, mesh.n_cells, mesh.n_edges,
                           int(mesh.boundary_edge.sum()), mesh.h_max, total)


def _boundary_polygon_area(mesh: Mesh) -> float:
    """Shoelace area of the closed loop formed by the boundary edges."""
    succ: dict = {}
    for (a, b), is_b, owners in zip(mesh.edges, mesh.boundary_edge, mesh.edge_cells):
        if not is_b:
            continue
        cell = mesh.cells[owners[0]]
        ordered = None
        for p, q in _cell_edges(cell):
            if {p, q} == {int(a), int(b)}:
                ordered = (p, q)  # CCW within the owning cell = CCW along boundary
                break
        succ[ordered[0]] = ordered[1]
    if not succ:
        raise MeshError("edge incidence: mesh has no boundary")
    start = next(iter(succ))
    loop = [start]
    while True:
        nxt = succ.get(loop[-1])
        if nxt is None:
            raise MeshError("edge incidence: boundary loop is not closed")
        if nxt == start:
            break
        loop.append(nxt)
        if len(loop) > len(succ):
            raise MeshError("edge incidence: boundary loop does not close")
    pts = mesh.vertices[loop]
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def write_mesh(mesh: Mesh, fh) -> None:
    """Plain-text dump: header `kind nv nc ne`, then vertex/cell/edge records."""
    fh.write(f"{mesh.cell_kind} {mesh.n_vertices} {mesh.n_cells} {mesh.n_edges}\n")
    for x, y in mesh.vertices:
        fh.write(f"{float(x)!r} {float(y)!r}\n")
    for cell in mesh.cells:
        fh.write(" ".join(str(int(v)) for v in cell) + "\n")
    for (a, b), (c0, c1), flag in zip(mesh.edges, mesh.edge_cells, mesh.boundary_edge):
        fh.write(f"{a} {b} {c0} {c1} {int(flag)}\n")
