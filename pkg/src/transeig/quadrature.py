"""Fixed quadrature rules on the reference triangle and reference square.

The reference triangle is {x, y >= 0, x + y <= 1}; the reference square
is [0, 1]^2.  Triangle rules are built by collapsing a tensor Gauss grid
onto the triangle and symmetrizing over the six vertex permutations, so
all weights stay positive.  The underlying 1-D Gauss-Legendre nodes are
hard-coded rather than computed at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Gauss-Legendre nodes/weights on [-1, 1], exact for degree 2n-1.
_GAUSS_1D = {
    1: ([0.0], [2.0]),
    2: ([-0.5773502691896257, 0.5773502691896257], [1.0, 1.0]),
    3: ([-0.7745966692414834, 0.0, 0.7745966692414834],
        [0.5555555555555557, 0.8888888888888888, 0.5555555555555557]),
    4: ([-0.8611363115940526, -0.33998104358485626, 0.33998104358485626,
         0.8611363115940526],
        [0.3478548451374537, 0.6521451548625462, 0.6521451548625462,
         0.3478548451374537]),
    5: ([-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831,
         0.906179845938664],
        [0.23692688505618942, 0.4786286704993662, 0.568888888888889,
         0.4786286704993662, 0.23692688505618942]),
    6: ([-0.932469514203152, -0.6612093864662645, -0.23861918608319693,
         0.23861918608319693, 0.6612093864662645, 0.932469514203152],
        [0.17132449237916975, 0.36076157304813894, 0.46791393457269137,
         0.46791393457269137, 0.36076157304813894, 0.17132449237916975]),
    7: ([-0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
         0.4058451513773972, 0.7415311855993945, 0.9491079123427585],
        [0.12948496616887065, 0.2797053914892766, 0.3818300505051183,
         0.41795918367346896, 0.3818300505051183, 0.2797053914892766,
         0.12948496616887065]),
    8: ([-0.9602898564975362, -0.7966664774136267, -0.525532409916329,
         -0.18343464249564978, 0.18343464249564978, 0.525532409916329,
         0.7966664774136267, 0.9602898564975362],
        [0.10122853629037669, 0.22238103445337434, 0.31370664587788705,
         0.36268378337836177, 0.36268378337836177, 0.31370664587788705,
         0.22238103445337434, 0.10122853629037669]),
    9: ([-0.9681602395076261, -0.8360311073266358, -0.6133714327005904,
         -0.3242534234038089, 0.0, 0.3242534234038089, 0.6133714327005904,
         0.8360311073266358, 0.9681602395076261],
        [0.08127438836157472, 0.18064816069485712, 0.26061069640293566,
         0.3123470770400028, 0.33023935500125967, 0.3123470770400028,
         0.26061069640293566, 0.18064816069485712, 0.08127438836157472]),
    10: ([-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
          -0.4333953941292472, -0.14887433898163122, 0.14887433898163122,
          0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
          0.9739065285171717],
         [0.06667134430868807, 0.14945134915058036, 0.219086362515982,
          0.2692667193099965, 0.295524224714753, 0.295524224714753,
          0.2692667193099965, 0.219086362515982, 0.14945134915058036,
          0.06667134430868807]),
}


def _gauss_unit(n: int):
    """Nodes/weights on [0, 1] (weights sum to 1)."""
    x, w = _GAUSS_1D[n]
    return (np.asarray(x) + 1.0) / 2.0, np.asarray(w) / 2.0


@dataclass(frozen=True)
class QuadRule:
    """points (npts, 2) on the reference element, positive weights, and the
    highest total polynomial degree integrated exactly."""

    kind: str  # "triangle" | "rectangle"
    points: np.ndarray
    weights: np.ndarray
    exactness_degree: int


def triangle_rule(degree: int) -> QuadRule:
    """Symmetric positive rule on the reference triangle, exact to `degree`."""
    if not 1 <= degree <= 10:
        raise ValueError("triangle rule degree must be in [1, 10]")
    if degree == 1:
        pts = np.array([[1.0 / 3.0, 1.0 / 3.0]])
        return QuadRule("triangle", pts, np.array([0.5]), 1)
    # Collapsed tensor grid: (u, v(1-u)) with weight (1-u); the extra power
    # of (1-u) costs one degree along u.
    n = (degree + 3) // 2
    u, wu = _gauss_unit(n)
    base_pts = []
    base_w = []
    for ui, wi in zip(u, wu):
        for vj, wj in zip(u, wu):
            base_pts.append((ui, vj * (1.0 - ui)))
            base_w.append(wi * wj * (1.0 - ui))
    pts = []
    wts = []
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    for (x, y), w in zip(base_pts, base_w):
        lam = (1.0 - x - y, x, y)
        for p in perms:
            pts.append((lam[p[1]], lam[p[2]]))
            wts.append(w / 6.0)
    return QuadRule("triangle", np.array(pts), np.array(wts), degree)


def rectangle_rule(points_per_axis: int) -> QuadRule:
    """Tensor Gauss rule on [0,1]^2, exact to degree 2n-1 per axis."""
    if not 1 <= points_per_axis <= 10:
        raise ValueError("points per axis must be in [1, 10]")
    u, wu = _gauss_unit(points_per_axis)
    pts = np.array([(a, b) for a in u for b in u])
    wts = np.array([wa * wb for wa in wu for wb in wu])
    return QuadRule("rectangle", pts, wts, 2 * points_per_axis - 1)


def map_rule(rule: QuadRule, cell_vertices: np.ndarray):
    """Map a reference rule onto a physical cell.

    Triangles map affinely from (0,0),(1,0),(0,1); rectangles by axis
    scaling from [0,1]^2.  |det J| is absorbed into the weights.
    Returns (points, weights) as physical arrays.
    """
    v = np.asarray(cell_vertices, dtype=float)
    if rule.kind == "triangle":
        if len(v) != 3:
            raise ValueError("triangle rule needs a 3-vertex cell")
        jac = np.column_stack([v[1] - v[0], v[2] - v[0]])
        pts = v[0] + rule.points @ jac.T
        wts = rule.weights * abs(np.linalg.det(jac))
        return pts, wts
    if rule.kind == "rectangle":
        if len(v) != 4:
            raise ValueError("rectangle rule needs a 4-vertex cell")
        hx = v[1, 0] - v[0, 0]
        hy = v[3, 1] - v[0, 1]
        pts = v[0] + rule.points * np.array([hx, hy])
        wts = rule.weights * abs(hx * hy)
        return pts, wts
    raise ValueError(f"unknown rule kind {rule.kind!r}")
