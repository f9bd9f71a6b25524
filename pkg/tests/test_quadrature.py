from math import factorial

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from transeig.mesh import build_disk_tri_mesh, build_structured_tri_mesh, cell_area
from transeig.quadrature import map_rule, rectangle_rule, triangle_rule


def tri_monomial_exact(a, b):
    # int_T x^a y^b over the unit reference triangle
    return factorial(a) * factorial(b) / factorial(a + b + 2)


def apply_rule(rule, f):
    return float(np.sum(rule.weights * f(rule.points[:, 0], rule.points[:, 1])))


def test_centroid_rule():
    rule = triangle_rule(1)
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(rule.points, [[1 / 3, 1 / 3]])


def test_degree8_integrates_x4y4():
    rule = triangle_rule(8)
    exact = tri_monomial_exact(4, 4)  # = 1/6300
    assert exact == pytest.approx(1 / 6300)
    assert apply_rule(rule, lambda x, y: x ** 4 * y ** 4) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("degree", range(1, 11))
def test_triangle_monomial_exactness(degree):
    rule = triangle_rule(degree)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(0.5, rel=1e-14)
    assert rule.exactness_degree >= degree
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            got = apply_rule(rule, lambda x, y: x ** a * y ** b)
            assert got == pytest.approx(tri_monomial_exact(a, b), rel=1e-13), (a, b)


def test_triangle_rule_is_symmetric():
    # invariance of the point/weight set under swapping the two coordinates
    rule = triangle_rule(5)
    pts = {(round(x, 12), round(y, 12)) for x, y in rule.points}
    swapped = {(y, x) for x, y in pts}
    assert pts == swapped


def test_triangle_degree_range():
    for bad in (0, 11):
        with pytest.raises(ValueError):
            triangle_rule(bad)


def test_rectangle_midpoint():
    rule = rectangle_rule(1)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(rule.points, [[0.5, 0.5]])


def test_rectangle_x7_exact():
    rule = rectangle_rule(4)
    assert apply_rule(rule, lambda x, y: x ** 7) == pytest.approx(1 / 8, rel=1e-14)


@pytest.mark.parametrize("n", range(1, 11))
def test_rectangle_weights_and_exactness(n):
    rule = rectangle_rule(n)
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-14)
    for a in range(rule.exactness_degree + 1):
        got = apply_rule(rule, lambda x, y, a=a: x ** a * y ** min(a, rule.exactness_degree - a))
        b = min(a, rule.exactness_degree - a)
        assert got == pytest.approx(1 / ((a + 1) * (b + 1)), rel=1e-13)


def test_rectangle_points_range():
    for bad in (0, 11):
        with pytest.raises(ValueError):
            rectangle_rule(bad)


def test_map_rule_identity_on_reference():
    rule = triangle_rule(3)
    pts, wts = map_rule(rule, [[0, 0], [1, 0], [0, 1]])
    assert np.allclose(pts, rule.points)
    assert np.allclose(wts, rule.weights)


def test_map_rule_rectangle_area_scaling():
    rule = rectangle_rule(3)
    _, wts = map_rule(rule, [[0, 0], [2, 0], [2, 3], [0, 3]])
    assert wts.sum() == pytest.approx(6.0, rel=1e-14)


def test_map_rule_kind_mismatch():
    with pytest.raises(ValueError):
        map_rule(triangle_rule(2), [[0, 0], [1, 0], [1, 1], [0, 1]])


def test_mapped_triangle_matches_symbolic_integrals(rng):
    # translated + deformed triangle, checked against sympy integration
    x, y = sympy.symbols("x y")
    verts = np.array([[1.2, -0.7], [2.1, -0.5], [1.4, 0.6]])
    rule = triangle_rule(8)
    pts, wts = map_rule(rule, verts)
    for a, b in [(2, 1), (3, 2), (0, 4)]:
        # affine parametrization of the physical triangle for sympy
        s, t = sympy.symbols("s t")
        px = verts[0, 0] + s * (verts[1, 0] - verts[0, 0]) + t * (verts[2, 0] - verts[0, 0])
        py = verts[0, 1] + s * (verts[1, 1] - verts[0, 1]) + t * (verts[2, 1] - verts[0, 1])
        jac = abs((verts[1, 0] - verts[0, 0]) * (verts[2, 1] - verts[0, 1])
                  - (verts[2, 0] - verts[0, 0]) * (verts[1, 1] - verts[0, 1]))
        exact = sympy.integrate(sympy.integrate((px ** a) * (py ** b) * jac,
                                                (t, 0, 1 - s)), (s, 0, 1))
        got = float(np.sum(wts * pts[:, 0] ** a * pts[:, 1] ** b))
        assert got == pytest.approx(float(exact), rel=1e-12), (a, b)


@pytest.mark.parametrize("make", [
    lambda: build_structured_tri_mesh("lshape", 2),
    lambda: build_disk_tri_mesh(2),
])
def test_mapped_weights_sum_to_cell_area(make):
    mesh = make()
    rule = triangle_rule(4)
    for cell in mesh.cells:
        _, wts = map_rule(rule, mesh.vertices[cell])
        assert wts.sum() == pytest.approx(cell_area(mesh.vertices, cell), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(degree=st.integers(min_value=1, max_value=10), data=st.data())
def test_triangle_exactness_property(degree, data):
    a = data.draw(st.integers(min_value=0, max_value=degree))
    b = data.draw(st.integers(min_value=0, max_value=degree - a))
    rule = triangle_rule(degree)
    got = apply_rule(rule, lambda x, y: x ** a * y ** b)
    assert got == pytest.approx(tri_monomial_exact(a, b), rel=1e-12)
