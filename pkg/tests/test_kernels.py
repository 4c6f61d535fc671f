"""Backend equivalence and correctness for the geometry kernels."""

import numpy as np
import pytest

from scenariomine import geom
from scenariomine.geom import _kernels_py as pure

try:
    from scenariomine.geom import _kernels as compiled
except ImportError:
    compiled = None

SQUARE = np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]])


class TestPointInPolygon:
    def test_interior_exterior(self):
        pts = np.array([[2.0, 2.0], [5.0, 2.0], [-0.5, 1.0]])
        assert pure.points_in_polygon(pts, SQUARE).tolist() == [1, 0, 0]

    def test_concave_polygon(self):
        poly = np.array([[0, 0], [4, 0], [4, 4], [2, 1.5], [0, 4]], float)
        pts = np.array([[2.0, 3.0], [1.0, 1.0], [2.0, 0.5]])
        assert pure.points_in_polygon(pts, poly).tolist() == [0, 1, 1]


class TestPolygonDistance:
    def test_zero_inside_and_near_boundary(self):
        pts = np.array([[1.0, 1.0], [4.0 + 5e-10, 2.0]])
        d = pure.points_to_polygon_distance(pts, SQUARE)
        assert d.tolist() == [0.0, 0.0]

    def test_outside_distance(self):
        d = pure.points_to_polygon_distance(np.array([[7.0, 2.0], [5.0, 5.0]]), SQUARE)
        assert d[0] == pytest.approx(3.0)
        assert d[1] == pytest.approx(np.sqrt(2.0))


class TestPolylineDistance:
    def test_projection_and_endpoints(self):
        line = np.array([[0.0, 0.0], [10.0, 0.0]])
        d = pure.points_to_polyline_distance(np.array([[5.0, 3.0], [-2.0, 0.0]]), line)
        assert d[0] == pytest.approx(3.0)
        assert d[1] == pytest.approx(2.0)


class TestRectIntersection:
    def test_identical(self):
        r = np.array([[1.0, 2.0, 4.0, 2.0, 0.3]])
        assert pure.rect_intersection_area(r, r)[0] == pytest.approx(8.0)

    def test_offset_unit_squares(self):
        a = np.array([[0.0, 0.0, 1.0, 1.0, 0.0]])
        b = np.array([[0.5, 0.0, 1.0, 1.0, 0.0]])
        assert pure.rect_intersection_area(a, b)[0] == pytest.approx(0.5)

    def test_disjoint(self):
        a = np.array([[0.0, 0.0, 1.0, 1.0, 0.0]])
        b = np.array([[5.0, 0.0, 1.0, 1.0, 1.0]])
        assert pure.rect_intersection_area(a, b)[0] == 0.0

    def test_rotated_45_inside(self):
        # unit square vs same square rotated 45 deg: intersection is a
        # regular octagon of area 2*(sqrt(2)-1)
        a = np.array([[0.0, 0.0, 1.0, 1.0, 0.0]])
        b = np.array([[0.0, 0.0, 1.0, 1.0, np.pi / 4]])
        assert pure.rect_intersection_area(a, b)[0] == pytest.approx(2 * (np.sqrt(2) - 1))

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        a = np.column_stack(
            [rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50), rng.uniform(0.5, 4, 50), rng.uniform(0.5, 3, 50), rng.uniform(-3, 3, 50)]
        )
        b = np.column_stack(
            [rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50), rng.uniform(0.5, 4, 50), rng.uniform(0.5, 3, 50), rng.uniform(-3, 3, 50)]
        )
        np.testing.assert_allclose(
            pure.rect_intersection_area(a, b), pure.rect_intersection_area(b, a), atol=1e-9
        )


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
class TestBackendEquivalence:
    def test_all_kernels_bit_identical(self):
        rng = np.random.default_rng(11)
        poly = np.array([[0, 0], [6, -1], [8, 5], [3, 7], [-1, 4]], float)
        pts = rng.uniform(-4, 10, (800, 2))
        line = rng.uniform(-4, 10, (15, 2))
        assert (
            pure.points_in_polygon(pts, poly) == compiled.points_in_polygon(pts, poly)
        ).all()
        assert (
            pure.points_to_polygon_distance(pts, poly)
            == compiled.points_to_polygon_distance(pts, poly)
        ).all()
        assert (
            pure.points_to_polyline_distance(pts, line)
            == compiled.points_to_polyline_distance(pts, line)
        ).all()
        n = 400
        a = np.column_stack(
            [rng.uniform(-2, 2, n), rng.uniform(-2, 2, n), rng.uniform(0.5, 4, n), rng.uniform(0.5, 3, n), rng.uniform(-3, 3, n)]
        )
        b = np.column_stack(
            [rng.uniform(-2, 2, n), rng.uniform(-2, 2, n), rng.uniform(0.5, 4, n), rng.uniform(0.5, 3, n), rng.uniform(-3, 3, n)]
        )
        assert (pure.rect_intersection_area(a, b) == compiled.rect_intersection_area(a, b)).all()

    def test_default_backend_is_compiled(self):
        assert geom.backend_name() == "compiled"
