import json
import math

import numpy as np
import pytest
from shapely.geometry import Polygon as ShapelyPolygon

from helpers import point_in_polygon, random_simple_polygon
from polytrace.errors import (
    CollinearAdjacentEdges,
    DegenerateLoop,
    DomainError,
    SelfIntersection,
    TriangulationFailure,
)
from polytrace.geometry import (
    CornerKind,
    angle_function_f,
    build_polygon,
    convex_clip_areas,
    covariogram,
    covariogram_batch,
    edge_F,
    equilateral_triangle,
    interior_angle,
    l_shape,
    polygon_from_json,
    rectangle,
    regular_ngon,
    rotate,
    scale,
    translate,
    triangulate,
    unit_square,
)

SQUARE_LOOP = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


class TestConstruction:
    def test_unit_square(self):
        p = build_polygon([SQUARE_LOOP])
        assert p.area == pytest.approx(1.0, abs=1e-15)
        assert p.perimeter == pytest.approx(4.0, abs=1e-15)

    def test_clockwise_input_normalized(self):
        p = build_polygon([SQUARE_LOOP[::-1]])
        assert p.area == pytest.approx(1.0, abs=1e-15)
        assert p.loop_signs == [1]
        # stored CCW: signed area of the stored loop is positive
        x, y = p.loops[0][:, 0], p.loops[0][:, 1]
        assert np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0

    def test_collinear_adjacent_edges_rejected(self):
        with pytest.raises(CollinearAdjacentEdges):
            build_polygon([[(0, 0), (1, 0), (2, 0), (2, 1)]])

    def test_degenerate_loops_rejected(self):
        with pytest.raises(DegenerateLoop):
            build_polygon([[(0, 0), (1, 0)]])
        with pytest.raises(DegenerateLoop):
            build_polygon([[(0, 0), (1, 0), (1, 0), (0, 1)]])

    def test_self_intersection_rejected(self):
        with pytest.raises(SelfIntersection):
            build_polygon([[(0, 0), (1, 1), (1, 0), (0, 1)]])  # bowtie

    def test_crossing_loops_rejected(self):
        with pytest.raises(SelfIntersection):
            build_polygon([SQUARE_LOOP, [(0.5, -0.5), (1.5, -0.5), (1.5, 0.5), (0.5, 0.5)]])

    def test_hole_orientation_and_area(self):
        ring = build_polygon(
            [[(0, 0), (3, 0), (3, 3), (0, 3)], [(1, 1), (2, 1), (2, 2), (1, 2)]]
        )
        assert ring.loop_signs == [1, -1]
        assert ring.area == pytest.approx(8.0, abs=1e-14)

    def test_json_round_trip(self):
        p = l_shape()
        q = polygon_from_json(p.to_json())
        assert q.area == pytest.approx(p.area, abs=1e-15)
        with pytest.raises(DegenerateLoop):
            polygon_from_json(json.dumps({"nope": []}))


class TestAnglesAndEdges:
    def test_square_angles(self):
        p = unit_square()
        for i in range(4):
            assert interior_angle(p, i) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_equilateral_angles(self):
        p = equilateral_triangle()
        for i in range(3):
            assert interior_angle(p, i) == pytest.approx(math.pi / 3, abs=1e-12)

    def test_lshape_reflex_vertex(self):
        p = l_shape()
        angles = sorted(c.angle for c in p.corners)
        assert angles[-1] == pytest.approx(3 * math.pi / 2, abs=1e-12)
        assert all(a == pytest.approx(math.pi / 2, abs=1e-12) for a in angles[:-1])
        reflex = [c for c in p.corners if c.kind is CornerKind.CONCAVE]
        assert len(reflex) == 1
        assert np.allclose(reflex[0].position, (1.0, 1.0))

    def test_angle_sum_per_loop(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            p = random_simple_polygon(rng, int(rng.integers(5, 11)))
            exterior = sum(math.pi - c.angle for c in p.corners)
            assert exterior == pytest.approx(2 * math.pi, abs=1e-10)

    def test_edge_frames_oriented(self):
        p = l_shape()
        for e in p.edges:
            assert np.hypot(*e.tangent) == pytest.approx(1.0, abs=1e-14)
            assert np.hypot(*e.normal) == pytest.approx(1.0, abs=1e-14)
            det = e.tangent[0] * e.normal[1] - e.tangent[1] * e.normal[0]
            assert det == pytest.approx(1.0, abs=1e-14)
            assert abs(np.dot(e.tangent, e.normal)) < 1e-14

    def test_edge_F_square_zero(self):
        p = unit_square()
        for i in range(4):
            assert edge_F(p, i) == pytest.approx(0.0, abs=1e-14)

    def test_edge_F_parallelograms_zero(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            shear = np.array([[1.0, rng.uniform(-1.0, 1.0)], [rng.uniform(-1.0, 1.0), 1.0]])
            if abs(np.linalg.det(shear)) < 0.2:
                continue
            pts = np.array(SQUARE_LOOP) @ shear.T
            p = build_polygon([pts])
            for i in range(4):
                assert edge_F(p, i) == pytest.approx(0.0, abs=1e-12)

    def test_edge_F_equilateral(self):
        # F(E) = -2 cot(pi/3), evaluated here with library-independent trig
        expected = -2.0 * math.cos(math.pi / 3) / math.sin(math.pi / 3)
        p = equilateral_triangle()
        for i in range(3):
            assert edge_F(p, i) == pytest.approx(expected, abs=1e-13)
        assert expected == pytest.approx(-1.1547005, abs=1e-7)


class TestAngleFunction:
    def test_right_angle(self):
        assert angle_function_f(math.pi / 2) == pytest.approx(1.0, abs=1e-15)

    def test_at_pi_removable_zero(self):
        assert angle_function_f(math.pi) == 0.0
        assert angle_function_f(math.pi + 1e-3) == pytest.approx(3.333356e-7, rel=1e-5)

    def test_pi_over_three(self):
        expected = 1.0 + 2.0 * math.pi / (3.0 * math.sqrt(3.0))
        assert angle_function_f(math.pi / 3) == pytest.approx(expected, abs=1e-13)
        assert expected == pytest.approx(2.2091996, abs=1e-7)

    def test_positive_away_from_pi(self):
        for g in np.concatenate(
            [np.linspace(1e-3, math.pi - 1e-4, 400), np.linspace(math.pi + 1e-4, 2 * math.pi - 1e-3, 400)]
        ):
            assert angle_function_f(float(g)) > 0.0

    def test_series_matches_closed_form_at_seam(self):
        # raw cot evaluation keeps ~1.3e-12 absolute accuracy at the window
        # edge; the series is exact to ~1e-24 there
        for eps in np.concatenate([np.linspace(1e-4, 1e-3, 31), -np.linspace(1e-4, 1e-3, 31)]):
            g = math.pi + float(eps)
            raw = 1.0 + (math.pi - g) * math.cos(g) / math.sin(g)
            series = eps * eps / 3.0 + eps**4 / 45.0
            assert abs(raw - series) < 2e-12

    def test_domain_errors(self):
        for g in (0.0, -1.0, 2 * math.pi, 7.0):
            with pytest.raises(DomainError):
                angle_function_f(g)


class TestBuildersAndScaling:
    def test_ngon_square(self):
        p = regular_ngon(4, math.sqrt(2.0) / 2.0)
        assert all(c.angle == pytest.approx(math.pi / 2, abs=1e-12) for c in p.corners)
        assert p.perimeter == pytest.approx(4.0, abs=1e-12)

    def test_ngon_triangle_and_hexagon(self):
        t = regular_ngon(3, 1.0)
        assert all(c.angle == pytest.approx(math.pi / 3, abs=1e-12) for c in t.corners)
        h = regular_ngon(6, 1.0)
        assert h.perimeter == pytest.approx(6.0, abs=1e-12)

    def test_ngon_rejects_small_n(self):
        with pytest.raises(DomainError):
            regular_ngon(2, 1.0)

    def test_scale_properties(self):
        p = l_shape()
        q = scale(p, 3.0)
        assert q.area == pytest.approx(9.0 * p.area, rel=1e-12)
        assert q.perimeter == pytest.approx(3.0 * p.perimeter, rel=1e-12)
        for cp, cq in zip(p.corners, q.corners):
            assert cq.angle == pytest.approx(cp.angle, abs=1e-12)

    def test_scale_identity_and_errors(self):
        p = equilateral_triangle()
        q = scale(p, 1.0)
        assert np.allclose(q.vertices, p.vertices)
        with pytest.raises(DomainError):
            scale(p, 0.0)
        with pytest.raises(DomainError):
            scale(p, -2.0)


class TestTriangulation:
    def test_square_two_triangles(self):
        tris = triangulate(unit_square())
        assert len(tris) == 2
        assert sum(t.area for t in tris) == pytest.approx(1.0, rel=1e-12)

    def test_triangle_identity(self):
        tris = triangulate(equilateral_triangle())
        assert len(tris) == 1

    def test_lshape(self):
        tris = triangulate(l_shape())
        assert len(tris) == 4
        assert sum(t.area for t in tris) == pytest.approx(3.0, rel=1e-12)

    def test_partition_random_polygons(self):
        rng = np.random.default_rng(3)
        for _ in range(12):
            p = random_simple_polygon(rng, int(rng.integers(5, 11)))
            tris = triangulate(p)
            assert sum(t.area for t in tris) == pytest.approx(p.area, rel=1e-12)
            for t in tris:
                assert t.area > 0.0

    def test_partition_covers_points_once(self):
        rng = np.random.default_rng(5)
        p = random_simple_polygon(rng, 9)
        tris = triangulate(p)

        def cross2(u, v):
            return u[0] * v[1] - u[1] * v[0]

        def tri_contains(t, q, eps):
            a, b, c = t.points
            d1 = cross2(b - a, q - a)
            d2 = cross2(c - b, q - b)
            d3 = cross2(a - c, q - c)
            if min(d1, d2, d3) > eps:
                return 1  # strictly inside
            if min(d1, d2, d3) > -eps:
                return -1  # too close to an edge to count reliably
            return 0

        lo, hi = p.bounding_box()
        for q in rng.uniform(lo, hi, size=(300, 2)):
            counts = [tri_contains(t, q, 1e-9) for t in tris]
            if any(c == -1 for c in counts):
                continue
            assert sum(counts) == (1 if point_in_polygon(p, q) else 0)

    def test_multi_loop_partition_unsupported(self):
        ring = build_polygon(
            [[(0, 0), (3, 0), (3, 3), (0, 3)], [(1, 1), (2, 1), (2, 2), (1, 2)]]
        )
        with pytest.raises(TriangulationFailure):
            triangulate(ring)


def shapely_covariogram(p, z):
    shp = ShapelyPolygon(
        p.loops[0], [lp for s, lp in zip(p.loop_signs[1:], p.loops[1:]) if s == -1]
    )
    dx, dy = z
    moved = ShapelyPolygon(
        np.asarray(p.loops[0]) + z,
        [np.asarray(lp) + z for s, lp in zip(p.loop_signs[1:], p.loops[1:]) if s == -1],
    )
    return shp.intersection(moved).area


class TestCovariogram:
    def test_square_values(self):
        p = unit_square()
        assert covariogram(p, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-14)
        assert covariogram(p, (0.5, 0.0)) == pytest.approx(0.5, abs=1e-14)
        assert covariogram(p, (0.5, 0.5)) == pytest.approx(0.25, abs=1e-14)

    def test_square_product_formula(self):
        p = unit_square()
        rng = np.random.default_rng(0)
        Z = rng.uniform(-1.3, 1.3, size=(200, 2))
        got = covariogram_batch(p, Z)
        want = np.clip(1 - np.abs(Z[:, 0]), 0, None) * np.clip(1 - np.abs(Z[:, 1]), 0, None)
        assert np.max(np.abs(got - want)) < 1e-13

    def test_symmetry_support_bounds(self):
        rng = np.random.default_rng(42)
        for _ in range(6):
            p = random_simple_polygon(rng, int(rng.integers(5, 11)))
            diam = p.diameter()
            Z = rng.uniform(-1.1 * diam, 1.1 * diam, size=(40, 2))
            g_pos = covariogram_batch(p, Z)
            g_neg = covariogram_batch(p, -Z)
            assert np.max(np.abs(g_pos - g_neg)) <= 1e-10 * p.area
            assert np.all(g_pos >= 0.0)
            assert np.all(g_pos <= p.area + 1e-12)
            far = diam * 1.0001 * np.stack([np.cos(Z[:, 0]), np.sin(Z[:, 0])], axis=1)
            assert np.max(covariogram_batch(p, far)) == 0.0
            assert covariogram(p, (0.0, 0.0)) == pytest.approx(p.area, rel=1e-12)

    def test_against_shapely(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            p = random_simple_polygon(rng, int(rng.integers(5, 10)))
            for _ in range(20):
                z = rng.uniform(-1.5, 1.5, size=2)
                assert covariogram(p, z) == pytest.approx(
                    shapely_covariogram(p, z), abs=1e-10
                )

    def test_hole_polygon_against_shapely(self):
        ring = build_polygon(
            [[(0, 0), (3, 0), (3, 3), (0, 3)], [(1, 1), (2, 1), (2, 2), (1, 2)]]
        )
        rng = np.random.default_rng(13)
        for _ in range(25):
            z = rng.uniform(-2.5, 2.5, size=2)
            assert covariogram(ring, z) == pytest.approx(
                shapely_covariogram(ring, z), abs=1e-10
            )

    def test_rigid_motion_invariance(self):
        p = l_shape()
        q = rotate(translate(p, (0.7, -0.3)), 0.6)
        rng = np.random.default_rng(1)
        rot = np.array([[math.cos(0.6), -math.sin(0.6)], [math.sin(0.6), math.cos(0.6)]])
        for _ in range(20):
            z = rng.uniform(-1.5, 1.5, size=2)
            assert covariogram(q, rot @ z) == pytest.approx(covariogram(p, z), abs=1e-12)


class TestConvexClip:
    def test_against_shapely_triangle_pairs(self):
        rng = np.random.default_rng(21)
        for _ in range(40):
            t1 = rng.uniform(-1, 1, size=(3, 2))
            t2 = rng.uniform(-1, 1, size=(3, 2))
            def cross2(u, v):
                return u[0] * v[1] - u[1] * v[0]

            if abs(cross2(t1[1] - t1[0], t1[2] - t1[0])) < 0.1:
                continue
            if abs(cross2(t2[1] - t2[0], t2[2] - t2[0])) < 0.1:
                continue
            z = rng.uniform(-0.5, 0.5, size=(5, 2))
            got = convex_clip_areas(t1, t2, z)
            for zi, gi in zip(z, got):
                want = ShapelyPolygon(t1 + zi).intersection(ShapelyPolygon(t2)).area
                assert gi == pytest.approx(want, abs=1e-12)
