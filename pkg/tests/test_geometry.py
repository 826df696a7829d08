import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon as ShapelyPolygon

from surfscale.geometry.polygon import (box_polygon, clip_area_convex,
                                        clip_area_fast, clip_convex,
                                        clip_halfplane,
                                        convex_polygon_planes,
                                        equal_area_circumradius,
                                        points_in_convex, polygon_area,
                                        polygon_centroid, polygon_perimeter,
                                        regular_polygon)
from surfscale.geometry.regions import (BallRegion, ConvexPolygonRegion,
                                        GraphSubRegion, HalfPlaneRegion,
                                        RegularPolygonRegion, SimplexRegion3)
from surfscale.geometry.surfaces import (FunctionGraph, PolygonalChain,
                                         Sphere)


def _random_convex(rng, k=8):
    # convex hull of points on a circle, jittered radius; CCW by sorted angle
    phase = rng.random() * 2 * np.pi
    ang = np.sort(rng.random(k)) * 2 * np.pi + phase
    rad = 0.2 + 0.25 * rng.random(k)
    c = 0.5 + 0.2 * (rng.random(2) - 0.5)
    pts = np.column_stack([c[0] + rad * np.cos(ang),
                           c[1] + rad * np.sin(ang)])
    hull = ShapelyPolygon(pts).convex_hull
    v = np.asarray(hull.exterior.coords)[:-1]
    if polygon_area(v) < 0:
        v = v[::-1]
    return v


def test_polygon_area_against_shapely():
    rng = np.random.default_rng(1)
    for _ in range(50):
        poly = _random_convex(rng)
        assert abs(polygon_area(poly)) \
            == pytest.approx(ShapelyPolygon(poly).area, rel=1e-12)


def test_halfplane_clip_area_against_shapely():
    rng = np.random.default_rng(2)
    big = box_polygon(-10.0, 10.0)
    for _ in range(80):
        poly = _random_convex(rng)
        a, b = rng.normal(size=2)
        norm = float(np.hypot(a, b))
        if norm < 1e-6:
            continue
        a, b = a / norm, b / norm
        c = float(rng.normal() * 0.3 + a * 0.5 + b * 0.5)
        clipped, _ = clip_halfplane(poly, None, a, b, c, 0)
        half, _ = clip_halfplane(big, None, a, b, c, 0)
        if len(half) < 3:
            want = 0.0
        else:
            want = ShapelyPolygon(poly).intersection(
                ShapelyPolygon(half)).area
        got = abs(polygon_area(clipped)) if len(clipped) >= 3 else 0.0
        assert got == pytest.approx(want, abs=1e-9)


def test_clip_convex_matches_iterated_halfplanes():
    rng = np.random.default_rng(3)
    for _ in range(40):
        subject = _random_convex(rng)
        clipper = _random_convex(rng)
        planes = convex_polygon_planes(clipper)
        step = subject
        labels = None
        for i, (a, b, c) in enumerate(planes):
            step, labels = clip_halfplane(step, labels, a, b, c, i)
            if len(step) == 0:
                break
        want = abs(polygon_area(step)) if len(step) >= 3 else 0.0
        assert clip_area_convex(subject, planes) \
            == pytest.approx(want, abs=1e-12)
        assert clip_area_fast(subject, planes) \
            == pytest.approx(want, abs=1e-9)
        out, _ = clip_convex(subject, planes)
        got = abs(polygon_area(out)) if len(out) >= 3 else 0.0
        assert got == pytest.approx(want, abs=1e-12)


@given(st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=40, deadline=None)
def test_clipping_never_grows_area(seed):
    rng = np.random.default_rng(seed)
    poly = _random_convex(rng)
    base = polygon_area(poly)
    a, b = np.cos(rng.random() * 7), np.sin(rng.random() * 7)
    c = float(rng.normal())
    clipped, _ = clip_halfplane(poly, None, a, b, c, 0)
    area = abs(polygon_area(clipped)) if len(clipped) >= 3 else 0.0
    assert -1e-12 <= area <= base + 1e-12


def test_clip_to_containing_halfplane_is_identity():
    poly = box_polygon(0.2, 0.8)
    clipped, labels = clip_halfplane(poly, None, 0.0, 1.0, 5.0, 7)
    assert polygon_area(clipped) == pytest.approx(polygon_area(poly))
    assert 7 not in labels


def test_clip_labels_mark_new_edges():
    poly = box_polygon(0.0, 1.0)
    clipped, labels = clip_halfplane(poly, None, 0.0, 1.0, 0.5, 42)
    assert abs(polygon_area(clipped)) == pytest.approx(0.5)
    assert 42 in labels


def test_centroid_and_perimeter():
    sq = box_polygon(0.0, 2.0)
    assert polygon_perimeter(sq) == pytest.approx(8.0)
    assert polygon_centroid(sq) == pytest.approx([1.0, 1.0])


def test_points_in_convex_matches_shapely():
    rng = np.random.default_rng(4)
    poly = _random_convex(rng)
    planes = convex_polygon_planes(poly)
    pts = rng.random((500, 2))
    sh = ShapelyPolygon(poly)
    inside = points_in_convex(pts, planes)
    for p, flag in zip(pts, inside):
        # skip points within 1e-9 of the boundary, where conventions differ
        if sh.boundary.distance(ShapelyPoint(p)) < 1e-9:
            continue
        assert bool(flag) == sh.contains(ShapelyPoint(p))


def test_regular_polygon_equal_area_radius():
    r, k = 0.3, 64
    rr = equal_area_circumradius(r, k)
    verts = regular_polygon((0.5, 0.5), rr, k)
    assert abs(polygon_area(verts)) == pytest.approx(np.pi * r * r,
                                                     rel=1e-12)


def test_ball_region_is_3d():
    ball = BallRegion((0.5, 0.5, 0.5), 0.25)
    assert ball.d == 3
    assert ball.volume() == pytest.approx(4.0 / 3.0 * np.pi * 0.25 ** 3)
    pts = np.array([[0.5, 0.5, 0.5], [0.74, 0.5, 0.5], [0.76, 0.5, 0.5]])
    assert list(ball.contains(pts)) == [True, True, False]


def test_regular_polygon_region_matches_disk():
    reg = RegularPolygonRegion((0.5, 0.5), 0.25)
    assert reg.volume() == pytest.approx(np.pi / 16, rel=1e-6)
    cell = box_polygon(0.0, 1.0)
    assert reg.clip_cell_area(cell) == pytest.approx(reg.volume(), rel=1e-9)
    small = box_polygon(0.45, 0.55)
    assert reg.clip_cell_area(small) == pytest.approx(0.01, rel=1e-9)


def test_convex_polygon_region_triangle():
    tri = ConvexPolygonRegion(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert tri.volume() == pytest.approx(0.5)
    pts = np.array([[0.2, 0.2], [0.9, 0.9]])
    assert list(tri.contains(pts)) == [True, False]
    lwr, upr = tri.boundary_distance_bounds(np.array([[0.25, 0.25]]))
    true = abs(0.25 + 0.25 - 1.0) / np.sqrt(2.0)
    assert lwr[0] <= true + 1e-12


def test_graph_subregion_volume_matches_quadrature():
    F = lambda x: 0.5 + 0.2 * np.sin(2 * np.pi * x)
    dF = lambda x: 0.4 * np.pi * np.cos(2 * np.pi * x)
    reg = GraphSubRegion.from_function(F, dF, chord_tol=1e-6)
    assert reg.volume() == pytest.approx(0.5, abs=1e-5)
    assert bool(reg.contains(np.array([[0.25, 0.69]]))[0])
    assert not bool(reg.contains(np.array([[0.25, 0.71]]))[0])


def test_simplex3_volume_and_membership():
    reg = SimplexRegion3(1.0)
    assert reg.volume() == pytest.approx(1.0 / 6.0)
    pts = np.array([[0.1, 0.1, 0.1], [0.5, 0.5, 0.5]])
    assert list(reg.contains(pts)) == [True, False]


def test_halfplane_region_window():
    reg = HalfPlaneRegion((0.0, 1.0), 0.5, window=(0.0, 1.0))
    assert reg.volume() == pytest.approx(0.5)
    assert bool(reg.contains(np.array([[0.3, 0.4]]))[0])
    assert not bool(reg.contains(np.array([[0.3, 0.6]]))[0])
    cell = box_polygon(0.0, 1.0)
    assert reg.clip_cell_area(cell) == pytest.approx(0.5, rel=1e-12)


def test_cell_area_in_torus_counts_all_copies():
    ball = RegularPolygonRegion((0.05, 0.05), 0.2)
    # a disk at the corner: periodic copies of the unit cell cover all of it
    cell = box_polygon(0.0, 1.0)
    assert ball.cell_area_in(cell, torus=True) \
        == pytest.approx(np.pi * 0.04, rel=1e-6)


def test_function_graph_measure_and_normals():
    F = lambda x: 0.5 + 0.1 * x
    dF = lambda x: 0.1 * np.ones_like(np.asarray(x, dtype=float))
    g = FunctionGraph(F, dF)
    assert g.measure() == pytest.approx(np.sqrt(1.01), rel=1e-9)
    n = g.normal_at(np.array([0.5, 0.55]))
    assert n[1] > 0                     # points up, away from the subgraph
    assert np.linalg.norm(n) == pytest.approx(1.0)
    assert g.closed is False


def test_sphere_measure_closest_point():
    s = Sphere((0.5, 0.5), 0.25)
    assert s.measure() == pytest.approx(2 * np.pi * 0.25, rel=1e-9)
    cp = s.closest_point(np.array([0.9, 0.5]))
    assert cp.y == pytest.approx([0.75, 0.5])
    assert cp.t == pytest.approx(0.15)
    assert s.closed is True


def test_polygonal_chain_measure_and_closest():
    chain = PolygonalChain(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert chain.measure() == pytest.approx(np.sqrt(2.0))
    assert chain.closed is False
    cp = chain.closest_point(np.array([0.0, 0.0]))
    assert cp.y == pytest.approx([0.5, 0.5])
    n = chain.normal_at(np.asarray(cp.y))
    assert abs(n @ np.array([np.sqrt(0.5), np.sqrt(0.5)])) \
        == pytest.approx(1.0)
