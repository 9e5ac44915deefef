import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from shapetree.boundary import (
    centroid,
    curvature_from_points,
    curvature_profile,
    format_boundary,
    from_points,
    make_ellipse,
    parse_boundary,
    resample_uniform,
    signed_area,
    total_arc_length,
)
from shapetree.errors import ArgumentError, DegenerateShapeError, ParseError

from conftest import circle_points

SQUARE_CSV = "x,y\n0,0\n1,0\n1,1\n0,1\n"


def ellipse_perimeter(a, b):
    val, _ = integrate.quad(lambda t: math.hypot(a * math.sin(t), b * math.cos(t)), 0, 2 * math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


# parse_boundary


def test_parse_square_ccw():
    b = parse_boundary(SQUARE_CSV)
    assert len(b) == 4
    assert signed_area(b.points) == pytest.approx(1.0)
    np.testing.assert_array_equal(b.points[0], [0, 0])


def test_parse_clockwise_square_matches_ccw():
    cw = parse_boundary("x,y\n0,0\n0,1\n1,1\n1,0\n")
    ccw = parse_boundary(SQUARE_CSV)
    np.testing.assert_array_equal(cw.points, ccw.points)
    np.testing.assert_array_equal(cw.cum_arc, ccw.cum_arc)


def test_parse_ellipse_file_perimeter():
    t = 2 * np.pi * np.arange(1000) / 1000
    text = "x,y\n" + "".join(f"{3 * math.cos(s):.15g},{7 * math.sin(s):.15g}\n" for s in t)
    b = parse_boundary(text)
    assert abs(total_arc_length(b) / ellipse_perimeter(3, 7) - 1) < 1e-3


def test_parse_collapses_duplicates_and_closing_point():
    b = parse_boundary("x,y\n0,0\n0,0\n1,0\n1,1\n1,1\n0,1\n0,0\n")
    assert len(b) == 4


@pytest.mark.parametrize(
    "text, line",
    [
        ("x,y\n0,0\n1,zero\n1,1\n", 3),
        ("x,y\n0,0\n1,0,2\n1,1\n", 3),
        ("a,b\n0,0\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_boundary(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


@pytest.mark.parametrize("text", ["x,y\n0,0\n1,1\n", "x,y\n0,0\n1,1\n2,2\n", "x,y\n"])
def test_parse_degenerate(text):
    with pytest.raises(DegenerateShapeError):
        parse_boundary(text)


def test_format_roundtrip():
    b = make_ellipse(3, 7, 50)
    again = parse_boundary(format_boundary(b))
    np.testing.assert_allclose(again.points, b.points, rtol=1e-11, atol=1e-11)


# arc length


def test_unit_square_length():
    assert total_arc_length(parse_boundary(SQUARE_CSV)) == 4.0


@pytest.mark.parametrize("n, r", [(3, 1.0), (7, 2.5), (64, 10.0)])
def test_regular_polygon_length(n, r):
    b = from_points(circle_points(r, n))
    assert total_arc_length(b) == pytest.approx(n * 2 * r * math.sin(math.pi / n), rel=1e-12)


def test_cum_arc_strictly_increasing():
    b = make_ellipse(3, 7, 200)
    assert b.cum_arc[0] == 0
    assert np.all(np.diff(b.cum_arc) > 0)
    assert b.total_length == pytest.approx(b.cum_arc[-1] + np.linalg.norm(b.points[-1] - b.points[0]))


# centroid


def test_square_centroid():
    np.testing.assert_allclose(centroid(parse_boundary(SQUARE_CSV)), [0.5, 0.5], atol=1e-15)


def test_centroid_is_area_weighted_not_vertex_mean():
    pts = np.array([[0, 0], [0.5, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    c = centroid(from_points(pts))
    np.testing.assert_allclose(c, [0.5, 0.5], atol=1e-15)
    assert not np.allclose(c, pts.mean(axis=0))


def test_l_shape_centroid_matches_raster_oracle():
    pts = np.array([[0, 0], [3, 0], [3, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
    h = 1e-3
    xs = np.arange(h / 2, 3, h)
    ys = np.arange(h / 2, 2, h)
    xx, yy = np.meshgrid(xs, ys)
    inside = (yy < 1) | (xx < 1)
    oracle = np.array([xx[inside].mean(), yy[inside].mean()])
    np.testing.assert_allclose(centroid(from_points(pts)), oracle, atol=1e-3)


@given(
    dx=st.floats(-1e3, 1e3, allow_nan=False),
    dy=st.floats(-1e3, 1e3, allow_nan=False),
)
def test_centroid_translation_equivariant(dx, dy):
    b = make_ellipse(3, 7, 40)
    moved = from_points(b.points + [dx, dy])
    np.testing.assert_allclose(centroid(moved), centroid(b) + [dx, dy], atol=1e-9)


# resampling


def test_resample_circle_24_spacing_3():
    b = from_points(circle_points(1.0, 4000))
    b = from_points(b.points * (24 / b.total_length))
    s = resample_uniform(b, 8, 0.0)
    arcs = np.array([_arc_of(b, p) for p in s.points])
    np.testing.assert_allclose(np.diff(arcs), 3.0, atol=1e-9)


def test_resample_idempotent_on_uniform_input():
    b = from_points(circle_points(1.0, 50))
    again = resample_uniform(b, 50, 0.0)
    np.testing.assert_allclose(again.points, b.points, atol=1e-9)


def test_resample_square_corners():
    b = parse_boundary(SQUARE_CSV)
    np.testing.assert_allclose(resample_uniform(b, 4, 0.0).points, b.points, atol=1e-15)


def test_resample_first_point_is_seed():
    b = make_ellipse(3, 7, 300)
    s = resample_uniform(b, 17, 5.5)
    np.testing.assert_allclose(s.points[0], b.point_at(5.5))


@given(n=st.integers(3, 200), frac=st.floats(0, 0.999))
def test_resample_uniform_spacing(n, frac):
    b = make_ellipse(3, 7, 400)
    st_ = b.total_length
    s = resample_uniform(b, n, frac * st_)
    arcs = np.sort([_arc_of(b, p) for p in s.points])
    gaps = np.diff(np.append(arcs, arcs[0] + st_))
    assert gaps.max() - gaps.min() <= 1e-6 * st_


def _arc_of(b, p):
    seg = np.roll(b.points, -1, axis=0) - b.points
    rel = p - b.points
    lengths = np.linalg.norm(seg, axis=1)
    t = np.clip(np.einsum("ij,ij->i", rel, seg) / lengths**2, 0, 1)
    dist = np.linalg.norm(rel - t[:, None] * seg, axis=1)
    k = int(np.argmin(dist))
    return b.cum_arc[k] + t[k] * lengths[k]


@pytest.mark.parametrize("n, seed", [(2, 0.0), (5, -1.0), (5, 1e9)])
def test_resample_rejects_bad_arguments(n, seed):
    with pytest.raises(ArgumentError):
        resample_uniform(make_ellipse(3, 7, 40), n, seed)


# curvature


def test_circle_curvature():
    k = curvature_profile(from_points(circle_points(5.0, 500))).values
    assert np.all(np.abs(k - 0.2) <= 1e-3)


def test_ellipse_curvature_at_zero():
    b = make_ellipse(3, 7, 500)
    assert curvature_profile(b).values[0] == pytest.approx(3 / 49, abs=1e-3)


def test_straight_edge_curvature_vanishes():
    xs = np.linspace(0, 100, 201)
    top = np.column_stack([xs[::-1], np.full_like(xs, 1.0)])
    bottom = np.column_stack([xs, np.zeros_like(xs)])
    b = from_points(np.vstack([bottom, top]))
    k = curvature_profile(b).values
    interior = np.r_[5:196, 206:397]
    assert np.abs(k[interior]).max() < 1e-6


def test_curvature_second_order_convergence():
    errs = [np.abs(curvature_from_points(circle_points(1.0, n)) - 1.0).max() for n in (250, 500)]
    assert errs[0] / errs[1] >= 2.0


def test_curvature_sign_follows_orientation():
    pts = circle_points(2.0, 100)
    assert np.all(curvature_from_points(pts) > 0)
    assert np.all(curvature_from_points(pts[::-1]) < 0)


def test_curvature_needs_five_points():
    with pytest.raises(ArgumentError):
        curvature_from_points(circle_points(1, 4))


def test_curvature_rejects_repeated_points():
    pts = circle_points(1, 10)
    pts[3] = pts[2]
    with pytest.raises(DegenerateShapeError):
        curvature_from_points(pts)


@given(dx=st.floats(-100, 100), dy=st.floats(-100, 100))
def test_curvature_translation_invariant(dx, dy):
    pts = make_ellipse(3, 7, 100).points
    np.testing.assert_allclose(curvature_from_points(pts + [dx, dy]), curvature_from_points(pts), atol=1e-9)


# ellipses


def test_unit_circle_square():
    b = make_ellipse(1, 1, 4)
    np.testing.assert_allclose(b.points, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)


def test_half_ellipse_endpoints():
    b = make_ellipse(3, 7, 101, half=True)
    np.testing.assert_allclose(b.points[0], [0, -7], atol=1e-12)
    np.testing.assert_allclose(b.points[-1], [0, 7], atol=1e-12)


def test_ellipse_swap_perimeter():
    assert make_ellipse(7, 3, 2000).total_length == pytest.approx(make_ellipse(3, 7, 2000).total_length, rel=1e-6)


@given(
    pts=st.lists(
        st.tuples(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)),
        min_size=3,
        max_size=30,
    )
)
def test_ingested_boundaries_are_ccw(pts):
    try:
        b = from_points(pts)
    except DegenerateShapeError:
        return
    assert signed_area(b.points) > 0
    assert np.all(np.diff(b.cum_arc) > 0)
