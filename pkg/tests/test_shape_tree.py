import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from shapetree.boundary import curvature_from_points
from shapetree.ellipse_lab import HalfEllipse, ellipse_curvature
from shapetree.errors import ArgumentError
from shapetree.shape_tree import (
    EPS_LOG_FLOOR,
    CompactShapeTree,
    CostCounter,
    SampledShape,
    Weights,
    best_match_root,
    build_tree,
    cost_terms,
    forest_line,
    full_cost,
    match_shapes,
    retrieve_correspondences,
    tentative_cost,
)
from shapetree.synth import octagon_pair, regular_polygon

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def raw_shape(points, kappa=None):
    points = np.asarray(points, dtype=float)
    kappa = curvature_from_points(points) if kappa is None else np.asarray(kappa, dtype=float)
    return SampledShape(points=points, curvatures=kappa)


def random_tree(rng, n):
    return build_tree(rng.normal(size=(n, 2)), int(rng.integers(n)), rng.normal(size=n))


def tentative_oracle(tp, tq, w):
    total = 0.0
    for k in range(tp.n - 1):
        total += w.w1 * ((tp.vectors[k][0] - tq.vectors[k][0]) ** 2 + (tp.vectors[k][1] - tq.vectors[k][1]) ** 2)
    for k in range(tp.n):
        total += w.w2 * (tp.curvatures[k] - tq.curvatures[k]) ** 2
    return total


def full_oracle(tp, tq, w):
    moment = sum((k + 1) * (tp.curvatures[k] - tq.curvatures[k]) ** 2 for k in range(tp.n))
    return tentative_oracle(tp, tq, w) + math.log(w.w3 * max(moment, 1e-30))


# weights


def test_weights_parse_and_validate():
    assert Weights.parse("1,2.5,0.1") == Weights(1.0, 2.5, 0.1)
    with pytest.raises(ArgumentError):
        Weights(-1, 1, 1)
    for bad in ("1,2", "a,b,c", "1,2,3,4"):
        with pytest.raises(ArgumentError):
            Weights.parse(bad)


# build_tree


def test_square_tree():
    t = build_tree(SQUARE, 0)
    np.testing.assert_array_equal(t.vectors, [[1, 0], [1, 1], [0, 1]])
    np.testing.assert_array_equal(t.root, [0, 0])


def test_curvature_convention_root_last():
    kappa = np.array([10.0, 11.0, 12.0, 13.0])
    t = build_tree(SQUARE, 2, kappa)
    np.testing.assert_array_equal(t.curvatures, [13.0, 10.0, 11.0, 12.0])


def test_tree_tips_reproduce_samples(rng):
    pts = rng.normal(size=(9, 2))
    for r in range(9):
        t = build_tree(pts, r)
        tips = t.root + t.vectors
        np.testing.assert_allclose(tips, np.roll(pts, -r, axis=0)[1:], atol=1e-15)
        assert t.vectors.shape == (8, 2) and t.curvatures.shape == (9,)


@given(dx=st.floats(-1e3, 1e3), dy=st.floats(-1e3, 1e3))
def test_tree_translation_invariant(dx, dy):
    pts = regular_polygon(7) * [1.0, 0.6]
    np.testing.assert_allclose(build_tree(pts + [dx, dy], 3).vectors, build_tree(pts, 3).vectors, atol=1e-9)


@pytest.mark.parametrize("pts, root", [(SQUARE[:2], 0), (SQUARE, 4), (SQUARE, -1)])
def test_build_tree_errors(pts, root):
    with pytest.raises(ArgumentError):
        build_tree(pts, root)


# costs


def test_self_cost_zero(rng):
    t = random_tree(rng, 8)
    assert tentative_cost(t, t) == 0.0


def test_single_vector_difference():
    tp = build_tree(SQUARE, 0)
    tq = CompactShapeTree(tp.root, tp.vectors + [[0, 0], [3, 4], [0, 0]], tp.curvatures, 0)
    assert tentative_cost(tp, tq, Weights(1, 0, 1)) == 25.0


def test_tentative_matches_oracle(rng):
    for _ in range(20):
        tp, tq = random_tree(rng, 8), random_tree(rng, 8)
        w = Weights(*rng.uniform(0, 3, 3))
        assert tentative_cost(tp, tq, w) == pytest.approx(tentative_oracle(tp, tq, w), rel=1e-12)


def test_full_cost_matches_oracle(rng):
    for _ in range(20):
        tp, tq = random_tree(rng, 8), random_tree(rng, 8)
        w = Weights(*rng.uniform(0.1, 3, 3))
        assert abs(full_cost(tp, tq, w) - full_oracle(tp, tq, w)) <= 1e-12 * max(1.0, abs(full_oracle(tp, tq, w)))


def test_full_cost_floor_on_identical_trees(rng):
    t = random_tree(rng, 6)
    assert full_cost(t, t, Weights(2, 3, 0.5)) == math.log(0.5 * EPS_LOG_FLOOR)


def test_full_cost_requires_positive_w3(rng):
    t = random_tree(rng, 6)
    with pytest.raises(ArgumentError):
        full_cost(t, t, Weights(1, 1, 0))


def test_size_mismatch(rng):
    with pytest.raises(ArgumentError):
        tentative_cost(random_tree(rng, 5), random_tree(rng, 6))


def test_half_ellipse_terms_two_equal_three_differ():
    n = 200
    theta = -np.pi / 2 + (np.arange(n) + 0.5) * np.pi / n
    trees = []
    for a, b in ((3, 7), (7, 3)):
        e = HalfEllipse(a, b)
        pts = np.column_stack([a * np.cos(theta), b * np.sin(theta)])
        trees.append(build_tree(pts, 0, ellipse_curvature(e, theta)))
    line = build_tree(np.column_stack([np.zeros(n), theta]), 0, np.zeros(n))
    w = Weights()
    t37, t73 = cost_terms(trees[0], line, w), cost_terms(trees[1], line, w)
    assert t37[1] == pytest.approx(t73[1], rel=1e-12)
    assert abs(t37[2] - t73[2]) > 1e-3


def no_underflow(lo, hi):
    # squares of values below ~1e-154 underflow to 0 and hide a real difference
    return st.floats(lo, hi).filter(lambda x: x == 0 or abs(x) > 1e-100)


@given(
    vecs=arrays(np.float64, (10, 2), elements=no_underflow(-10, 10)),
    kap=arrays(np.float64, (10,), elements=no_underflow(-5, 5)),
    shift=st.integers(0, 9),
)
def test_cost_nonnegative_and_shift_invariant(vecs, kap, shift):
    other = vecs[::-1] + 0.5
    tp, tq = build_tree(vecs, 0, kap), build_tree(other, 0, kap[::-1])
    c = tentative_cost(tp, tq)
    assert c >= 0
    assert (c == 0) == (np.array_equal(tp.vectors, tq.vectors) and np.array_equal(tp.curvatures, tq.curvatures))
    # relabelling both shapes by the same cyclic shift leaves the rooted trees unchanged
    sp = build_tree(np.roll(vecs, shift, axis=0), shift, np.roll(kap, shift))
    sq = build_tree(np.roll(other, shift, axis=0), shift, np.roll(kap[::-1], shift))
    assert tentative_cost(sp, sq) == pytest.approx(c, rel=1e-12, abs=1e-12)


# root search


def test_identical_octagons_root_8():
    p, _ = octagon_pair()
    shape = raw_shape(p)
    q_hat, report = best_match_root(build_tree(shape, 7), shape)
    assert q_hat == 7
    assert report.cost == 0.0


def test_octagon_pair_root_8():
    p, q = octagon_pair()
    q_hat, _ = best_match_root(build_tree(raw_shape(p), 7), raw_shape(q))
    assert q_hat == 7


@pytest.mark.parametrize("m", [1, 3, 5])
def test_index_rotated_copy(m, rng):
    pts = rng.normal(size=(9, 2))
    shape = raw_shape(pts, rng.normal(size=9))
    copy = SampledShape(np.roll(shape.points, m, axis=0), np.roll(shape.curvatures, m))
    q_hat, report = best_match_root(build_tree(shape, 2), copy)
    assert q_hat == (2 + m) % 9
    assert report.cost == 0.0


def test_perturbed_decagon_matches_exhaustive_oracle(rng):
    for _ in range(10):
        p = regular_polygon(10) + rng.normal(scale=0.05, size=(10, 2))
        q = regular_polygon(10, phase=0.2) + rng.normal(scale=0.05, size=(10, 2))
        kp, kq = rng.normal(size=10), rng.normal(size=10)
        root = int(rng.integers(10))
        tp = build_tree(p, root, kp)
        costs = []
        for j in range(10):
            vq = np.array([q[(j + k) % 10] - q[j] for k in range(1, 10)])
            cq = np.array([kq[(j + k) % 10] for k in range(1, 10)] + [kq[j]])
            costs.append(np.sum((tp.vectors - vq) ** 2) + np.sum((tp.curvatures - cq) ** 2))
        q_hat, report = best_match_root(tp, raw_shape(q, kq))
        assert q_hat == int(np.argmin(costs))
        assert report.cost == pytest.approx(min(costs), rel=1e-12)


def test_ties_go_to_smallest_index():
    shape = raw_shape(regular_polygon(8), np.ones(8))

    def flatten(t):
        # every candidate collapses to the same tree, so all costs tie exactly
        return CompactShapeTree(np.zeros(2), np.ones((t.n - 1, 2)), np.ones(t.n), t.root_index)

    q_hat, report = best_match_root(build_tree(shape, 5), shape, normalize=flatten)
    assert q_hat == 0 and report.cost == 0.0


# correspondences


def test_correspondence_from_roots_8_and_4():
    p, q = octagon_pair()
    tp8, tq8 = build_tree(raw_shape(p), 7), build_tree(raw_shape(q), 7)
    c8 = retrieve_correspondences(tp8, tq8)
    assert c8.pairs[0] == (7, 7)
    assert c8.as_set() == {(k, k) for k in range(8)}
    c4 = retrieve_correspondences(build_tree(raw_shape(p), 3), build_tree(raw_shape(q), 3))
    assert c4.as_set() == c8.as_set()


def test_self_match_shifted_root(rng):
    shape = raw_shape(rng.normal(size=(7, 2)), rng.normal(size=7))
    corr = retrieve_correspondences(build_tree(shape, 2), build_tree(shape, 5))
    assert corr.as_set() == {(k, (k + 3) % 7) for k in range(7)}
    assert corr.to_csv().splitlines()[0] == "p_index,q_index"


def test_match_shapes_self():
    p, _ = octagon_pair()
    report = match_shapes(raw_shape(p), raw_shape(p))
    assert report.cost == 0.0
    assert report.pairs == [(k, k) for k in range(8)]
    doc = report.to_dict()
    assert set(doc) >= {"root_p", "root_q", "cost", "cost_terms", "pairs"}
    assert doc["cost_terms"][:2] == [0.0, 0.0]
    assert doc["cost_terms"][2] == pytest.approx(math.log(EPS_LOG_FLOOR))


def test_cost_counter_is_quadratic():
    counts = []
    for n in (50, 100):
        shape = raw_shape(regular_polygon(n) * [1.0, 0.7])
        counter = CostCounter()
        match_shapes(shape, shape, counter=counter)
        counts.append(counter.terms)
        assert counter.calls == n
        assert counter.terms == n * (2 * n - 1)
    assert counts[1] / counts[0] == pytest.approx(4.0, rel=0.05)


# forest lines


def test_forest_line_root_to_tip():
    t = build_tree(SQUARE, 0)
    assert forest_line(t, 0, 2) == pytest.approx((math.sqrt(2), math.pi / 4))


def test_forest_line_between_tips():
    t = build_tree(SQUARE, 0)
    length, angle = forest_line(t, 1, 3)
    assert length == pytest.approx(math.sqrt(2))
    assert angle == pytest.approx(3 * math.pi / 4)


def test_forest_line_angle_range():
    t = build_tree(SQUARE, 0)
    # from (1,0) back to the root points along -x
    assert forest_line(t, 1, 0) == (1.0, math.pi)


def test_forest_line_same_index():
    with pytest.raises(ArgumentError):
        forest_line(build_tree(SQUARE, 0), 1, 1)


def test_forest_line_random_12_gon(rng):
    pts = regular_polygon(12) + rng.normal(scale=0.1, size=(12, 2))
    t = build_tree(pts, 5)
    for i in range(12):
        for j in range(i + 1, 12):
            d = pts[j] - pts[i]
            length, angle = forest_line(t, i, j)
            assert abs(length - math.hypot(*d)) <= 1e-12
            assert abs(angle - math.atan2(d[1], d[0])) <= 1e-12


@given(
    pts=arrays(np.float64, (6, 2), elements=st.floats(-100, 100), unique=True),
    root=st.integers(0, 5),
)
@settings(max_examples=40)
def test_forest_line_property(pts, root):
    t = build_tree(pts, root)
    for i in range(6):
        for j in range(6):
            if i == j:
                continue
            d = pts[j] - pts[i]
            length, angle = forest_line(t, i, j)
            assert math.isclose(length, math.hypot(*d), rel_tol=1e-12, abs_tol=1e-12)
            assert -math.pi < angle <= math.pi
            if length > 0:
                # vectors pass through the root, so round-off grows with coordinate size over length
                tol = 1e-12 + 1e-14 * (np.abs(pts).max() + 1) / length
                direct = math.atan2(d[1], d[0])
                assert abs(math.remainder(angle - direct, 2 * math.pi)) <= tol
