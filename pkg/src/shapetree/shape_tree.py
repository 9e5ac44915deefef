"""Compact shape trees, matching costs and correspondence retrieval.

A compact shape tree rooted at sample ``p_i`` holds the ``n - 1`` vectors
from ``p_i`` to every other sample, in counter-clockwise order starting
after the root, plus the curvature at every sample.  Matching one tree of
the first shape against the trees rooted at each of the ``n`` samples of
the second shape costs ``O(n)`` per candidate, ``O(n^2)`` overall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import SampledBoundary, curvature_from_points
from .errors import ArgumentError
from .sampling import SamplePointSet

__all__ = [
    "EPS_LOG_FLOOR",
    "TENTATIVE",
    "FULL",
    "Weights",
    "SampledShape",
    "CompactShapeTree",
    "CorrespondenceMap",
    "MatchReport",
    "CostCounter",
    "shape_from_samples",
    "build_tree",
    "cost_terms",
    "tentative_cost",
    "full_cost",
    "log_moment_term",
    "best_match_root",
    "retrieve_correspondences",
    "match_shapes",
    "forest_line",
]

EPS_LOG_FLOOR = 1e-30
TENTATIVE = "tentative"
FULL = "full"


@dataclass(frozen=True)
class Weights:
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0

    def __post_init__(self):
        for name in ("w1", "w2", "w3"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ArgumentError(f"weight {name} must be a finite non-negative number, got {value}")

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ArgumentError(f"weights must be 'w1,w2,w3', got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError:
            raise ArgumentError(f"weights must be numeric, got {text!r}") from None


@dataclass(frozen=True, eq=False)
class SampledShape:
    """Sample points of one shape, in counter-clockwise order, with curvature at each."""

    points: np.ndarray
    curvatures: np.ndarray
    samples: SamplePointSet | None = None

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class CompactShapeTree:
    """Root point, the ``n - 1`` root-to-sample vectors and ``n`` curvatures.

    ``curvatures[k - 1]`` is the curvature at the tip of ``vectors[k - 1]``
    for ``k < n``; the last entry is the curvature at the root.
    """

    root: np.ndarray
    vectors: np.ndarray
    curvatures: np.ndarray
    root_index: int

    @property
    def n(self) -> int:
        return len(self.vectors) + 1


@dataclass
class CorrespondenceMap:
    pairs: list[tuple[int, int]]
    cost: float = float("nan")
    cost_terms: tuple[float, float, float] = (float("nan"),) * 3

    def as_set(self) -> frozenset:
        return frozenset(self.pairs)

    def to_csv(self) -> str:
        return "p_index,q_index\n" + "".join(f"{i},{j}\n" for i, j in self.pairs)


@dataclass
class MatchReport:
    root_p: int
    root_q: int
    cost: float
    cost_terms: tuple[float, float, float]
    correspondence: CorrespondenceMap
    cost_kind: str = TENTATIVE

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return self.correspondence.pairs

    def to_dict(self) -> dict:
        return {
            "root_p": self.root_p,
            "root_q": self.root_q,
            "cost": self.cost,
            "cost_terms": list(self.cost_terms),
            "pairs": [list(p) for p in self.pairs],
        }


@dataclass
class CostCounter:
    """Tallies the work done by the matcher: cost calls and scalar cost terms."""

    calls: int = 0
    terms: int = 0
    trees: int = 0
    history: list = field(default_factory=list)


def shape_from_samples(boundary: SampledBoundary, samples: SamplePointSet) -> SampledShape:
    """Locate the samples on ``boundary`` and attach curvature.

    Curvature is measured on the closed polygon through the samples
    themselves, so it transforms exactly with the samples under similarity
    transforms.
    """
    pts = samples.points(boundary)
    return SampledShape(points=pts, curvatures=curvature_from_points(pts), samples=samples)


def build_tree(shape, root_index: int, curvatures=None) -> CompactShapeTree:
    """Tree rooted at sample ``root_index`` of ``shape``.

    ``shape`` is a :class:`SampledShape` or an ``(n, 2)`` array of points; in
    the latter case ``curvatures`` defaults to zeros.
    """
    if isinstance(shape, SampledShape):
        pts = np.asarray(shape.points, dtype=float)
        kappa = np.asarray(shape.curvatures, dtype=float)
    else:
        pts = np.asarray(shape, dtype=float)
        kappa = np.zeros(len(pts)) if curvatures is None else np.asarray(curvatures, dtype=float)
    n = len(pts)
    if n < 3:
        raise ArgumentError(f"a compact shape tree needs n >= 3 samples, got {n}")
    if len(kappa) != n:
        raise ArgumentError(f"expected {n} curvature values, got {len(kappa)}")
    if not 0 <= root_index < n:
        raise ArgumentError(f"root index {root_index} outside [0, {n})")
    order = (root_index + np.arange(1, n)) % n
    root = pts[root_index]
    return CompactShapeTree(
        root=root.copy(),
        vectors=pts[order] - root,
        curvatures=np.append(kappa[order], kappa[root_index]),
        root_index=int(root_index),
    )


def _check_sizes(tp: CompactShapeTree, tq: CompactShapeTree):
    if tp.n != tq.n:
        raise ArgumentError(f"trees differ in size ({tp.n} vs {tq.n} samples)")


def log_moment_term(delta, kappa, w3: float) -> float:
    """``log(w3 * sum_k k (delta_k - kappa_k)^2)`` with ``k`` from 1, floored at ``EPS_LOG_FLOOR``."""
    if not w3 > 0:
        raise ArgumentError(f"the log-moment term needs w3 > 0, got {w3}")
    d = np.asarray(delta, dtype=float) - np.asarray(kappa, dtype=float)
    moment = float(np.dot(np.arange(1, len(d) + 1), d * d))
    return math.log(w3 * max(moment, EPS_LOG_FLOOR))


def cost_terms(tp: CompactShapeTree, tq: CompactShapeTree, w: Weights) -> tuple[float, float, float]:
    """The three weighted terms of the full matching cost."""
    _check_sizes(tp, tq)
    dv = tp.vectors - tq.vectors
    dk = tp.curvatures - tq.curvatures
    t1 = w.w1 * float(np.sum(dv * dv))
    t2 = w.w2 * float(np.dot(dk, dk))
    t3 = log_moment_term(tp.curvatures, tq.curvatures, w.w3) if w.w3 > 0 else float("nan")
    return t1, t2, t3


def tentative_cost(tp: CompactShapeTree, tq: CompactShapeTree, w: Weights = Weights(), counter: CostCounter | None = None) -> float:
    """Weighted squared vector differences plus squared curvature differences."""
    _check_sizes(tp, tq)
    dv = tp.vectors - tq.vectors
    dk = tp.curvatures - tq.curvatures
    if counter is not None:
        counter.calls += 1
        counter.terms += (tp.n - 1) + tp.n
    return w.w1 * float(np.sum(dv * dv)) + w.w2 * float(np.dot(dk, dk))


def full_cost(tp: CompactShapeTree, tq: CompactShapeTree, w: Weights = Weights(), counter: CostCounter | None = None) -> float:
    """Tentative cost plus the log first moment of the squared curvature gaps."""
    if not w.w3 > 0:
        raise ArgumentError(f"the full cost needs w3 > 0, got {w.w3}")
    base = tentative_cost(tp, tq, w, counter)
    if counter is not None:
        counter.terms += tp.n
    return base + log_moment_term(tp.curvatures, tq.curvatures, w.w3)


def _cost_fn(kind: str):
    if kind == TENTATIVE:
        return tentative_cost
    if kind == FULL:
        return full_cost
    raise ArgumentError(f"cost must be '{TENTATIVE}' or '{FULL}', got {kind!r}")


def _normalizer(normalize):
    if normalize in (None, "none"):
        return lambda t: t
    if normalize == "spatial":
        from .invariants_spatial import normalize_tree

        return normalize_tree
    if callable(normalize):
        return normalize
    raise ArgumentError(f"unknown normalisation {normalize!r}")


def retrieve_correspondences(tp: CompactShapeTree, tq: CompactShapeTree) -> CorrespondenceMap:
    """Pair the roots, then the k-th vector tips, walking both shapes counter-clockwise."""
    _check_sizes(tp, tq)
    n = tp.n
    pairs = [((tp.root_index + k) % n, (tq.root_index + k) % n) for k in range(n)]
    return CorrespondenceMap(pairs=pairs)


def best_match_root(
    tp: CompactShapeTree,
    q: SampledShape,
    w: Weights = Weights(),
    cost: str = TENTATIVE,
    normalize=None,
    counter: CostCounter | None = None,
) -> tuple[int, MatchReport]:
    """Root on ``q`` whose tree is cheapest to match against ``tp``.

    Every sample of ``q`` is tried as a root; ties go to the smallest index.
    """
    if len(q) != tp.n:
        raise ArgumentError(f"shapes differ in sample count ({tp.n} vs {len(q)})")
    fn = _cost_fn(cost)
    norm = _normalizer(normalize)
    tp_n = norm(tp)
    best_j, best_c = -1, math.inf
    for j in range(len(q)):
        tq = norm(build_tree(q, j))
        if counter is not None:
            counter.trees += 1
        c = fn(tp_n, tq, w, counter)
        if c < best_c:
            best_j, best_c = j, c
    tq_best = build_tree(q, best_j)
    terms = cost_terms(tp_n, norm(tq_best), w)
    corr = retrieve_correspondences(tp, tq_best)
    corr.cost = best_c
    corr.cost_terms = terms
    report = MatchReport(
        root_p=tp.root_index,
        root_q=best_j,
        cost=best_c,
        cost_terms=terms,
        correspondence=corr,
        cost_kind=cost,
    )
    return best_j, report


def match_shapes(
    p: SampledShape,
    q: SampledShape,
    w: Weights = Weights(),
    cost: str = TENTATIVE,
    root: int | None = None,
    normalize=None,
    counter: CostCounter | None = None,
) -> MatchReport:
    """Build one tree on ``p`` (default root 0) and find its best match on ``q``."""
    if len(p) != len(q):
        raise ArgumentError(f"shapes differ in sample count ({len(p)} vs {len(q)})")
    tp = build_tree(p, 0 if root is None else root)
    if counter is not None:
        counter.trees += 1
    _, report = best_match_root(tp, q, w, cost, normalize, counter)
    return report


def forest_line(t: CompactShapeTree, i: int, j: int) -> tuple[float, float]:
    """Length and angle of the segment from sample ``i`` to sample ``j``, from tree vectors alone.

    Sample indices refer to the owning sampling; the angle lies in (-pi, pi].
    """
    n = t.n
    if not (0 <= i < n and 0 <= j < n):
        raise ArgumentError(f"sample indices must lie in [0, {n}), got ({i}, {j})")
    if i == j:
        raise ArgumentError("a forest line needs two distinct samples")

    def vec(idx: int) -> np.ndarray:
        k = (idx - t.root_index) % n
        return np.zeros(2) if k == 0 else t.vectors[k - 1]

    if i == t.root_index:
        v = vec(j)
    elif j == t.root_index:
        v = -vec(i)
    else:
        v = vec(j) - vec(i)
    angle = math.atan2(v[1], v[0])
    if angle == -math.pi:
        angle = math.pi
    return math.hypot(v[0], v[1]), angle
