"""Scale- and rotation-invariant sample point placement on closed boundaries.

Three placement strategies are provided:

* recursive bisection of the perimeter (needs ``n = 2**k``),
* equal spacing seeded at an absolute extremum of the centroid-distance
  profile,
* the local maxima of curvature, topped up by interval subdivision.

When a profile has several equal absolute extrema, the seeds of two shapes
are paired by minimising the arc-length correspondence score over all
``L x L`` candidate pairs (:func:`align_extrema`).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .boundary import SampledBoundary, centroid, curvature_profile
from .errors import AlignmentError, ArgumentError, NoDistinctExtremaError

__all__ = [
    "BISECTION",
    "CENTROID_DISTANCE",
    "CURVATURE_MAXIMA",
    "METHODS",
    "Profile",
    "ExtremaSet",
    "SamplePointSet",
    "bisection_depth",
    "sample_bisection",
    "centroid_distance_profile",
    "curvature_arc_profile",
    "find_absolute_extrema",
    "find_local_extrema",
    "normalized_gaps",
    "correspondence_score",
    "align_extrema",
    "canonical_seed_index",
    "sample_by_distance_seed",
    "sample_by_curvature_maxima",
    "reseed",
    "align_samplings",
    "sample",
]

BISECTION = "bisection"
CENTROID_DISTANCE = "centroid-distance"
CURVATURE_MAXIMA = "curvature-maxima"
METHODS = (BISECTION, CENTROID_DISTANCE, CURVATURE_MAXIMA)

DEFAULT_REL_TOL = 1e-3
CLUSTER_SPACINGS = 2.0
GAP_COMPARE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Profile:
    """A scalar function sampled at the boundary vertices, indexed by arc length."""

    arc: np.ndarray
    values: np.ndarray
    total_length: float

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class ExtremaSet:
    positions: np.ndarray
    values: np.ndarray
    kind: str
    total_length: float

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True, eq=False)
class SamplePointSet:
    """Arc positions of the samples, in traversal order starting at the seed.

    ``positions`` lie in ``[0, total_length)``; they increase
    counter-clockwise from ``seed_arc`` and may wrap past the seam once.
    ``extrema``/``seed_extremum`` record the seed candidates when the
    placement was seeded from an extrema set, so two samplings can be
    re-aligned later.
    """

    positions: np.ndarray
    seed_arc: float
    method: str
    total_length: float
    extrema: ExtremaSet | None = None
    seed_extremum: int | None = None
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def offsets(self) -> np.ndarray:
        """Arc distance of each sample from the seed, counter-clockwise."""
        return np.mod(self.positions - self.seed_arc, self.total_length)

    def points(self, boundary: SampledBoundary) -> np.ndarray:
        return boundary.point_at(self.positions)


def _as_positions(offsets: np.ndarray, seed: float, st: float) -> np.ndarray:
    pos = np.mod(seed + offsets, st)
    # guard against mod() returning st for tiny negative round-off
    pos[pos >= st] = 0.0
    return pos


# --- bisection -------------------------------------------------------------


def bisection_depth(n: int) -> int:
    """Return ``k`` with ``n == 2**k``; raise if ``n`` is not such a power >= 4."""
    if n < 4 or n & (n - 1):
        raise ArgumentError(
            f"bisection sampling needs n = 2^k >= 4 sample points, got n = {n}"
        )
    return n.bit_length() - 1


def sample_bisection(b: SampledBoundary, k: int) -> SamplePointSet:
    """``2**k`` points by recursively halving the perimeter, seeded at the first vertex."""
    if k < 2:
        raise ArgumentError(f"bisection sampling needs n = 2^k >= 4, got k = {k}")
    st = b.total_length

    def split(lo: float, hi: float, depth: int) -> list[float]:
        if depth == 0:
            return [lo]
        mid = 0.5 * (lo + hi)
        return split(lo, mid, depth - 1) + split(mid, hi, depth - 1)

    offsets = np.array(split(0.0, st, k))
    return SamplePointSet(
        positions=_as_positions(offsets, 0.0, st),
        seed_arc=0.0,
        method=BISECTION,
        total_length=st,
    )


# --- profiles and extrema --------------------------------------------------


def centroid_distance_profile(b: SampledBoundary) -> Profile:
    c = centroid(b)
    d = np.linalg.norm(b.points - c, axis=1)
    return Profile(arc=np.asarray(b.cum_arc), values=d, total_length=b.total_length)


def curvature_arc_profile(b: SampledBoundary) -> Profile:
    return Profile(
        arc=np.asarray(b.cum_arc),
        values=np.asarray(curvature_profile(b).values),
        total_length=b.total_length,
    )


def _refine_vertex(profile: Profile, i: int) -> float:
    """Arc position of the extremum of the parabola through samples i-1, i, i+1."""
    n = len(profile)
    st = profile.total_length
    s0 = profile.arc[i]
    sm = profile.arc[(i - 1) % n] - s0
    sp = profile.arc[(i + 1) % n] - s0
    sm = sm - st if sm > 0 else sm
    sp = sp + st if sp < 0 else sp
    vm, v0, vp = profile.values[(i - 1) % n], profile.values[i], profile.values[(i + 1) % n]
    # divided differences of the interpolating quadratic
    d1m = (v0 - vm) / (0.0 - sm)
    d1p = (vp - v0) / sp
    curv = (d1p - d1m) / (sp - sm)
    if curv == 0.0:
        return float(s0)
    slope0 = d1m + curv * (0.0 - sm)  # derivative at s = 0 of the quadratic
    delta = -slope0 / (2.0 * curv)
    delta = min(max(delta, sm), sp)
    return float(np.mod(s0 + delta, st))


def _spacing(profile: Profile) -> float:
    gaps = np.diff(np.append(profile.arc, profile.total_length))
    return float(np.median(gaps))


def _cyclic_clusters(idx: np.ndarray, profile: Profile, window: float) -> list[list[int]]:
    """Group sorted vertex indices whose neighbours lie within ``window`` arc length."""
    if len(idx) == 0:
        return []
    st = profile.total_length
    arc = profile.arc
    clusters = [[int(idx[0])]]
    for i in idx[1:]:
        if arc[i] - arc[clusters[-1][-1]] <= window:
            clusters[-1].append(int(i))
        else:
            clusters.append([int(i)])
    if len(clusters) > 1:
        wrap_gap = arc[clusters[0][0]] + st - arc[clusters[-1][-1]]
        if wrap_gap <= window:
            clusters[0] = clusters.pop() + clusters[0]
    return clusters


def find_absolute_extrema(profile: Profile, kind: str = "maxima", rel_tol: float = DEFAULT_REL_TOL) -> ExtremaSet:
    """Positions where a cyclic profile attains its global minimum or maximum.

    Every sample within ``rel_tol * (max - min)`` of the global extremum is a
    candidate; candidates closer than two sample spacings are merged, and
    each group is represented by its best sample refined with a parabola
    through its neighbours.
    """
    if kind not in ("minima", "maxima"):
        raise ArgumentError(f"kind must be 'minima' or 'maxima', got {kind!r}")
    v = np.asarray(profile.values, dtype=float)
    if len(v) == 0:
        raise ArgumentError("empty profile")
    vmax, vmin = float(v.max()), float(v.min())
    if vmax - vmin < 1e-12 * max(abs(vmax), abs(vmin), 1e-300):
        raise NoDistinctExtremaError("no distinct extrema: the profile is constant")
    sign = 1.0 if kind == "maxima" else -1.0
    w = sign * v
    best = w.max()
    cand = np.nonzero(w >= best - rel_tol * (vmax - vmin))[0]
    clusters = _cyclic_clusters(cand, profile, CLUSTER_SPACINGS * _spacing(profile))

    positions, values = [], []
    for group in clusters:
        i = max(group, key=lambda j: (w[j], -j))
        positions.append(_refine_vertex(profile, i))
        values.append(v[i])
    order = np.argsort(positions, kind="stable")
    return ExtremaSet(
        positions=np.asarray(positions)[order],
        values=np.asarray(values)[order],
        kind=kind,
        total_length=profile.total_length,
    )


def find_local_extrema(profile: Profile, kind: str = "maxima", flat_tol: float = 1e-9) -> ExtremaSet:
    """Strict local extrema of a cyclic profile; flat runs count once, at their middle."""
    if kind not in ("minima", "maxima"):
        raise ArgumentError(f"kind must be 'minima' or 'maxima', got {kind!r}")
    v = np.asarray(profile.values, dtype=float)
    n = len(v)
    span = float(v.max() - v.min())
    if span <= 1e-12 * max(float(np.abs(v).max()), 1e-300):
        raise NoDistinctExtremaError("no distinct extrema: the profile is constant")
    w = v if kind == "maxima" else -v
    tol = flat_tol * span
    # run-length encode values that are equal within tol, cyclically
    same_next = np.abs(np.roll(w, -1) - w) <= tol
    start = int(np.argmin(same_next)) + 1  # first index after a run boundary
    runs = []
    i = 0
    while i < n:
        j = i
        while j < n - 1 and same_next[(start + j) % n]:
            j += 1
        runs.append([(start + m) % n for m in range(i, j + 1)])
        i = j + 1
    st = profile.total_length
    arc = profile.arc
    positions, values = [], []
    m = len(runs)
    for r in range(m):
        here = w[runs[r][0]]
        if here > w[runs[r - 1][0]] and here > w[runs[(r + 1) % m][0]]:
            run = runs[r]
            if len(run) == 1:
                positions.append(_refine_vertex(profile, run[0]))
            else:
                first, last = arc[run[0]], arc[run[-1]]
                length = np.mod(last - first, st)
                positions.append(float(np.mod(first + 0.5 * length, st)))
            values.append(v[run[0]])
    if not positions:
        raise NoDistinctExtremaError(f"no distinct local {kind} in the profile")
    order = np.argsort(positions, kind="stable")
    return ExtremaSet(
        positions=np.asarray(positions)[order],
        values=np.asarray(values)[order],
        kind=kind,
        total_length=st,
    )


# --- arc-length correspondence -----------------------------------------------


def normalized_gaps(positions, start: int, total_length: float) -> np.ndarray:
    """Cyclic gaps between sorted positions starting at ``start``, divided by the perimeter.

    The k-th gap runs from the (k-1)-th to the k-th position in traversal
    order; the last one closes back to the start.  A single position yields
    the full loop.
    """
    pos = np.sort(np.asarray(positions, dtype=float))
    L = len(pos)
    order = pos[(start + np.arange(L + 1)) % L]
    gaps = np.mod(np.diff(order), total_length)
    if L == 1:
        gaps = np.array([total_length])
    return gaps / total_length


def correspondence_score(A, i: int, B, j: int, st_a: float | None = None, st_b: float | None = None) -> float:
    """Sum of squared differences of normalised extremum gaps starting at ``A[i]`` and ``B[j]``."""
    pa = A.positions if isinstance(A, ExtremaSet) else np.asarray(A, dtype=float)
    pb = B.positions if isinstance(B, ExtremaSet) else np.asarray(B, dtype=float)
    if st_a is None:
        st_a = A.total_length
    if st_b is None:
        st_b = B.total_length
    if len(pa) != len(pb):
        raise AlignmentError(
            f"extrema counts differ ({len(pa)} vs {len(pb)}); shapes cannot correspond under this method"
        )
    if len(pa) == 0:
        raise ArgumentError("extrema sets must be non-empty")
    ga = normalized_gaps(pa, i, st_a)
    gb = normalized_gaps(pb, j, st_b)
    return float(np.sum((ga - gb) ** 2))


def align_extrema(A: ExtremaSet, B: ExtremaSet) -> tuple[int, int, float]:
    """Best pairing ``(i, j, score)`` over all ``L x L`` candidates; ties go to the smallest ``(i, j)``."""
    if len(A) != len(B):
        raise AlignmentError(
            f"extrema counts differ ({len(A)} vs {len(B)}); shapes cannot correspond under this method"
        )
    best = None
    for i in range(len(A)):
        for j in range(len(B)):
            score = correspondence_score(A, i, B, j)
            if best is None or score < best[2]:
                best = (i, j, score)
    return best


def _compare_gaps(a: np.ndarray, b: np.ndarray) -> int:
    for x, y in zip(a, b):
        if x < y - GAP_COMPARE_TOL:
            return -1
        if x > y + GAP_COMPARE_TOL:
            return 1
    return 0


def canonical_seed_index(extrema: ExtremaSet) -> int:
    """Extremum whose cyclic gap sequence is lexicographically smallest (ties: lowest index)."""
    L = len(extrema)
    seqs = [normalized_gaps(extrema.positions, i, extrema.total_length) for i in range(L)]
    keyed = sorted(range(L), key=functools.cmp_to_key(lambda i, j: _compare_gaps(seqs[i], seqs[j]) or (i - j)))
    return keyed[0]


# --- seeded samplings ------------------------------------------------------------


def _uniform_from(seed: float, n: int, st: float) -> np.ndarray:
    return _as_positions(np.arange(n) * (st / n), seed, st)


def sample_by_distance_seed(
    b: SampledBoundary, n: int, kind: str = "maxima", rel_tol: float = DEFAULT_REL_TOL
) -> SamplePointSet:
    """Equally spaced samples seeded at an absolute extremum of the centroid distance."""
    if n < 3:
        raise ArgumentError(f"sampling needs n >= 3, got {n}")
    extrema = find_absolute_extrema(centroid_distance_profile(b), kind, rel_tol)
    seed_idx = 0 if len(extrema) == 1 else canonical_seed_index(extrema)
    seed = float(extrema.positions[seed_idx])
    st = b.total_length
    return SamplePointSet(
        positions=_uniform_from(seed, n, st),
        seed_arc=seed,
        method=CENTROID_DISTANCE,
        total_length=st,
        extrema=extrema,
        seed_extremum=seed_idx,
        params={"n": n, "kind": kind},
    )


def _subdivide(offsets: list[float], n: int, st: float) -> list[float]:
    """Top up sorted seed-relative offsets to ``n`` points.

    Each round takes the smallest current interval length ``m`` and walks the
    intervals from largest to smallest (ties by position), marking points at
    ``m, 2m, ...`` strictly inside each interval; an interval too short to
    take a mark-off point gets its midpoint instead.  Rounds repeat until
    ``n`` points exist.
    """
    pts = sorted(offsets)
    tol = 1e-9 * st
    while len(pts) < n:
        bounds = pts + [st + pts[0]]
        intervals = [(bounds[k], bounds[k + 1] - bounds[k]) for k in range(len(pts))]
        m = min(g for _, g in intervals)
        added = []
        for start, g in sorted(intervals, key=lambda t: (-round(t[1] / tol), t[0])):
            if len(pts) + len(added) >= n:
                break
            marks = []
            x = m
            while x < g - tol and len(pts) + len(added) + len(marks) < n:
                marks.append(start + x)
                x += m
            if not marks:
                marks = [start + 0.5 * g]
            added.extend(marks)
        pts = sorted(pts + [float(np.mod(a, st)) for a in added])
    return pts


def sample_by_curvature_maxima(b: SampledBoundary, n: int) -> SamplePointSet:
    """Samples at the local maxima of curvature, trimmed or subdivided to ``n`` points."""
    if n < 3:
        raise ArgumentError(f"sampling needs n >= 3, got {n}")
    st = b.total_length
    maxima = find_local_extrema(curvature_arc_profile(b), "maxima")
    if len(maxima) > n:
        keep = sorted(range(len(maxima)), key=lambda k: (-maxima.values[k], maxima.positions[k]))[:n]
        keep.sort()
        maxima = ExtremaSet(
            positions=maxima.positions[keep],
            values=maxima.values[keep],
            kind="maxima",
            total_length=st,
        )
    seed_idx = 0 if len(maxima) == 1 else canonical_seed_index(maxima)
    seed = float(maxima.positions[seed_idx])
    offsets = _subdivide(list(np.mod(maxima.positions - seed, st)), n, st)
    return SamplePointSet(
        positions=_as_positions(np.asarray(offsets), seed, st),
        seed_arc=seed,
        method=CURVATURE_MAXIMA,
        total_length=st,
        extrema=maxima,
        seed_extremum=seed_idx,
        params={"n": n},
    )


def reseed(samples: SamplePointSet, extremum_index: int) -> SamplePointSet:
    """Rebuild ``samples`` with another member of its extrema set as the seed."""
    ext = samples.extrema
    if ext is None:
        raise ArgumentError("this sampling was not seeded from an extrema set")
    st = samples.total_length
    seed = float(ext.positions[extremum_index])
    if samples.method == CENTROID_DISTANCE:
        positions = _uniform_from(seed, len(samples), st)
    elif samples.method == CURVATURE_MAXIMA:
        offsets = _subdivide(list(np.mod(ext.positions - seed, st)), len(samples), st)
        positions = _as_positions(np.asarray(offsets), seed, st)
    else:
        raise ArgumentError(f"cannot reseed a {samples.method} sampling")
    return SamplePointSet(
        positions=positions,
        seed_arc=seed,
        method=samples.method,
        total_length=st,
        extrema=ext,
        seed_extremum=extremum_index,
        params=dict(samples.params),
    )


def align_samplings(p: SamplePointSet, q: SamplePointSet) -> tuple[SamplePointSet, float]:
    """Reseed ``q`` so its seed corresponds to the seed of ``p``.

    Returns the (possibly unchanged) second sampling and the correspondence
    score of the chosen pairing.  Samplings without an extrema set are
    returned as they are.
    """
    if p.extrema is None or q.extrema is None:
        return q, 0.0
    if len(p.extrema) != len(q.extrema):
        raise AlignmentError(
            f"extrema counts differ ({len(p.extrema)} vs {len(q.extrema)}); "
            "shapes are not comparable under this sampling method"
        )
    L = len(q.extrema)
    scores = [correspondence_score(p.extrema, p.seed_extremum, q.extrema, j) for j in range(L)]
    j = int(np.argmin(scores))
    if j == q.seed_extremum:
        return q, scores[j]
    return reseed(q, j), scores[j]


def sample(b: SampledBoundary, n: int, method: str = CENTROID_DISTANCE, kind: str = "maxima") -> SamplePointSet:
    """Dispatch to one of the three placement methods by name."""
    if method == BISECTION:
        return sample_bisection(b, bisection_depth(n))
    if method == CENTROID_DISTANCE:
        return sample_by_distance_seed(b, n, kind)
    if method == CURVATURE_MAXIMA:
        return sample_by_curvature_maxima(b, n)
    raise ArgumentError(f"unknown sampling method {method!r}; choose from {', '.join(METHODS)}")
