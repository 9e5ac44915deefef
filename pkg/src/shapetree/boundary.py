"""Closed shape boundaries and their geometric primitives.

A boundary is stored as an ordered, counter-clockwise polyline.  Arc length
is the chord length of the polyline; the closing chord from the last point
back to the first is implicit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateShapeError, ParseError

__all__ = [
    "SampledBoundary",
    "CurvatureProfile",
    "from_points",
    "parse_boundary",
    "format_boundary",
    "total_arc_length",
    "signed_area",
    "centroid",
    "resample_uniform",
    "curvature_profile",
    "curvature_from_points",
    "make_ellipse",
]


@dataclass(frozen=True, eq=False)
class SampledBoundary:
    """Counter-clockwise closed polyline with cumulative chord lengths.

    Build instances through :func:`from_points`, which enforces the
    orientation and non-degeneracy invariants.
    """

    points: np.ndarray
    cum_arc: np.ndarray
    closed: bool = True

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_length(self) -> float:
        return float(self.cum_arc[-1] + np.linalg.norm(self.points[0] - self.points[-1]))

    @property
    def segment_lengths(self) -> np.ndarray:
        """Chord lengths, the last one being the closing chord."""
        return np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)

    def point_at(self, arc) -> np.ndarray:
        """Linearly interpolated point(s) at the given arc length(s), taken modulo the perimeter."""
        st = self.total_length
        s = np.mod(np.asarray(arc, dtype=float), st)
        knots = np.append(self.cum_arc, st)
        closed_pts = np.vstack([self.points, self.points[:1]])
        x = np.interp(s, knots, closed_pts[:, 0])
        y = np.interp(s, knots, closed_pts[:, 1])
        return np.stack([x, y], axis=-1)


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Signed curvature at each boundary point, in 1/length units."""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def signed_area(points) -> float:
    p = np.asarray(points, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _collapse_duplicates(p: np.ndarray) -> np.ndarray:
    keep = np.ones(len(p), dtype=bool)
    keep[1:] = np.any(p[1:] != p[:-1], axis=1)
    p = p[keep]
    # closure is implicit, so a repeated first point at the end is a duplicate too
    while len(p) > 1 and np.all(p[-1] == p[0]):
        p = p[:-1]
    return p


def from_points(points) -> SampledBoundary:
    """Validate and normalise a point sequence into a :class:`SampledBoundary`.

    Consecutive duplicates are collapsed and clockwise input is reversed in
    place (the first point stays first).
    """
    p = np.array(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ArgumentError(f"expected an (N, 2) point array, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ArgumentError("point coordinates must be finite")
    p = _collapse_duplicates(p)
    if len(p) < 3:
        raise DegenerateShapeError(f"a shape needs at least 3 distinct points, got {len(p)}")
    area = signed_area(p)
    scale = float(np.ptp(p, axis=0).max())
    if abs(area) <= 1e-14 * scale * scale:
        raise DegenerateShapeError("boundary encloses zero area (collinear points)")
    if area < 0:
        p = np.vstack([p[:1], p[:0:-1]])
    seg = np.linalg.norm(np.diff(p, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    p.setflags(write=False)
    cum.setflags(write=False)
    return SampledBoundary(points=p, cum_arc=cum)


def parse_boundary(text) -> SampledBoundary:
    """Read the ``x,y`` CSV point-list format.

    ``text`` may be a string or a text stream.  Blank lines are ignored.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(stream)
    header = None
    rows = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = [c.strip().lower() for c in row]
            if header != ["x", "y"]:
                raise ParseError(f"expected header 'x,y', got {','.join(row)!r}", line)
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 columns, got {len(row)}", line)
        try:
            rows.append((float(row[0]), float(row[1])))
        except ValueError:
            raise ParseError(f"non-numeric coordinate in {','.join(row)!r}", line) from None
    if header is None:
        raise ParseError("empty input, missing 'x,y' header", 1)
    if not rows:
        raise DegenerateShapeError("point list is empty")
    return from_points(rows)


def format_boundary(b: SampledBoundary) -> str:
    lines = ["x,y"]
    lines += [f"{x:.12g},{y:.12g}" for x, y in b.points]
    return "\n".join(lines) + "\n"


def total_arc_length(b: SampledBoundary) -> float:
    return b.total_length


def centroid(b: SampledBoundary) -> np.ndarray:
    """Area centroid of the enclosed polygon (shoelace weighted)."""
    p = b.points
    # shift to the first point to keep the cross products well conditioned
    origin = p[0]
    q = p - origin
    x, y = q[:, 0], q[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if abs(area) <= 1e-300:
        raise DegenerateShapeError("cannot take the centroid of a zero-area boundary")
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return np.array([cx, cy]) + origin


def resample_uniform(b: SampledBoundary, n: int, seed_arc: float = 0.0) -> SampledBoundary:
    """Place ``n`` points at equal arc-length steps, starting at ``seed_arc``."""
    if n < 3:
        raise ArgumentError(f"resampling needs n >= 3, got {n}")
    st = b.total_length
    if not 0.0 <= seed_arc < st:
        raise ArgumentError(f"seed_arc must lie in [0, {st}), got {seed_arc}")
    arcs = np.mod(seed_arc + np.arange(n) * (st / n), st)
    return from_points(b.point_at(arcs))


def _central_derivatives(x: np.ndarray, h_prev: np.ndarray, h_next: np.ndarray):
    xp, xm = np.roll(x, -1), np.roll(x, 1)
    denom = h_prev * h_next * (h_prev + h_next)
    d1 = (h_prev**2 * xp - h_next**2 * xm + (h_next**2 - h_prev**2) * x) / denom
    d2 = 2.0 * (h_prev * xp - (h_prev + h_next) * x + h_next * xm) / denom
    return d1, d2


def curvature_from_points(points) -> np.ndarray:
    """Signed curvature of a closed point sequence.

    Second-order central differences with respect to chord length on a
    non-uniform grid, wrapping around the seam.  Counter-clockwise convex
    arcs have positive curvature.
    """
    p = np.asarray(points, dtype=float)
    if len(p) < 5:
        raise ArgumentError(f"curvature needs at least 5 points, got {len(p)}")
    h_next = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)
    h_prev = np.roll(h_next, 1)
    if np.any(h_next == 0.0):
        raise DegenerateShapeError("repeated consecutive points, curvature undefined")
    dx, ddx = _central_derivatives(p[:, 0], h_prev, h_next)
    dy, ddy = _central_derivatives(p[:, 1], h_prev, h_next)
    speed = np.hypot(dx, dy)
    if np.any(speed == 0.0):
        raise DegenerateShapeError("vanishing tangent, curvature undefined")
    return (dx * ddy - dy * ddx) / speed**3


def curvature_profile(b: SampledBoundary) -> CurvatureProfile:
    values = curvature_from_points(b.points)
    values.setflags(write=False)
    return CurvatureProfile(values=values)


def make_ellipse(a: float, b: float, n: int, half: bool = False) -> SampledBoundary:
    """Ellipse ``x = a cos t, y = b sin t`` sampled at uniformly spaced angles.

    With ``half=True`` the angles span [-pi/2, pi/2] inclusive and the arc is
    closed by the chord joining its end points.
    """
    if a <= 0 or b <= 0:
        raise ArgumentError("ellipse semi-axes must be positive")
    if n < 3:
        raise ArgumentError(f"ellipse needs n >= 3, got {n}")
    if half:
        t = np.linspace(-np.pi / 2, np.pi / 2, n)
    else:
        t = 2.0 * np.pi * np.arange(n) / n
    return from_points(np.column_stack([a * np.cos(t), b * np.sin(t)]))
