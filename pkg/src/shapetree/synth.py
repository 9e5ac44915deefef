"""Synthetic shapes and similarity transforms for tests and demos."""

from __future__ import annotations

import numpy as np

from .boundary import SampledBoundary, from_points
from .errors import NoDistinctExtremaError
from .sampling import centroid_distance_profile, find_absolute_extrema

__all__ = [
    "similarity",
    "transform_points",
    "polar_shape",
    "random_blob",
    "random_unique_blob",
    "symmetric_blob",
    "rounded_square",
    "regular_polygon",
    "octagon_pair",
]


def transform_points(points, scale: float = 1.0, angle: float = 0.0, shift=(0.0, 0.0)) -> np.ndarray:
    """Scale about the origin, rotate by ``angle``, then translate."""
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return scale * np.asarray(points, dtype=float) @ rot.T + np.asarray(shift, dtype=float)


def similarity(b: SampledBoundary, scale: float = 1.0, angle: float = 0.0, shift=(0.0, 0.0), roll: int = 0) -> SampledBoundary:
    """Similarity image of ``b``; ``roll`` moves the starting vertex forward."""
    pts = transform_points(b.points, scale, angle, shift)
    return from_points(np.roll(pts, -roll, axis=0))


def polar_shape(radius_fn, n_vertices: int = 400) -> SampledBoundary:
    t = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    r = radius_fn(t)
    return from_points(np.column_stack([r * np.cos(t), r * np.sin(t)]))


def random_blob(rng: np.random.Generator, n_vertices: int = 400, harmonics: int = 4, amplitude: float = 0.12) -> SampledBoundary:
    """Smooth star-shaped blob ``r(t) = 1 + sum_m a_m cos(m t) + b_m sin(m t)``."""
    a = rng.uniform(-amplitude, amplitude, harmonics) / np.arange(1, harmonics + 1)
    b = rng.uniform(-amplitude, amplitude, harmonics) / np.arange(1, harmonics + 1)

    def radius(t):
        m = np.arange(1, harmonics + 1)[:, None]
        return 1.0 + (a[:, None] * np.cos(m * t) + b[:, None] * np.sin(m * t)).sum(axis=0)

    return polar_shape(radius, n_vertices)


def random_unique_blob(rng: np.random.Generator, n_vertices: int = 400, margin: float = 0.05, kind: str = "maxima") -> SampledBoundary:
    """Random blob whose centroid-distance profile has one clearly dominant extremum.

    The runner-up local extremum must trail the global one by at least
    ``margin`` of the profile range.
    """
    while True:
        blob = random_blob(rng, n_vertices)
        prof = centroid_distance_profile(blob)
        try:
            ext = find_absolute_extrema(prof, kind, rel_tol=margin)
        except NoDistinctExtremaError:
            continue
        if len(ext) == 1:
            return blob


def symmetric_blob(fold: int, rng: np.random.Generator | None = None, n_vertices: int = 420) -> SampledBoundary:
    """Blob with ``fold``-fold rotational symmetry, hence ``fold`` equal distance maxima."""
    rng = np.random.default_rng(0) if rng is None else rng
    a1 = rng.uniform(0.12, 0.2)
    a2 = rng.uniform(-0.03, 0.03)
    phase = rng.uniform(0, 2 * np.pi)
    n_vertices -= n_vertices % fold
    return polar_shape(lambda t: 1.0 + a1 * np.cos(fold * t + phase) + a2 * np.cos(2 * fold * t), n_vertices)


def rounded_square(n_vertices: int = 800, bulge: float = 0.1) -> SampledBoundary:
    """Smooth square-like shape with four curvature peaks at angles 0, pi/2, pi, 3pi/2."""
    return polar_shape(lambda t: 1.0 + bulge * np.cos(4 * t), n_vertices)


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> np.ndarray:
    t = phase + 2.0 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def octagon_pair() -> tuple[np.ndarray, np.ndarray]:
    """Two similar eight-point shapes in the spirit of the introductory matching figure.

    The second is a slightly deformed, shifted copy of the first, labelled
    in the same counter-clockwise order.
    """
    p = np.array(
        [
            [0.0, 0.0],
            [2.0, -0.4],
            [4.0, 0.0],
            [4.6, 1.6],
            [4.0, 3.2],
            [2.0, 4.4],
            [0.0, 3.2],
            [-0.8, 1.6],
        ]
    )
    jitter = np.array(
        [
            [0.1, 0.05],
            [-0.05, 0.1],
            [0.08, -0.1],
            [0.0, 0.12],
            [-0.1, 0.0],
            [0.05, -0.08],
            [0.1, 0.1],
            [-0.06, -0.05],
        ]
    )
    q = p + jitter + np.array([10.0, 1.0])
    return p, q
