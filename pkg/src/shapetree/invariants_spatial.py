"""Rotation and scale normalisation of compact shape trees in the spatial domain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateShapeError
from .shape_tree import CompactShapeTree

__all__ = [
    "SpatialDescriptor",
    "wrap_angle",
    "spatial_descriptor",
    "spatial_distance",
    "normalize_tree",
    "descriptor_csv",
]


def wrap_angle(a):
    """Map angles to (-pi, pi]."""
    w = np.pi - np.mod(np.pi - np.asarray(a, dtype=float), 2.0 * np.pi)
    return w


@dataclass(frozen=True, eq=False)
class SpatialDescriptor:
    angle_diffs: np.ndarray
    norm_moduli: np.ndarray
    feature_values: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.angle_diffs)


def _polar(t: CompactShapeTree) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(t.vectors, dtype=float)
    if len(v) < 2:
        raise ArgumentError("a spatial descriptor needs n >= 3 samples")
    r = np.hypot(v[:, 0], v[:, 1])
    if np.any(r == 0.0):
        raise DegenerateShapeError("zero-length tree vector (duplicate sample point)")
    return np.arctan2(v[:, 1], v[:, 0]), r


def spatial_descriptor(t: CompactShapeTree) -> SpatialDescriptor:
    """Consecutive-angle differences (cyclic) and moduli divided by their maximum.

    ``feature_values`` holds the curvatures in rooted order (root first),
    divided by their largest magnitude, which cancels the ``1/scale``
    behaviour of curvature.
    """
    alpha, r = _polar(t)
    diffs = wrap_angle(np.roll(alpha, -1) - alpha)
    moduli = r / r.max()
    kappa = np.asarray(t.curvatures, dtype=float)
    rooted = np.append(kappa[-1], kappa[:-1])
    peak = np.abs(rooted).max()
    features = rooted / peak if peak > 0 else rooted.copy()
    return SpatialDescriptor(angle_diffs=diffs, norm_moduli=moduli, feature_values=features)


def spatial_distance(d1: SpatialDescriptor, d2: SpatialDescriptor) -> float:
    if len(d1) != len(d2):
        raise ArgumentError(f"descriptor lengths differ ({len(d1)} vs {len(d2)})")
    da = wrap_angle(d1.angle_diffs - d2.angle_diffs)
    dm = d1.norm_moduli - d2.norm_moduli
    return float(np.dot(da, da) + np.dot(dm, dm))


def normalize_tree(t: CompactShapeTree) -> CompactShapeTree:
    """Tree rotated so its first vector points along +x and scaled so the longest vector has unit length.

    Curvatures are divided by their largest magnitude.  The result is the
    tree rebuilt from its spatial descriptor, so it is invariant to rotation,
    scale and translation of the underlying shape.
    """
    alpha, r = _polar(t)
    scale = r.max()
    c, s = np.cos(-alpha[0]), np.sin(-alpha[0])
    rot = np.array([[c, -s], [s, c]])
    vectors = (np.asarray(t.vectors) @ rot.T) / scale
    kappa = np.asarray(t.curvatures, dtype=float)
    peak = np.abs(kappa).max()
    return CompactShapeTree(
        root=np.zeros(2),
        vectors=vectors,
        curvatures=kappa / peak if peak > 0 else kappa.copy(),
        root_index=t.root_index,
    )


def descriptor_csv(d: SpatialDescriptor) -> str:
    rows = ["angle_diff,norm_modulus"]
    rows += [f"{a:.12g},{m:.12g}" for a, m in zip(d.angle_diffs, d.norm_moduli)]
    return "\n".join(rows) + "\n"
