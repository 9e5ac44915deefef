"""Aperiodic DFT descriptors of a compact shape tree.

The vector angles (exponentiated) and the vector lengths are each treated
as a finite discrete signal indexed ``i = 1 .. n-1`` and transformed at
arbitrary real frequencies.  Ratios ``X(w1) / X(w2)`` cancel a common
factor: ``exp(phi)`` for a uniform angle shift (rotation) and ``gamma`` for
a uniform length scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateShapeError, UnstableFrequencyError
from .shape_tree import CompactShapeTree

__all__ = [
    "ANGLE",
    "MODULUS",
    "RATIO_DENOMINATOR_GUARD",
    "Spectrum",
    "aperiodic_dft",
    "tree_angles",
    "exp_angle_spectrum",
    "angle_spectrum",
    "modulus_spectrum",
    "default_omegas",
    "default_omega_pair",
    "spectral_ratio",
    "spectrum_csv",
]

ANGLE = "angle-spectrum"
MODULUS = "modulus-spectrum"
RATIO_DENOMINATOR_GUARD = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    omegas: np.ndarray
    values: np.ndarray
    kind: str

    def __len__(self) -> int:
        return len(self.omegas)

    def at(self, omega: float) -> complex:
        hits = np.nonzero(np.isclose(self.omegas, omega, rtol=0.0, atol=1e-12))[0]
        if len(hits) == 0:
            raise ArgumentError(f"frequency {omega} was not evaluated in this spectrum")
        return complex(self.values[hits[0]])


def aperiodic_dft(signal, omegas) -> np.ndarray:
    """``sum_{i=1}^{N} x_i exp(-j w i)`` for each ``w`` by direct summation."""
    x = np.asarray(signal)
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    i = np.arange(1, len(x) + 1)
    return np.exp(-1j * np.outer(w, i)) @ x


def tree_angles(t: CompactShapeTree) -> np.ndarray:
    """Unwrapped polar angles of the tree vectors; the first stays in (-pi, pi]."""
    v = np.asarray(t.vectors, dtype=float)
    if len(v) < 2:
        raise ArgumentError("a spectrum needs n >= 3 samples")
    if np.any(np.hypot(v[:, 0], v[:, 1]) == 0.0):
        raise DegenerateShapeError("zero-length tree vector (duplicate sample point)")
    theta = np.arctan2(v[:, 1], v[:, 0])
    if theta[0] == -np.pi:
        theta[0] = np.pi
    return np.unwrap(theta)


def exp_angle_spectrum(angles, omegas, center: bool = False) -> Spectrum:
    """Transform of ``exp(theta_i)`` for an explicit angle sequence.

    With ``center=True`` the angles are shifted to zero mean first, which
    scales every value by the same positive constant and keeps ``exp``
    from overflowing.
    """
    theta = np.asarray(angles, dtype=float)
    if center:
        theta = theta - theta.mean()
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    return Spectrum(omegas=w, values=aperiodic_dft(np.exp(theta), w), kind=ANGLE)


def angle_spectrum(t: CompactShapeTree, omegas=None, center: bool = True) -> Spectrum:
    if omegas is None:
        omegas = default_omegas(t.n)
    return exp_angle_spectrum(tree_angles(t), omegas, center=center)


def modulus_spectrum(t: CompactShapeTree, omegas=None) -> Spectrum:
    v = np.asarray(t.vectors, dtype=float)
    if len(v) < 2:
        raise ArgumentError("a spectrum needs n >= 3 samples")
    lengths = np.hypot(v[:, 0], v[:, 1])
    if np.any(lengths == 0.0):
        raise DegenerateShapeError("zero-length tree vector (duplicate sample point)")
    if omegas is None:
        omegas = default_omegas(t.n)
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    return Spectrum(omegas=w, values=aperiodic_dft(lengths, w), kind=MODULUS)


def default_omegas(n: int) -> np.ndarray:
    """``2 pi m / (n - 1)`` for ``m = 1 .. (n - 1) // 2``."""
    m = np.arange(1, (n - 1) // 2 + 1)
    return 2.0 * np.pi * m / (n - 1)


def default_omega_pair(n: int, m1: int = 1, m2: int = 2) -> tuple[float, float]:
    top = (n - 1) // 2
    for m in (m1, m2):
        if not 1 <= m <= top:
            raise ArgumentError(f"frequency index {m} outside 1..{top} for n = {n}")
    return 2.0 * np.pi * m1 / (n - 1), 2.0 * np.pi * m2 / (n - 1)


def spectral_ratio(s: Spectrum, omega1: float, omega2: float) -> complex:
    """``X(omega1) / X(omega2)``; both frequencies must be in the spectrum."""
    x1, x2 = s.at(omega1), s.at(omega2)
    if abs(x2) <= RATIO_DENOMINATOR_GUARD:
        others = [k for k in range(len(s)) if not np.isclose(s.omegas[k], omega2, rtol=0, atol=1e-12)]
        suggestion = float(s.omegas[max(others, key=lambda k: abs(s.values[k]))]) if others else None
        raise UnstableFrequencyError(
            f"unstable frequency pair: |X({omega2:.6g})| = {abs(x2):.3g} is below "
            f"{RATIO_DENOMINATOR_GUARD:g}; choose a different omega2"
            + (f" (e.g. {suggestion:.6g})" if suggestion is not None else ""),
            suggested_omega=suggestion,
        )
    if np.isclose(omega1, omega2, rtol=0.0, atol=1e-12):
        return 1.0 + 0.0j
    return x1 / x2


def spectrum_csv(s: Spectrum) -> str:
    rows = ["omega,re,im"]
    rows += [f"{w:.12g},{v.real:.12g},{v.imag:.12g}" for w, v in zip(s.omegas, s.values)]
    return "\n".join(rows) + "\n"
