"""Minkowski geometry with signature (+,-,-,-).

Four-vectors are plain numpy arrays of shape (4,), components ordered
(t, x, y, z). Nothing here imposes normalization; the guidance law is
projective in all its vector inputs.
"""

from __future__ import annotations

import numpy as np

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def four_vector(t, x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def minkowski_dot(a: np.ndarray, b: np.ndarray) -> float:
    """a^0 b^0 - a.b for real four-vectors."""
    return float(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3])


def minkowski_norm2(a: np.ndarray) -> float:
    return minkowski_dot(a, a)


def lower_index(a: np.ndarray) -> np.ndarray:
    """Component-wise metric contraction: (a^0, -a^1, -a^2, -a^3)."""
    out = np.array(a, dtype=float)
    out[1:] = -out[1:]
    return out


def is_timelike_future(u: np.ndarray) -> bool:
    return u[0] > 0.0 and minkowski_norm2(u) > 0.0


def boost_matrix(rapidity: float, axis: int) -> np.ndarray:
    """Pure boost along a spatial axis (1, 2 or 3).

    Acts on column four-vectors; boost_matrix(chi, 3) @ (1,0,0,0) gives
    (cosh chi, 0, 0, sinh chi).
    """
    if axis not in (1, 2, 3):
        raise ValueError(f"boost axis must be 1, 2 or 3, got {axis}")
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    L = np.eye(4)
    L[0, 0] = L[axis, axis] = ch
    L[0, axis] = L[axis, 0] = sh
    return L


def boost_velocity(v: np.ndarray) -> np.ndarray:
    """General boost taking a particle at rest to 3-velocity v (|v| < 1)."""
    v = np.asarray(v, dtype=float)
    b2 = float(v @ v)
    if b2 >= 1.0:
        raise ValueError("boost velocity must satisfy |v| < 1")
    if b2 == 0.0:
        return np.eye(4)
    g = 1.0 / np.sqrt(1.0 - b2)
    L = np.eye(4)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = g * v
    L[1:, 1:] += (g - 1.0) / b2 * np.outer(v, v)
    return L
