"""Planar rotation and reflection algebra.

Angles are plain floats in radians. Matrices are ``(2, 2)`` float arrays.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi

# Absolute tolerance for orthogonality / determinant checks. Inputs usually
# come out of an SVD of floating-point data.
ORTHO_TOL = 1e-9


class NotARotationError(ValueError):
    """Raised when a matrix fails the orthogonality or determinant check."""


def wrap_angle(a):
    """Wrap an angle (or array of angles) into ``(-pi, pi]``."""
    if np.ndim(a) == 0:
        r = math.remainder(float(a), TWO_PI)
        return math.pi if r <= -math.pi else r
    a = np.asarray(a, dtype=float)
    r = np.remainder(a + math.pi, TWO_PI) - math.pi
    return np.where(r <= -math.pi, math.pi, r)


def rot(theta: float) -> np.ndarray:
    """Counter-clockwise rotation by ``theta`` radians."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def refl(phi: float) -> np.ndarray:
    """Reflection across the line through the origin at angle ``phi``."""
    c, s = math.cos(2.0 * phi), math.sin(2.0 * phi)
    return np.array([[c, s], [s, -c]])


def is_orthogonal(m: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        return False
    return bool(np.max(np.abs(m.T @ m - np.eye(2))) <= tol)


def is_rotation(m: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    return is_orthogonal(m, tol) and abs(np.linalg.det(m) - 1.0) <= tol


def check_rotation(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if not is_rotation(m):
        raise NotARotationError(f"{name} is not a rotation: {m.tolist()}")
    return m


def angle_of(r: np.ndarray) -> float:
    """Rotation angle of a 2x2 rotation matrix, wrapped to ``(-pi, pi]``.

    Raises
    ------
    NotARotationError
        If ``r`` is not orthogonal with determinant +1 within ``ORTHO_TOL``.
    """
    r = check_rotation(r)
    return wrap_angle(math.atan2(r[1, 0], r[0, 0]))


def conjugate(o: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Return ``o.T @ p @ o`` for orthogonal ``o`` and rotation ``p``.

    In the plane this is ``p`` itself when ``o`` is a rotation and ``p.T``
    when ``o`` is a reflection.
    """
    o = np.asarray(o, dtype=float)
    if not is_orthogonal(o):
        raise NotARotationError(f"o is not orthogonal: {o.tolist()}")
    p = check_rotation(p, "p")
    return o.T @ p @ o
