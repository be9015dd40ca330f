"""Simultaneous rotation estimation for a section chain.

Each pair contributes a cross-covariance ``A_i`` whose SVD gives the
pairwise-optimal rotation ``B_i`` and a weight ``c_i``. Writing the relative
rotation as ``W_i = rot(theta_i) @ B_i`` turns the chain problem into

    minimize  sum_i -c_i cos(theta_i)
    s.t.      sum_i theta_i = -theta   (mod 2 pi)

where ``theta`` is the rotation angle of ``prod_i B_i``. Section rotations
are then ``R_1 = I`` and ``R_{i+1} = R_i @ W_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import SectionChain, check_chain
from .so2 import TWO_PI, angle_of, check_rotation, rot, wrap_angle

# A pair whose largest singular value is at or below this is treated as
# carrying no rotational information (e.g. a single correspondence).
DEGENERATE_SIGMA = 1e-300

NEWTON_MAX_ITER = 200
NEWTON_GTOL = 1e-12
N_RANDOM_STARTS = 8
ANGLE_SEED = 0


class ClosureError(ArithmeticError):
    """The composed rotations fail to return to the identity."""


def centralize(points) -> tuple[np.ndarray, np.ndarray]:
    """Shift ``points`` so their centroid is at the origin.

    Returns the centered ``(m, 2)`` array and the centroid.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 1:
        raise ValueError("cannot centralize an empty point set")
    centroid = pts.mean(axis=0)
    return pts - centroid, centroid


def cross_covariance(backward_hat, forward_hat) -> np.ndarray:
    """``sum_k backward_k forward_k^T`` for centered correspondences."""
    b = np.asarray(backward_hat, dtype=float)
    f = np.asarray(forward_hat, dtype=float)
    if b.shape != f.shape:
        raise ValueError(f"point count mismatch: {b.shape[0]} vs {f.shape[0]}")
    return b.T @ f


@dataclass(frozen=True, eq=False)
class PairRotationData:
    """SVD factors of one pair's cross-covariance ``A = U S V^T``.

    ``base = V C U^T`` maximizes ``tr(W A)`` over rotations ``W`` and
    ``weight = tr(C S)`` is the value of that maximum.
    """

    A: np.ndarray
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    C: np.ndarray
    base: np.ndarray
    weight: float


def pairwise_factor(a) -> PairRotationData:
    a = np.asarray(a, dtype=float)
    u, s, vt = np.linalg.svd(a)
    if s[0] <= DEGENERATE_SIGMA:
        eye = np.eye(2)
        return PairRotationData(a, eye, np.diag(s), eye, eye, eye, 0.0)
    # Flipping the second singular vectors on both sides leaves U S V^T and
    # det(V U^T) unchanged; do it so det(U) = +1 on every platform.
    if np.linalg.det(u) < 0:
        u = u * np.array([1.0, -1.0])
        vt = vt * np.array([[1.0], [-1.0]])
    v = vt.T
    d = 1.0 if np.linalg.det(v @ u.T) > 0 else -1.0
    c = np.diag([1.0, d])
    base = v @ c @ u.T
    weight = float(s[0] + d * s[1])
    return PairRotationData(a, u, np.diag(s), v, c, base, max(weight, 0.0))


def defect_angle(bases) -> float:
    """Rotation angle of the left-to-right product of ``bases``."""
    prod = np.eye(2)
    for k, b in enumerate(bases):
        prod = prod @ check_rotation(b, f"bases[{k}]")
    return angle_of(prod)


@dataclass(frozen=True, eq=False)
class AngleProblem:
    weights: np.ndarray
    defect: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size == 0:
            raise ValueError("angle problem needs at least one weight")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if not math.isfinite(self.defect):
            raise ValueError("defect must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "defect", wrap_angle(self.defect))


@dataclass(frozen=True, eq=False)
class AngleSolution:
    thetas: np.ndarray
    objective: float


def angle_objective(weights, thetas) -> float:
    return float(-np.sum(np.asarray(weights) * np.cos(thetas)))


def _newton(c: np.ndarray, target: float, x: np.ndarray) -> tuple[np.ndarray, float]:
    """Damped Newton on the free angles ``x``; the last angle is eliminated.

    ``theta = (x, target - sum(x))``. Steps are taken in the tangent space of
    the constraint, where the Hessian is diagonal, so each costs O(k).
    """
    gtol = NEWTON_GTOL * max(1.0, float(c.max()))
    floor = 1e-9 * float(c.max())

    def full(x):
        return np.append(x, target - x.sum())

    def f(theta):
        return -float(c @ np.cos(theta))

    theta = full(x)
    fx = f(theta)
    for _ in range(NEWTON_MAX_ITER):
        g = c * np.sin(theta)
        if np.max(np.abs(g[:-1] - g[-1])) < gtol:
            break
        h = c * np.cos(theta)
        neg = np.count_nonzero(h < 0)
        # the tangent-space Hessian is PD iff no curvature is negative, or
        # exactly one is and sum(1 / h) < 0
        if np.all(np.abs(h) > floor) and (neg == 0 or (neg == 1 and np.sum(1.0 / h) < 0)):
            hh = h
        else:
            hh = np.maximum(np.abs(h), floor)
        mu = -np.sum(g / hh) / np.sum(1.0 / hh)
        step = -(g + mu) / hh
        if g @ step >= 0:
            break
        t = 1.0
        while True:
            xn = theta[:-1] + t * step[:-1]
            tn = full(xn)
            fn = f(tn)
            if fn <= fx:
                break
            t *= 0.5
            if t < 1e-20:
                return theta[:-1], fx
        if np.array_equal(xn, theta[:-1]):
            break
        theta, fx = tn, fn
    return theta[:-1], fx


def solve_angles(problem: AngleProblem) -> AngleSolution:
    """Minimize ``sum -c_i cos(theta_i)`` subject to ``sum theta_i = -defect``.

    Runs damped Newton from several deterministic starts (all zeros, the
    uniform split, and seeded random points) against the targets
    ``-defect + 2 pi k`` for ``k in {-1, 0, 1}`` and keeps the best result.
    Zero-weight angles are free, so when any exist they absorb the whole
    defect and the rest stay at zero.
    """
    c = problem.weights
    k = c.size
    target0 = -problem.defect

    zero = np.flatnonzero(c == 0.0)
    if zero.size:
        thetas = np.zeros(k)
        thetas[zero[0]] = target0
    elif k == 1:
        thetas = np.array([target0])
    else:
        rng = np.random.default_rng(ANGLE_SEED)
        randoms = [rng.uniform(-math.pi, math.pi, k - 1) for _ in range(N_RANDOM_STARTS)]
        best = None
        for shift in (0, -1, 1):
            target = target0 + shift * TWO_PI
            starts = [np.zeros(k - 1), np.full(k - 1, target / k), *randoms]
            for x0 in starts:
                x, fx = _newton(c, target, x0.copy())
                if best is None or fx < best[1]:
                    best = (np.append(x, target - x.sum()), fx)
        thetas = best[0]
    thetas = wrap_angle(thetas)
    return AngleSolution(thetas, angle_objective(c, thetas))


def compose_chain(bases, thetas) -> list[np.ndarray]:
    """Section rotations ``R_1..R_n`` from ``W_i = rot(theta_i) @ base_i``."""
    if len(bases) != len(thetas):
        raise ValueError(f"{len(bases)} bases but {len(thetas)} angles")
    rs = [np.eye(2)]
    for b, t in zip(bases, thetas):
        rs.append(rs[-1] @ (rot(t) @ b))
    return rs


@dataclass(frozen=True, eq=False)
class RotationEstimate:
    rotations: list[np.ndarray]
    factors: list[PairRotationData]
    problem: AngleProblem
    solution: AngleSolution


def estimate_rotations(chain: SectionChain) -> RotationEstimate:
    check_chain(chain)
    factors = []
    for pair in chain.pairs:
        f_hat, _ = centralize(pair.forward)
        b_hat, _ = centralize(pair.backward)
        factors.append(pairwise_factor(cross_covariance(b_hat, f_hat)))
    bases = [f.base for f in factors]
    problem = AngleProblem([f.weight for f in factors], defect_angle(bases))
    solution = solve_angles(problem)
    rs = compose_chain(bases, solution.thetas)
    closure = np.max(np.abs(rs[-1] - np.eye(2)))
    if closure > 1e-9:
        raise ClosureError(f"last rotation misses the identity by {closure:.3g}")
    rs[-1] = np.eye(2)
    return RotationEstimate(rs, factors, problem, solution)


def solve_rotations(chain: SectionChain) -> list[np.ndarray]:
    """Rotations ``R_1..R_n`` with ``R_1 = R_n = I`` for a valid chain."""
    return estimate_rotations(chain).rotations
