"""Sections, correspondences, rigid transforms and the chain objective.

Point sets are ``(m, 2)`` float arrays, one landmark per row. Section
indices are 1-based: pair ``i`` links section ``i`` to section ``i + 1``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .so2 import ORTHO_TOL, angle_of, is_rotation, rot


class ChainValidationError(ValueError):
    """A section chain violates one or more structural invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid section chain: {lines}")


def as_points(points) -> np.ndarray:
    """Return a read-only ``(m, 2)`` float64 copy of ``points``."""
    arr = np.array(points, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"point set must have shape (m, 2), got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CorrespondencePair:
    """Matched landmarks between section ``index`` and ``index + 1``.

    ``forward`` lives in section ``index`` and ``backward`` in section
    ``index + 1``; row ``k`` of each is the same physical landmark.
    """

    index: int
    forward: np.ndarray
    backward: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "forward", as_points(self.forward))
        object.__setattr__(self, "backward", as_points(self.backward))

    @property
    def count(self) -> int:
        return self.forward.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CorrespondencePair):
            return NotImplemented
        return (
            self.index == other.index
            and np.array_equal(self.forward, other.forward)
            and np.array_equal(self.backward, other.backward)
        )


@dataclass(frozen=True, eq=False)
class SectionChain:
    n: int
    pairs: tuple[CorrespondencePair, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    @classmethod
    def from_arrays(cls, forwards, backwards) -> SectionChain:
        """Build a chain from parallel lists of forward/backward point sets."""
        if len(forwards) != len(backwards):
            raise ValueError("forwards and backwards differ in length")
        pairs = [
            CorrespondencePair(i + 1, f, b)
            for i, (f, b) in enumerate(zip(forwards, backwards))
        ]
        return cls(len(pairs) + 1, tuple(pairs))

    def __eq__(self, other):
        if not isinstance(other, SectionChain):
            return NotImplemented
        return self.n == other.n and self.pairs == other.pairs

    def all_points(self) -> np.ndarray:
        parts = [p.forward for p in self.pairs] + [p.backward for p in self.pairs]
        return np.concatenate(parts) if parts else np.zeros((0, 2))


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    pair: int | None = None
    point: int | None = None

    def __str__(self):
        return self.message


def validate_chain(chain: SectionChain) -> list[Violation]:
    """List every invariant violation in ``chain``; empty when well-formed."""
    out: list[Violation] = []
    if chain.n < 2:
        out.append(Violation("arity", f"chain needs at least 2 sections, got n={chain.n}"))
    if len(chain.pairs) != chain.n - 1:
        out.append(
            Violation(
                "arity",
                f"chain with n={chain.n} sections needs {chain.n - 1} pairs, got {len(chain.pairs)}",
            )
        )
    for k, pair in enumerate(chain.pairs, start=1):
        if pair.index != k:
            out.append(
                Violation("index", f"pair at position {k} has index {pair.index}", pair=pair.index)
            )
        mf, mb = pair.forward.shape[0], pair.backward.shape[0]
        if mf != mb:
            out.append(
                Violation(
                    "count",
                    f"pair {pair.index}: forward has {mf} points, backward has {mb}",
                    pair=pair.index,
                )
            )
        elif mf == 0:
            out.append(Violation("empty", f"pair {pair.index} has no points", pair=pair.index))
        for side in ("forward", "backward"):
            bad = np.flatnonzero(~np.all(np.isfinite(getattr(pair, side)), axis=1))
            for j in bad:
                out.append(
                    Violation(
                        "non_finite",
                        f"pair {pair.index} {side} point {j} has a non-finite coordinate",
                        pair=pair.index,
                        point=int(j),
                    )
                )
    return out


def check_chain(chain: SectionChain) -> SectionChain:
    violations = validate_chain(chain)
    if violations:
        raise ChainValidationError(violations)
    return chain


@dataclass(frozen=True, eq=False)
class RigidTransform2:
    """``p -> rotation @ p + translation`` with ``rotation`` in SO(2)."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(2))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        r = np.array(self.rotation, dtype=float)
        t = np.array(self.translation, dtype=float).reshape(-1)
        if r.shape != (2, 2) or not is_rotation(r, ORTHO_TOL):
            raise ValueError(f"rotation is not in SO(2): {r.tolist()}")
        if t.shape != (2,) or not np.all(np.isfinite(t)):
            raise ValueError(f"translation must be a finite 2-vector, got {t.tolist()}")
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> RigidTransform2:
        return cls()

    @classmethod
    def from_angle(cls, theta: float, translation=(0.0, 0.0)) -> RigidTransform2:
        return cls(rot(theta), translation)

    @property
    def angle(self) -> float:
        return angle_of(self.rotation)

    def is_identity(self) -> bool:
        """Exact (bitwise) identity check."""
        return bool(
            np.array_equal(self.rotation, np.eye(2)) and not np.any(self.translation)
        )

    def apply(self, points) -> np.ndarray:
        return apply_transform(self, points)

    def inverse(self) -> RigidTransform2:
        rt = self.rotation.T
        return RigidTransform2(rt, -rt @ self.translation)

    def compose(self, other: RigidTransform2) -> RigidTransform2:
        """``self`` after ``other``."""
        return RigidTransform2(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def __eq__(self, other):
        if not isinstance(other, RigidTransform2):
            return NotImplemented
        return np.array_equal(self.rotation, other.rotation) and np.array_equal(
            self.translation, other.translation
        )


def apply_transform(t: RigidTransform2, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return pts @ t.rotation.T + t.translation


@dataclass(frozen=True, eq=False)
class Registration(Sequence):
    """One rigid transform per section; the first and last are pinned.

    The endpoint transforms must be exactly the identity rotation and zero
    translation. Use a plain list of :class:`RigidTransform2` for unpinned
    results such as the sequential baseline.
    """

    transforms: tuple[RigidTransform2, ...]

    def __post_init__(self):
        ts = tuple(self.transforms)
        object.__setattr__(self, "transforms", ts)
        if len(ts) < 2:
            raise ValueError("a registration needs at least two transforms")
        for end, t in (("first", ts[0]), ("last", ts[-1])):
            if not t.is_identity():
                raise ValueError(f"{end} transform must be exactly the identity")

    @classmethod
    def from_arrays(cls, rotations, translations) -> Registration:
        return cls(tuple(RigidTransform2(r, t) for r, t in zip(rotations, translations)))

    @classmethod
    def identity(cls, n: int) -> Registration:
        return cls(tuple(RigidTransform2() for _ in range(n)))

    def __len__(self):
        return len(self.transforms)

    def __getitem__(self, i):
        return self.transforms[i]

    def __eq__(self, other):
        if not isinstance(other, Registration):
            return NotImplemented
        return self.transforms == other.transforms

    @property
    def rotations(self) -> np.ndarray:
        return np.stack([t.rotation for t in self.transforms])

    @property
    def translations(self) -> np.ndarray:
        return np.stack([t.translation for t in self.transforms])


def _check_arity(chain: SectionChain, transforms: Sequence[RigidTransform2]):
    if len(transforms) != chain.n:
        raise ValueError(
            f"chain has {chain.n} sections but {len(transforms)} transforms were given"
        )


def pair_residuals(chain: SectionChain, transforms: Sequence[RigidTransform2]) -> np.ndarray:
    """Squared Frobenius residual of each pair under ``transforms``."""
    _check_arity(chain, transforms)
    out = np.empty(len(chain.pairs))
    for k, pair in enumerate(chain.pairs):
        i = pair.index - 1
        diff = apply_transform(transforms[i], pair.forward) - apply_transform(
            transforms[i + 1], pair.backward
        )
        out[k] = np.sum(diff * diff)
    return out


def objective_value(chain: SectionChain, transforms: Sequence[RigidTransform2]) -> float:
    """Sum over pairs of squared distances between registered correspondences."""
    return float(np.sum(pair_residuals(chain, transforms)))
