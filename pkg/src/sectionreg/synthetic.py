"""Synthetic section chains with known ground truth, plus accuracy metrics.

A base shape is cut into ``sections`` consecutive pieces along its x-axis.
Adjacent pieces share a window of landmarks ``S_i`` straddling their
boundary. Section ``i`` is moved by a rigid transform ``(r_i, t_i)``, so the
observed pair is ``X_{i,i+1} = r_i S_i + t_i`` and
``X_{i+1,i} = r_{i+1} S_i + t_{i+1}``, each optionally perturbed by noise
proportional to the coordinate. The first and last sections are never moved.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .chain import CorrespondencePair, Registration, RigidTransform2, SectionChain, apply_transform
from .pipeline import nsrr_solve


@dataclass(frozen=True)
class NoiseSpec:
    ratio: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.ratio) or self.ratio < 0:
            raise ValueError(f"noise ratio must be finite and >= 0, got {self.ratio}")


@dataclass(frozen=True)
class TransformMagnitudes:
    """Bounds for the random section motions.

    Rotations are uniform in ``[-max_rotation, max_rotation]`` about the base
    shape's centroid, followed by a shift uniform per axis within
    ``max_shift_fraction`` of the shape diameter.
    """

    max_rotation: float = math.pi / 4
    max_shift_fraction: float = 0.1


@dataclass(frozen=True, eq=False)
class GroundTruthChain:
    chain: SectionChain
    true_transforms: tuple[RigidTransform2, ...]
    shared_sets: tuple[np.ndarray, ...]
    seed: int

    def registration(self) -> Registration:
        """The registration that undoes every section motion exactly."""
        inner = [t.inverse() for t in self.true_transforms[1:-1]]
        return Registration((RigidTransform2(), *inner, RigidTransform2()))


def fish_outline(num_points: int = 400, size: float = 800.0, center=(512.0, 512.0)) -> np.ndarray:
    """Sample the fish curve ``x = cos t - sin^2 t / sqrt 2, y = cos t sin t``.

    The curve is scaled so its width is ``size`` pixels and centred at
    ``center``, i.e. it sits in the positive quadrant like image
    coordinates.
    """
    if num_points < 1:
        raise ValueError("num_points must be >= 1")
    t = np.linspace(0.0, 2.0 * math.pi, num_points, endpoint=False)
    x = np.cos(t) - np.sin(t) ** 2 / math.sqrt(2.0)
    y = np.cos(t) * np.sin(t)
    pts = np.column_stack([x, y])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pts = (pts - (lo + hi) / 2.0) * (size / (hi[0] - lo[0]))
    return pts + np.asarray(center, dtype=float)


def diameter(points) -> float:
    """Largest distance between any two points."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.sum(d * d, axis=-1))))


def chain_diameter(chain: SectionChain) -> float:
    pts = chain.all_points()
    # bounding-box diagonal: bounds the true diameter within sqrt(2), O(m)
    return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))) if len(pts) else 0.0


def _overlap_windows(base: np.ndarray, sections: int, k: int) -> list[np.ndarray]:
    order = np.argsort(base[:, 0], kind="stable")
    m = len(base)
    windows = []
    for i in range(1, sections):
        boundary = round(i * m / sections)
        start = min(max(boundary - k // 2, 0), m - k)
        windows.append(base[order[start:start + k]])
    return windows


def generate(
    sections: int,
    points_per_overlap: int,
    base_shape=None,
    magnitudes: TransformMagnitudes = TransformMagnitudes(),
    noise: NoiseSpec = NoiseSpec(),
) -> GroundTruthChain:
    """Draw a random chain with known section motions.

    Deterministic given ``noise.seed``. Noise is zero-mean Gaussian with
    standard deviation ``noise.ratio * |coordinate|``, drawn independently for
    every observed coordinate.
    """
    if sections < 2:
        raise ValueError("sections must be >= 2")
    if points_per_overlap < 1:
        raise ValueError("points_per_overlap must be >= 1")
    base = fish_outline() if base_shape is None else np.asarray(base_shape, dtype=float)
    if base.ndim != 2 or base.shape[1] != 2 or len(base) == 0:
        raise ValueError("base_shape must be a non-empty (m, 2) array")
    if points_per_overlap > len(base):
        raise ValueError(
            f"points_per_overlap={points_per_overlap} exceeds base shape size {len(base)}"
        )

    rng = np.random.default_rng(noise.seed)
    pivot = base.mean(axis=0)
    shift = magnitudes.max_shift_fraction * diameter(base)
    transforms = [RigidTransform2()]
    for _ in range(sections - 2):
        angle = rng.uniform(-magnitudes.max_rotation, magnitudes.max_rotation)
        t = RigidTransform2.from_angle(angle)
        offset = rng.uniform(-shift, shift, 2)
        transforms.append(RigidTransform2(t.rotation, pivot - t.rotation @ pivot + offset))
    transforms.append(RigidTransform2())

    shared = _overlap_windows(base, sections, points_per_overlap)
    pairs = []
    for i, s in enumerate(shared):
        fwd = apply_transform(transforms[i], s)
        bwd = apply_transform(transforms[i + 1], s)
        if noise.ratio > 0:
            fwd = fwd + rng.normal(size=fwd.shape) * noise.ratio * np.abs(fwd)
            bwd = bwd + rng.normal(size=bwd.shape) * noise.ratio * np.abs(bwd)
        pairs.append(CorrespondencePair(i + 1, fwd, bwd))
    return GroundTruthChain(
        SectionChain(sections, tuple(pairs)),
        tuple(transforms),
        tuple(np.array(s) for s in shared),
        noise.seed,
    )


def _check(chain: SectionChain, transforms: Sequence[RigidTransform2]):
    if len(transforms) != chain.n:
        raise ValueError(f"chain has {chain.n} sections but {len(transforms)} transforms")


def mse(transforms: Sequence[RigidTransform2], truth: GroundTruthChain) -> float:
    """Mean squared distance from each registered landmark to its true position."""
    chain = truth.chain
    _check(chain, transforms)
    if len(truth.shared_sets) != len(chain.pairs):
        raise ValueError("truth has a different number of shared sets than pairs")
    total, count = 0.0, 0
    for pair, s in zip(chain.pairs, truth.shared_sets):
        i = pair.index - 1
        for t, pts in ((transforms[i], pair.forward), (transforms[i + 1], pair.backward)):
            d = apply_transform(t, pts) - s
            total += float(np.sum(d * d))
            count += len(s)
    return total / count


def epe(chain: SectionChain, transforms: Sequence[RigidTransform2]) -> float:
    """Mean distance between the two registered positions of each correspondence."""
    _check(chain, transforms)
    total, count = 0.0, 0
    for pair in chain.pairs:
        i = pair.index - 1
        d = apply_transform(transforms[i], pair.forward) - apply_transform(
            transforms[i + 1], pair.backward
        )
        total += float(np.sum(np.sqrt(np.sum(d * d, axis=1))))
        count += pair.count
    return total / count


@dataclass(frozen=True)
class SweepRow:
    noise_ratio: float
    mean_mse: float
    std_mse: float
    mean_mse_unregistered: float


SWEEP_HEADER = ("noise_ratio", "mean_mse", "std_mse", "mean_mse_unregistered")


def trial_seed(master_seed: int, ratio_index: int, trial: int) -> int:
    return int(np.random.SeedSequence([master_seed, ratio_index, trial]).generate_state(1)[0])


def noise_sweep(
    ratios,
    trials: int = 20,
    seed: int = 0,
    sections: int = 8,
    points_per_overlap: int = 20,
    base_shape=None,
    magnitudes: TransformMagnitudes = TransformMagnitudes(),
) -> list[SweepRow]:
    """Mean registration MSE against noise ratio.

    Trial ``t`` at ratio index ``r`` draws its chain from
    ``trial_seed(seed, r, t)``, so every row is reproducible on its own.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for r_idx, ratio in enumerate(ratios):
        if ratio < 0:
            raise ValueError(f"negative noise ratio {ratio}")
        errs, raw = [], []
        for t in range(trials):
            gt = generate(
                sections,
                points_per_overlap,
                base_shape,
                magnitudes,
                NoiseSpec(float(ratio), trial_seed(seed, r_idx, t)),
            )
            reg, _ = nsrr_solve(gt.chain)
            errs.append(mse(reg, gt))
            raw.append(mse(Registration.identity(sections), gt))
        rows.append(
            SweepRow(float(ratio), float(np.mean(errs)), float(np.std(errs)), float(np.mean(raw)))
        )
    return rows


def write_sweep_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow([repr(row.noise_ratio), repr(row.mean_mse), repr(row.std_mse),
                    repr(row.mean_mse_unregistered)])
