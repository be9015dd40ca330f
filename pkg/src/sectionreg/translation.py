"""Closed-form translations for fixed rotations.

With ``Z_i = R_i X_{i,i+1} - R_{i+1} X_{i+1,i}`` and ``d_i = T_i - T_{i+1}``
the translation problem is

    minimize  sum_i || Z_i + d_i e_i ||_F^2   s.t.  sum_i d_i = 0

whose solution is ``d_i = -z_i / m_i + (1 / m_i) (sum_j z_j / m_j) / (sum_j 1 / m_j)``
with ``z_i`` the column sum of ``Z_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import SectionChain
from .so2 import check_rotation

# Absolute slack allowed on the zero-sum constraint, scaled by the delta size.
SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ResidualBlock:
    Z: np.ndarray
    m: int


@dataclass(frozen=True, eq=False)
class TranslationDeltas:
    deltas: np.ndarray


def residual_blocks(chain: SectionChain, rotations) -> list[ResidualBlock]:
    if len(rotations) != chain.n:
        raise ValueError(f"chain has {chain.n} sections but {len(rotations)} rotations")
    rs = [check_rotation(r, f"rotations[{k}]") for k, r in enumerate(rotations)]
    blocks = []
    for pair in chain.pairs:
        i = pair.index - 1
        z = pair.forward @ rs[i].T - pair.backward @ rs[i + 1].T
        blocks.append(ResidualBlock(z, pair.count))
    return blocks


def solve_deltas(blocks) -> TranslationDeltas:
    inv_m = np.array([1.0 / b.m for b in blocks])
    zsum = np.stack([b.Z.sum(axis=0) for b in blocks])
    pooled = (inv_m[:, None] * zsum).sum(axis=0) / inv_m.sum()
    deltas = -inv_m[:, None] * zsum + inv_m[:, None] * pooled
    return TranslationDeltas(deltas)


def accumulate(deltas: TranslationDeltas) -> np.ndarray:
    """Section translations from ``T_1 = 0`` and ``T_{i+1} = T_i - d_i``."""
    d = np.asarray(deltas.deltas, dtype=float)
    total = d.sum(axis=0)
    scale = max(1.0, float(np.max(np.abs(d), initial=0.0)))
    if np.max(np.abs(total)) > SUM_TOL * scale:
        raise ValueError(f"translation deltas do not sum to zero: {total.tolist()}")
    return np.vstack([np.zeros(2), -np.cumsum(d, axis=0)])


def solve_translations(chain: SectionChain, rotations) -> np.ndarray:
    """``(n, 2)`` optimal translations given section rotations."""
    return accumulate(solve_deltas(residual_blocks(chain, rotations)))
