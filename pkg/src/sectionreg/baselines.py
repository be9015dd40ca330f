"""Sequential pairwise registration, the drift-prone reference method."""

from __future__ import annotations

import numpy as np

from .chain import RigidTransform2, SectionChain, check_chain
from .rotation import centralize, cross_covariance, pairwise_factor


def pairwise_register(forward, backward) -> RigidTransform2:
    """Least-squares rigid transform mapping ``backward`` onto ``forward``."""
    forward = np.asarray(forward, dtype=float)
    backward = np.asarray(backward, dtype=float)
    if forward.shape != backward.shape:
        raise ValueError(f"point count mismatch: {forward.shape[0]} vs {backward.shape[0]}")
    f_hat, f_c = centralize(forward)
    b_hat, b_c = centralize(backward)
    r = pairwise_factor(cross_covariance(b_hat, f_hat)).base
    return RigidTransform2(r, f_c - r @ b_c)


def sequential_solve(chain: SectionChain) -> list[RigidTransform2]:
    """Chain pairwise solutions outward from section 1.

    Section ``i + 1`` is registered onto section ``i`` and the result is
    composed onto section ``i``'s accumulated transform. Nothing pins the
    last section, so pairwise errors accumulate along the chain.
    """
    check_chain(chain)
    out = [RigidTransform2()]
    for pair in chain.pairs:
        out.append(out[-1].compose(pairwise_register(pair.forward, pair.backward)))
    return out
