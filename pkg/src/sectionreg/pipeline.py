"""End-to-end simultaneous rigid registration of a section chain."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .chain import Registration, SectionChain, check_chain, pair_residuals
from .rotation import AngleSolution, estimate_rotations
from .translation import solve_translations


@dataclass(frozen=True, eq=False)
class SolveReport:
    objective_before: float
    objective_after: float
    per_pair_residuals: np.ndarray
    angle_solution: AngleSolution
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "objective_before": self.objective_before,
            "objective_after": self.objective_after,
            "per_pair_residuals": self.per_pair_residuals.tolist(),
            "angle_solution": {
                "thetas": self.angle_solution.thetas.tolist(),
                "objective": self.angle_solution.objective,
            },
            "wall_time": self.wall_time,
        }


def nsrr_solve(chain: SectionChain) -> tuple[Registration, SolveReport]:
    """Register every section at once with the first and last held fixed.

    Rotations come from the constrained angle problem, translations from the
    closed form given those rotations. The first and last sections are
    assumed to already sit in their correct positions; if they do not, the
    solve still runs and the report shows the residual.

    Raises
    ------
    ChainValidationError
        If ``chain`` is malformed.
    """
    t0 = time.perf_counter()
    check_chain(chain)
    est = estimate_rotations(chain)
    trans = solve_translations(chain, est.rotations)
    # The accumulated last translation is zero up to rounding; pin it.
    trans[-1] = 0.0
    reg = Registration.from_arrays(est.rotations, trans)
    wall = time.perf_counter() - t0

    residuals = pair_residuals(chain, reg)
    before = float(np.sum(pair_residuals(chain, Registration.identity(chain.n))))
    report = SolveReport(before, float(residuals.sum()), residuals, est.solution, wall)
    return reg, report
