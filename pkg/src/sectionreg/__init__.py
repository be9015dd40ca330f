"""Simultaneous rigid registration of serial-section landmark chains.

The first and last sections are held fixed; every other section's rotation
and translation is estimated in one non-iterative pass.
"""

from .baselines import pairwise_register, sequential_solve
from .chain import (
    ChainValidationError,
    CorrespondencePair,
    Registration,
    RigidTransform2,
    SectionChain,
    apply_transform,
    objective_value,
    validate_chain,
)
from .pipeline import SolveReport, nsrr_solve
from .synthetic import GroundTruthChain, NoiseSpec, epe, generate, mse, noise_sweep

__all__ = [
    "ChainValidationError",
    "CorrespondencePair",
    "GroundTruthChain",
    "NoiseSpec",
    "Registration",
    "RigidTransform2",
    "SectionChain",
    "SolveReport",
    "apply_transform",
    "epe",
    "generate",
    "mse",
    "noise_sweep",
    "nsrr_solve",
    "objective_value",
    "pairwise_register",
    "sequential_solve",
    "validate_chain",
]

__version__ = "0.1.0"
