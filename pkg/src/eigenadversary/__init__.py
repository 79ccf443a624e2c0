"""Numerical toolkit for eigenspace-based quantum query lower bounds on
K-fold search over weight-K inputs."""

from .combinatorics import WeightKBasis, enumerate_weight_k, full_twirl, conditional_twirl
from .johnson import decomposition, progress_coefficients, ProgressProfile
from .simulator import AlgorithmSpec, run, make_spec
from .verification import verify_cell

__all__ = [
    "WeightKBasis",
    "enumerate_weight_k",
    "full_twirl",
    "conditional_twirl",
    "decomposition",
    "progress_coefficients",
    "ProgressProfile",
    "AlgorithmSpec",
    "run",
    "make_spec",
    "verify_cell",
]
