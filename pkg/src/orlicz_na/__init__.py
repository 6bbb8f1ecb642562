"""Generalized Orlicz balls: construction, sampling and numerical
verification of negative-association and concentration inequalities."""

from ._kernels import backend_name
from .young import (
    EMPTY,
    EmptyBall,
    OrliczBall,
    YoungFunction,
    membership,
    properize,
    restrict_hyperplane,
    restrict_interval,
    section_ball,
    validate_young,
    young_eval,
)

__all__ = [
    "EMPTY",
    "EmptyBall",
    "OrliczBall",
    "YoungFunction",
    "backend_name",
    "membership",
    "properize",
    "restrict_hyperplane",
    "restrict_interval",
    "section_ball",
    "validate_young",
    "young_eval",
]

__version__ = "0.1.0"
