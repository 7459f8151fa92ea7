"""Reeds-Shepp steering between planar poses."""

from .paths import (
    Direction,
    RSPath,
    RSSegment,
    SE2Pose,
    Steer,
    all_paths,
    discretize,
    interpolate,
    shortest_path,
    truncate,
    wrap_angle,
)
from .words import WORDS

__all__ = [
    "Direction",
    "RSPath",
    "RSSegment",
    "SE2Pose",
    "Steer",
    "WORDS",
    "all_paths",
    "discretize",
    "interpolate",
    "shortest_path",
    "truncate",
    "wrap_angle",
]
