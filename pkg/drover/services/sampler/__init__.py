"""Terrain-aware base pose sampling."""

from .pose_lifter import (
    SOURCE_ORDER,
    CandidateSource,
    LiftedPose,
    PoseCandidate,
    PoseLifter,
    level_pose,
    nearest_traversable,
)

__all__ = [
    "CandidateSource",
    "LiftedPose",
    "PoseCandidate",
    "PoseLifter",
    "SOURCE_ORDER",
    "level_pose",
    "nearest_traversable",
]
