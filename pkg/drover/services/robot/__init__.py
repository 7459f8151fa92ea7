"""Parameterized legged-wheeled robot model."""

from pathlib import Path
from typing import Union

from ..configuration import ConfigurationLoader
from .collision import (
    BASE_OWNER,
    CollisionModel,
    min_pair_distance,
    primitive_distance,
    segment_closest_points,
    segment_distance,
)
from .kinematics import LimbFrames, LimbKinematics, axis_rotation, skew
from .model import GRAVITY_UP, Pose3, RobotModel, WholeBodyState
from .stability import support_margin, support_polygon_contains


def load_robot_model(path: Union[str, Path]) -> RobotModel:
    """Read a robot description file into a ``RobotModel``."""
    return RobotModel(ConfigurationLoader().load_robot_spec(Path(path)))


__all__ = [
    "BASE_OWNER",
    "CollisionModel",
    "GRAVITY_UP",
    "LimbFrames",
    "LimbKinematics",
    "Pose3",
    "RobotModel",
    "WholeBodyState",
    "axis_rotation",
    "load_robot_model",
    "min_pair_distance",
    "primitive_distance",
    "segment_closest_points",
    "segment_distance",
    "skew",
    "support_margin",
    "support_polygon_contains",
]
