"""Enumerations shared across models and services."""

from enum import Enum


class InterpolationMethod(str, Enum):
    """Grid-map interpolation schemes."""

    NEAREST = "nearest"
    LINEAR = "linear"
    BICUBIC = "bicubic"
    BICUBIC_CONVOLUTION = "bicubic_convolution"


class TerrainFamily(str, Enum):
    """Procedural benchmark terrain families."""

    FLAT = "flat"
    ROUGH = "rough"
    GAP = "gap"
    STEP = "step"
    HOLE = "hole"
    RAMP = "ramp"
    WALL = "wall"


class SeedMode(str, Enum):
    """Where the refinement stage takes its initial trajectory from."""

    INIT = "init"
    LINEAR = "linear"


class PrimitiveShape(str, Enum):
    """Collision primitive shapes."""

    SPHERE = "sphere"
    CAPSULE = "capsule"
    CYLINDER = "cylinder"
