"""Data models for drover.

This package contains Pydantic models for type-safe configuration and file
structures used throughout the application.
"""

from .config import (
    AppConfig,
    FinalizeConfig,
    PlannerConfig,
    PreprocessingConfig,
    RefineConfig,
    RoadmapConfig,
    SamplerConfig,
    SolverConfig,
    SweepConfig,
    TerrainSpec,
    TraversabilityParams,
)
from .enums import InterpolationMethod, PrimitiveShape, SeedMode, TerrainFamily
from .plan import (
    OuterIterationRecord,
    PhaseRecord,
    PlanFile,
    PlannerMetrics,
    RefinementReport,
    RunManifest,
    StateRecord,
)
from .robot import BaseSpec, JointSpec, LimbSpec, PrimitiveSpec, RobotSpec

__all__ = [
    # Configuration models
    "AppConfig",
    "FinalizeConfig",
    "PlannerConfig",
    "PreprocessingConfig",
    "RefineConfig",
    "RoadmapConfig",
    "SamplerConfig",
    "SolverConfig",
    "SweepConfig",
    "TerrainSpec",
    "TraversabilityParams",
    # Enumerations
    "InterpolationMethod",
    "PrimitiveShape",
    "SeedMode",
    "TerrainFamily",
    # File models
    "OuterIterationRecord",
    "PhaseRecord",
    "PlanFile",
    "PlannerMetrics",
    "RefinementReport",
    "RunManifest",
    "StateRecord",
    # Robot description
    "BaseSpec",
    "JointSpec",
    "LimbSpec",
    "PrimitiveSpec",
    "RobotSpec",
]
