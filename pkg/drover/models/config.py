"""Configuration models for drover.

This module defines Pydantic models for type-safe configuration management.
Every module of the pipeline owns one section; ``AppConfig`` aggregates them
and mirrors the layout of ``config.yaml``.
"""

import math
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .enums import InterpolationMethod, SeedMode, TerrainFamily


class TraversabilityParams(BaseModel):
    """Thresholds that separate traversable from untraversable cells."""

    max_slope: float = Field(
        default=math.radians(30.0),
        description="Maximum terrain inclination in radians")
    height_diff_threshold: float = Field(
        default=0.15,
        description="Allowed gap between raw and small-radius smoothed elevation (m)")
    sdf_margin: float = Field(
        default=0.3,
        description="Minimum signed distance of a contact to untraversable terrain (m)")
    missing_margin: float = Field(
        default=0.3,
        description="Cells this close to missing elevation are untraversable (m)")

    @field_validator("max_slope")
    @classmethod
    def validate_max_slope(cls, v: float) -> float:
        """Ensure the slope limit is a proper angle."""
        if not 0.0 < v < math.pi / 2:
            raise ValueError("max_slope must lie in (0, pi/2)")
        return v

    @field_validator("height_diff_threshold", "sdf_margin")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Ensure distances are positive."""
        if v <= 0:
            raise ValueError("Distances must be positive")
        return v

    @field_validator("missing_margin")
    @classmethod
    def validate_margin(cls, v: float) -> float:
        """Zero disables the rim band."""
        if v < 0:
            raise ValueError("missing_margin must be non-negative")
        return v


class PreprocessingConfig(BaseModel):
    """Map pre-processing settings."""

    r_small: float = Field(default=0.3, description="Small plane-fit radius (m)")
    r_large: float = Field(default=2.5, description="Large plane-fit radius (m)")
    traversability: TraversabilityParams = Field(default_factory=TraversabilityParams)
    fill_missing: bool = Field(
        default=True,
        description="Write a nearest-neighbour filled elevation layer")

    @field_validator("r_small", "r_large")
    @classmethod
    def validate_radius(cls, v: float) -> float:
        """Radii must be non-negative (zero fails later for lack of support)."""
        if v < 0:
            raise ValueError("Radii must be non-negative")
        return v


class TerrainSpec(BaseModel):
    """Procedural terrain description."""

    family: TerrainFamily = Field(default=TerrainFamily.FLAT, description="Terrain family")
    difficulty: float = Field(default=0.0, description="Difficulty in [0, 1]")
    seed: int = Field(default=0, description="Generator seed")
    extent: Tuple[float, float] = Field(
        default=(30.0, 16.0), description="Map size along x and y (m)")
    resolution: float = Field(default=0.1, description="Cell size (m)")

    @field_validator("difficulty")
    @classmethod
    def validate_difficulty(cls, v: float) -> float:
        """Difficulty is a normalized scalar."""
        if not 0.0 <= v <= 1.0:
            raise ValueError("difficulty must lie in [0, 1]")
        return v

    @field_validator("resolution")
    @classmethod
    def validate_resolution(cls, v: float) -> float:
        """Ensure cells have a size."""
        if v <= 0:
            raise ValueError("resolution must be positive")
        return v

    @field_validator("extent")
    @classmethod
    def validate_extent(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        """Ensure the map has an area."""
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError("extent must be positive")
        return v


class RoadmapConfig(BaseModel):
    """Limb roadmap construction settings."""

    leg_vertices: int = Field(default=300, description="Vertices per leg roadmap")
    arm_vertices: int = Field(default=3000, description="Vertices of the arm roadmap")
    k_neighbors: int = Field(default=10, description="Connection attempts per vertex")
    leg_d_max: float = Field(default=0.3, description="Maximum leg edge length (m)")
    arm_d_max: float = Field(default=1.0, description="Maximum arm edge length (m)")
    edge_step: float = Field(
        default=0.05, description="Joint step for edge collision checks (rad)")
    grounded_threshold: int = Field(
        default=1, description="Candidates needed to call a limb grounded")
    seed: int = Field(default=0, description="Sampling seed")

    @field_validator("leg_vertices", "arm_vertices")
    @classmethod
    def validate_vertex_count(cls, v: int) -> int:
        """Roadmaps need a minimum density."""
        if v < 10:
            raise ValueError("Roadmaps need at least 10 vertices")
        return v

    @field_validator("k_neighbors", "grounded_threshold")
    @classmethod
    def validate_positive_integers(cls, v: int) -> int:
        """Ensure counts are positive."""
        if v < 1:
            raise ValueError("Counts must be positive integers")
        return v

    @field_validator("leg_d_max", "arm_d_max", "edge_step")
    @classmethod
    def validate_positive_lengths(cls, v: float) -> float:
        """Ensure lengths are positive."""
        if v <= 0:
            raise ValueError("Lengths must be positive")
        return v


class SamplerConfig(BaseModel):
    """Pose lifting settings."""

    w_grounded: float = Field(default=10.0, description="Cost per ungrounded leg")
    w_tilt: float = Field(default=1.0, description="Cost per squared radian of roll/pitch")
    interpolation: InterpolationMethod = Field(
        default=InterpolationMethod.LINEAR,
        description="Interpolation used to read heights and normals")

    @field_validator("w_grounded", "w_tilt")
    @classmethod
    def validate_weights(cls, v: float) -> float:
        """Weights are non-negative."""
        if v < 0:
            raise ValueError("Cost weights must be non-negative")
        return v


class PlannerConfig(BaseModel):
    """Initialization-stage RRT settings."""

    max_connection_length: float = Field(default=10.0, description="Steering cap (m)")
    subnode_step: float = Field(default=0.2, description="Subnode spacing (m)")
    turning_radius: float = Field(default=4.0, description="Minimum turning radius (m)")
    time_budget: float = Field(default=4.0, description="Wall-clock budget (s)")
    max_iterations: Optional[int] = Field(
        default=None,
        description="Iteration budget; replaces the wall clock when set")
    goal_bias: float = Field(default=0.05, description="Goal sampling probability")
    connect_cost_weights: Tuple[float, float] = Field(
        default=(1.0, 2.0),
        description="Nearest-node metric weights (per m, per rad)")
    stepping_penalty: float = Field(default=0.0, description="Cost per contact change")
    rewire_neighbors: int = Field(default=6, description="Nodes considered for rewiring")
    seed: int = Field(default=0, description="Sampling seed")

    @field_validator("max_connection_length", "subnode_step", "turning_radius", "time_budget")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Ensure lengths and budgets are positive."""
        if v <= 0:
            raise ValueError("Planner lengths and budgets must be positive")
        return v

    @field_validator("goal_bias")
    @classmethod
    def validate_probability(cls, v: float) -> float:
        """Goal bias is a probability."""
        if not 0.0 <= v <= 1.0:
            raise ValueError("goal_bias must lie in [0, 1]")
        return v

    @field_validator("stepping_penalty")
    @classmethod
    def validate_penalty(cls, v: float) -> float:
        """Penalties are non-negative."""
        if v < 0:
            raise ValueError("stepping_penalty must be non-negative")
        return v

    @field_validator("max_iterations")
    @classmethod
    def validate_iterations(cls, v: Optional[int]) -> Optional[int]:
        """Iteration caps are positive when given."""
        if v is not None and v < 1:
            raise ValueError("max_iterations must be positive")
        return v


class FinalizeConfig(BaseModel):
    """Post-processing settings of the initialization stage."""

    base_speed: float = Field(default=0.25, description="Base speed along the path (m/s)")
    min_phase_duration: float = Field(default=1.0, description="Minimum phase duration (s)")
    arm_motion_threshold: float = Field(
        default=0.05,
        description="Joint-space distance above which the arm counts as moving (rad)")

    @field_validator("base_speed", "min_phase_duration", "arm_motion_threshold")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Ensure timing values are positive."""
        if v <= 0:
            raise ValueError("Timing values must be positive")
        return v


class SolverConfig(BaseModel):
    """Penalty solver settings of the refinement stage."""

    clip_threshold: float = Field(
        default=10.0, description="Norm cap on each terrain-derived gradient term")
    initial_weight: float = Field(default=1.0, description="Initial penalty weight")
    growth_factor: float = Field(default=5.0, description="Penalty growth per outer loop")
    max_outer_iterations: int = Field(default=12, description="Outer loop cap")
    max_inner_iterations: int = Field(default=400, description="Gradient steps per outer loop")
    contact_height_tol: float = Field(default=0.02, description="ContactHeight tolerance (m)")
    rolling_tol: float = Field(default=0.01, description="Rolling tolerance (m per knot)")
    traversability_tol: float = Field(default=0.0, description="Traversability tolerance (m)")
    collision_tol: float = Field(default=0.0, description="Collision tolerance (m)")
    joint_limit_tol: float = Field(default=1e-9, description="Joint-limit tolerance (rad)")
    d_min: float = Field(default=0.15, description="Minimum primitive distance (m)")
    proximal_weight: float = Field(
        default=1.0, description="Pull towards the previous outer iterate")
    hinge_margin: float = Field(
        default=0.01, description="Inner margin applied to hinge constraints (m)")
    terrain_fd_step: float = Field(
        default=1e-5, description="Central-difference step on terrain layers (m)")
    armijo_c: float = Field(default=1e-4, description="Sufficient-decrease constant")
    backtrack: float = Field(default=0.5, description="Step shrink factor")
    initial_step: float = Field(default=1.0, description="First trial step length")
    min_step: float = Field(default=1e-12, description="Smallest trial step length")

    @field_validator("clip_threshold", "initial_weight", "d_min", "terrain_fd_step",
                     "initial_step", "min_step", "proximal_weight")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Ensure scalars are positive."""
        if v <= 0:
            raise ValueError("Solver scalars must be positive")
        return v

    @field_validator("growth_factor")
    @classmethod
    def validate_growth(cls, v: float) -> float:
        """Penalty weights must grow."""
        if v <= 1.0:
            raise ValueError("growth_factor must exceed 1")
        return v

    @field_validator("max_outer_iterations", "max_inner_iterations")
    @classmethod
    def validate_caps(cls, v: int) -> int:
        """Iteration caps are positive."""
        if v < 1:
            raise ValueError("Iteration caps must be positive")
        return v

    @field_validator("backtrack")
    @classmethod
    def validate_backtrack(cls, v: float) -> float:
        """Backtracking must shrink the step."""
        if not 0.0 < v < 1.0:
            raise ValueError("backtrack must lie in (0, 1)")
        return v


class RefineConfig(BaseModel):
    """Refinement transcription settings."""

    dt: float = Field(default=0.5, description="Knot spacing (s)")
    seed_mode: SeedMode = Field(default=SeedMode.INIT, description="Initial trajectory source")
    height_layer: str = Field(
        default="elevation_filled",
        description="Elevation layer read by the height constraint")
    interpolation: InterpolationMethod = Field(
        default=InterpolationMethod.BICUBIC_CONVOLUTION,
        description="Terrain interpolation used by the constraints")

    @field_validator("dt")
    @classmethod
    def validate_dt(cls, v: float) -> float:
        """Knot spacing must be positive."""
        if v <= 0:
            raise ValueError("dt must be positive")
        return v


class SweepConfig(BaseModel):
    """Evaluation sweep settings."""

    families: List[TerrainFamily] = Field(
        default_factory=lambda: [TerrainFamily.FLAT, TerrainFamily.ROUGH,
                                 TerrainFamily.GAP, TerrainFamily.STEP],
        description="Terrain families to evaluate")
    difficulties: List[float] = Field(
        default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0],
        description="Difficulty grid")
    trials: int = Field(default=5, description="Trials per (family, difficulty)")
    seed: int = Field(default=0, description="Sweep seed; per-trial seeds derive from it")
    max_iterations: int = Field(default=150, description="Planner iteration budget per trial")
    refine: bool = Field(default=True, description="Run the refinement stage")
    compare_linear: bool = Field(default=True, description="Also refine from linear seeds")
    max_workers: int = Field(default=1, description="Parallel trial workers")
    extent: Tuple[float, float] = Field(default=(30.0, 16.0), description="Map size (m)")
    resolution: float = Field(default=0.1, description="Cell size (m)")

    @field_validator("trials", "max_iterations")
    @classmethod
    def validate_positive_integers(cls, v: int) -> int:
        """Ensure counts are positive."""
        if v < 1:
            raise ValueError("Sweep counts must be positive integers")
        return v

    @field_validator("max_workers")
    @classmethod
    def validate_max_workers(cls, v: int) -> int:
        """Ensure the worker count is reasonable."""
        if v < 1:
            raise ValueError("max_workers must be at least 1")
        if v > 32:
            raise ValueError("max_workers should not exceed 32")
        return v

    @field_validator("difficulties")
    @classmethod
    def validate_difficulties(cls, v: List[float]) -> List[float]:
        """Difficulties are normalized and sorted."""
        if not v:
            raise ValueError("difficulties cannot be empty")
        if any(d < 0.0 or d > 1.0 for d in v):
            raise ValueError("difficulties must lie in [0, 1]")
        return sorted(v)


class AppConfig(BaseModel):
    """Main application configuration model."""

    model_config = ConfigDict(arbitrary_types_allowed=True, validate_assignment=True)

    output_directory: Path = Field(default=Path("output"), description="Base output directory")
    log_dir: Path = Field(default=Path("logs"), description="Log directory")
    log_level: str = Field(default="INFO", description="Logging level")
    robot_config: Path = Field(default=Path("robot.yaml"), description="Robot description")
    deterministic: bool = Field(
        default=False, description="Use iteration budgets instead of wall clock")
    seed: int = Field(default=0, description="Global seed")

    # Nested configuration sections
    preprocessing: PreprocessingConfig = Field(default_factory=PreprocessingConfig)
    terrain: TerrainSpec = Field(default_factory=TerrainSpec)
    roadmap: RoadmapConfig = Field(default_factory=RoadmapConfig)
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    planner: PlannerConfig = Field(default_factory=PlannerConfig)
    finalize: FinalizeConfig = Field(default_factory=FinalizeConfig)
    refine: RefineConfig = Field(default_factory=RefineConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @field_validator("output_directory", "log_dir", "robot_config", mode="before")
    @classmethod
    def convert_paths(cls, v):
        """Convert string paths to Path objects."""
        if isinstance(v, str):
            return Path(v)
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate logging level."""
        allowed_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in allowed_levels:
            raise ValueError(f"Log level must be one of {allowed_levels}, got {v}")
        return v.upper()

    @model_validator(mode="after")
    def check_radii_order(self) -> "AppConfig":
        """The large smoothing radius must not be smaller than the small one."""
        if self.preprocessing.r_large < self.preprocessing.r_small:
            raise ValueError("preprocessing.r_large must be >= r_small")
        return self
