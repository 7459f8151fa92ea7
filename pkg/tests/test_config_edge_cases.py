import math

import pytest
from pydantic import ValidationError

from drover.models.config import (
    AppConfig,
    PlannerConfig,
    PreprocessingConfig,
    RefineConfig,
    RoadmapConfig,
    SolverConfig,
    SweepConfig,
    TerrainSpec,
    TraversabilityParams,
)
from drover.models.enums import SeedMode, TerrainFamily


def test_traversability_params_edge_cases():
    # Slope limits must be proper angles
    with pytest.raises(ValidationError):
        TraversabilityParams(max_slope=0.0)
    with pytest.raises(ValidationError):
        TraversabilityParams(max_slope=math.pi / 2)

    with pytest.raises(ValidationError):
        TraversabilityParams(sdf_margin=-0.1)

    # Zero disables the rim band
    params = TraversabilityParams(missing_margin=0.0)
    assert params.missing_margin == 0.0


def test_preprocessing_radii_edge_cases():
    with pytest.raises(ValidationError):
        PreprocessingConfig(r_small=-0.3)

    # r_large below r_small is rejected at the application level
    with pytest.raises(ValidationError):
        AppConfig(preprocessing={"r_small": 1.0, "r_large": 0.5})

    config = AppConfig(preprocessing={"r_small": 0.5, "r_large": 0.5})
    assert config.preprocessing.r_large == 0.5


def test_terrain_spec_edge_cases():
    with pytest.raises(ValidationError):
        TerrainSpec(difficulty=1.5)
    with pytest.raises(ValidationError):
        TerrainSpec(resolution=0.0)
    with pytest.raises(ValidationError):
        TerrainSpec(extent=(10.0, -1.0))
    with pytest.raises(ValidationError):
        TerrainSpec(family="lava")

    spec = TerrainSpec(family="gap", difficulty=1.0)
    assert spec.family is TerrainFamily.GAP


def test_roadmap_config_edge_cases():
    # Fewer than 10 vertices is too sparse
    with pytest.raises(ValidationError):
        RoadmapConfig(leg_vertices=9)
    with pytest.raises(ValidationError):
        RoadmapConfig(k_neighbors=0)
    with pytest.raises(ValidationError):
        RoadmapConfig(edge_step=0.0)

    config = RoadmapConfig(leg_vertices=10)
    assert config.leg_vertices == 10


def test_planner_config_edge_cases():
    with pytest.raises(ValidationError):
        PlannerConfig(goal_bias=1.5)
    with pytest.raises(ValidationError):
        PlannerConfig(stepping_penalty=-1.0)
    with pytest.raises(ValidationError):
        PlannerConfig(max_iterations=0)
    with pytest.raises(ValidationError):
        PlannerConfig(turning_radius=0.0)

    assert PlannerConfig().max_iterations is None


def test_solver_and_refine_edge_cases():
    with pytest.raises(ValidationError):
        SolverConfig(growth_factor=1.0)
    with pytest.raises(ValidationError):
        SolverConfig(backtrack=1.0)
    with pytest.raises(ValidationError):
        SolverConfig(clip_threshold=0.0)
    with pytest.raises(ValidationError):
        RefineConfig(dt=0.0)

    assert RefineConfig(seed_mode="linear").seed_mode is SeedMode.LINEAR


def test_sweep_config_edge_cases():
    with pytest.raises(ValidationError):
        SweepConfig(max_workers=0)
    with pytest.raises(ValidationError):
        SweepConfig(max_workers=33)
    with pytest.raises(ValidationError):
        SweepConfig(difficulties=[])
    with pytest.raises(ValidationError):
        SweepConfig(difficulties=[0.5, 1.2])

    # Difficulties come back sorted
    assert SweepConfig(difficulties=[1.0, 0.0, 0.5]).difficulties == [0.0, 0.5, 1.0]


def test_app_config_edge_cases():
    config = AppConfig(output_directory="out", robot_config="robot.yaml")
    assert config.output_directory.name == "out"
    assert config.robot_config.name == "robot.yaml"

    # Assignment is validated too
    with pytest.raises(ValidationError):
        config.planner = {"goal_bias": 2.0}
