#!/usr/bin/env python3
"""
Contract tests for the drover public API.

These tests ensure that refactoring does not break the public interface
by importing and testing the availability of all public classes and functions.
"""

import importlib
import inspect

import pytest


def test_main_package_imports():
    """Test that main package imports work correctly."""
    import drover
    assert hasattr(drover, "__version__")
    assert isinstance(drover.__version__, str)


def test_services_module_imports():
    """Test that all declared services can be imported."""
    expected_services = [
        "ConfigurationService",
        "EvaluationSweep",
        "PipelineWorkflows",
        "ProgressService",
    ]

    from drover import services

    assert hasattr(services, "__all__")
    for service_name in expected_services:
        assert service_name in services.__all__, f"{service_name} missing from services.__all__"
        assert inspect.isclass(getattr(services, service_name)), f"{service_name} is not a class"


def test_models_module_imports():
    """Test that all declared models can be imported."""
    expected_models = [
        "AppConfig",
        "PlannerConfig",
        "RoadmapConfig",
        "SolverConfig",
        "SweepConfig",
        "TerrainSpec",
        "PlanFile",
        "PlannerMetrics",
        "RefinementReport",
        "RunManifest",
        "RobotSpec",
    ]

    from drover import models

    for model_name in expected_models:
        assert model_name in models.__all__, f"{model_name} missing from models.__all__"
        assert inspect.isclass(getattr(models, model_name)), f"{model_name} is not a class"


@pytest.mark.parametrize(
    "module_name, names",
    [
        ("drover.services.gridmap", ["GridMap", "save_map", "load_map", "export_csv"]),
        ("drover.services.terrain", ["preprocess", "fit_plane", "signed_distance", "generate"]),
        ("drover.services.robot", ["RobotModel", "CollisionModel", "support_margin", "load_robot_model"]),
        ("drover.services.roadmap", ["build_roadmap", "RoadmapSet", "invalidate", "search_path"]),
        ("drover.services.reeds_shepp", ["SE2Pose", "shortest_path", "interpolate", "discretize"]),
        ("drover.services.sampler", ["PoseLifter", "level_pose", "nearest_traversable"]),
        ("drover.services.planning", ["InitPlanner", "plan", "check_feasibility", "save_plan", "load_plan"]),
        ("drover.services.refinement", ["transcribe", "evaluate", "check_gradients", "PenaltySolver"]),
    ],
)
def test_stage_modules_export_operations(module_name, names):
    """Each pipeline stage exposes its operations at package level."""
    module = importlib.import_module(module_name)
    for name in names:
        assert name in module.__all__, f"{name} missing from {module_name}.__all__"
        assert callable(getattr(module, name))


def test_configuration_service_interface():
    """Test that ConfigurationService maintains its expected interface."""
    from drover.services import ConfigurationService

    config_service = ConfigurationService()
    for method_name in ["load", "load_config", "load_robot", "merge_cli_overrides", "setup_directories"]:
        assert callable(getattr(config_service, method_name)), f"ConfigurationService missing {method_name}"


def test_pipeline_workflows_interface(tmp_path):
    """Workflows expose one method per single-stage command."""
    from drover.models import AppConfig
    from drover.services import PipelineWorkflows

    workflows = PipelineWorkflows(AppConfig(output_directory=tmp_path))
    for method_name in ["gen_terrain", "preprocess_map", "build_roadmaps", "plan", "refine", "export"]:
        assert callable(getattr(workflows, method_name)), f"PipelineWorkflows missing {method_name}"


if __name__ == "__main__":
    pytest.main([__file__])
