"""Shared fixtures: small pre-processed maps, the bundled robot and its roadmaps."""

from pathlib import Path

import pytest

from drover.models.config import AppConfig, PlannerConfig, PreprocessingConfig, RoadmapConfig, TerrainSpec
from drover.services.planning import InitPlanner
from drover.services.reeds_shepp import SE2Pose
from drover.services.roadmap import RoadmapSet
from drover.services.robot import load_robot_model
from drover.services.terrain import generate_with_labels, preprocess

ROOT = Path(__file__).resolve().parent.parent
ROBOT_FILE = ROOT / "robot.yaml"

# Small enough to pre-process quickly, large enough for a 15 m request
TEST_EXTENT = (24.0, 12.0)


def build_terrain(family: str, difficulty: float = 0.0, seed: int = 0):
    spec = TerrainSpec(family=family, difficulty=difficulty, seed=seed, extent=TEST_EXTENT)
    raw, labels = generate_with_labels(spec)
    return preprocess(raw, PreprocessingConfig()), labels


@pytest.fixture(scope="session")
def model():
    return load_robot_model(ROBOT_FILE)


@pytest.fixture(scope="session")
def flat_terrain():
    return build_terrain("flat")


@pytest.fixture(scope="session")
def flat_map(flat_terrain):
    return flat_terrain[0]


@pytest.fixture(scope="session")
def gap_terrain():
    return build_terrain("gap", difficulty=1.0)


@pytest.fixture(scope="session")
def step_terrain():
    return build_terrain("step", difficulty=0.5)


@pytest.fixture(scope="session")
def roadmap_config():
    return RoadmapConfig(leg_vertices=30, arm_vertices=60, seed=0)


@pytest.fixture(scope="session")
def roadmaps(model, roadmap_config):
    return RoadmapSet.build(model, roadmap_config)


@pytest.fixture(scope="session")
def flat_request():
    return SE2Pose(8.0, 6.0, 0.0), SE2Pose(12.0, 6.0, 0.0)


@pytest.fixture(scope="session")
def flat_plan(flat_map, model, roadmaps, flat_request):
    config = PlannerConfig(goal_bias=1.0, max_iterations=5, seed=0)
    return InitPlanner(flat_map, model, roadmaps, config, deterministic=True).plan(*flat_request)


@pytest.fixture(scope="session")
def make_config():
    """Factory of small deterministic application configs rooted at a directory."""

    def factory(base: Path, **updates) -> AppConfig:
        data = {
            "output_directory": base / "out",
            "log_dir": base / "logs",
            "robot_config": ROBOT_FILE,
            "deterministic": True,
            "terrain": {"family": "flat", "extent": TEST_EXTENT},
            "roadmap": {"leg_vertices": 30, "arm_vertices": 60},
            "planner": {"goal_bias": 1.0, "max_iterations": 5},
            "solver": {"max_outer_iterations": 1, "max_inner_iterations": 5},
        }
        data.update(updates)
        return AppConfig(**data)

    return factory


@pytest.fixture(scope="session")
def rough_map():
    return build_terrain("rough", difficulty=0.0, seed=3)[0]
