import random

import pytest
from pydantic import ValidationError

from drover.models.config import AppConfig


@pytest.mark.parametrize("num_tests", [100])
def test_fuzz_random_config_combinations(num_tests):
    """Generate random configuration and validate."""
    rng = random.Random(0)
    for _ in range(num_tests):
        config_data = generate_random_config_data(rng)
        try:
            config = AppConfig(**config_data)
        except ValidationError:
            # Expected for invalid random configurations
            continue
        assert config.preprocessing.r_large >= config.preprocessing.r_small
        assert config.sweep.difficulties == sorted(config.sweep.difficulties)


def generate_random_config_data(rng: random.Random):
    """Generates random configuration data."""
    return {
        "output_directory": rng.choice(["output", "out"]),
        "log_level": rng.choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]),
        "deterministic": rng.choice([True, False]),
        "seed": rng.randint(0, 1000),
        "preprocessing": {
            "r_small": rng.uniform(-0.5, 1.0),
            "r_large": rng.uniform(0.0, 3.0),
            "traversability": {
                "max_slope": rng.uniform(-0.2, 1.8),
                "sdf_margin": rng.uniform(-0.1, 0.5),
            },
        },
        "terrain": {
            "family": rng.choice(["flat", "rough", "gap", "step", "hole", "lava"]),
            "difficulty": rng.uniform(-0.2, 1.2),
        },
        "roadmap": {
            "leg_vertices": rng.randint(0, 400),
            "k_neighbors": rng.randint(0, 15),
        },
        "planner": {
            "goal_bias": rng.uniform(-0.1, 1.1),
            "max_iterations": rng.choice([None, 0, 50, 300]),
            "stepping_penalty": rng.uniform(-1.0, 5.0),
        },
        "solver": {
            "growth_factor": rng.uniform(0.5, 10.0),
            "backtrack": rng.uniform(0.0, 1.2),
        },
        "sweep": {
            "trials": rng.randint(0, 10),
            "max_workers": rng.randint(0, 40),
            "difficulties": rng.sample([0.0, 0.25, 0.5, 0.75, 1.0, 1.5], k=rng.randint(0, 4)),
        },
    }
