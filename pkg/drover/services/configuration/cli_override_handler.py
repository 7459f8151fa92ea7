"""CLI override handling for configuration management.

Merges command-line arguments into configuration objects so that CLI values
take precedence over the YAML file.
"""

from typing import Any, Dict, Tuple

import structlog

from ...models.config import AppConfig

# CLI argument -> location inside the config dictionary
_OVERRIDE_TARGETS: Dict[str, Tuple[str, ...]] = {
    "log_level": ("log_level",),
    "deterministic": ("deterministic",),
    "output_directory": ("output_directory",),
    "robot_config": ("robot_config",),
    "stepping_penalty": ("planner", "stepping_penalty"),
    "max_iterations": ("planner", "max_iterations"),
    "time_budget": ("planner", "time_budget"),
    "turning_radius": ("planner", "turning_radius"),
    "leg_vertices": ("roadmap", "leg_vertices"),
    "arm_vertices": ("roadmap", "arm_vertices"),
    "seed_mode": ("refine", "seed_mode"),
    "dt": ("refine", "dt"),
    "clip_threshold": ("solver", "clip_threshold"),
    "family": ("terrain", "family"),
    "difficulty": ("terrain", "difficulty"),
    "families": ("sweep", "families"),
    "max_workers": ("sweep", "max_workers"),
    "trials": ("sweep", "trials"),
}

# A global seed fans out to every seeded section
_SEED_TARGETS = (
    ("seed",), ("terrain", "seed"), ("planner", "seed"), ("roadmap", "seed"), ("sweep", "seed"),
)


class CLIOverrideHandler:
    """Handles merging CLI arguments into configuration objects."""

    def __init__(self) -> None:
        """Initialize the CLI override handler."""
        self.logger = structlog.get_logger(__name__)

    def merge_cli_overrides(self, config: AppConfig, cli_args: Dict[str, Any]) -> AppConfig:
        """Merge CLI argument overrides into a new AppConfig.

        Arguments whose value is None are ignored. ``seed`` is applied to every
        seeded section.

        Raises:
            ValidationError: If the overrides produce an invalid configuration.
        """
        config_dict = config.model_dump()

        for key, target in _OVERRIDE_TARGETS.items():
            value = cli_args.get(key)
            if value is None:
                continue
            self._assign(config_dict, target, value)
            self.logger.info("CLI override", setting=key, value=value)

        if cli_args.get("seed") is not None:
            for target in _SEED_TARGETS:
                self._assign(config_dict, target, cli_args["seed"])
            self.logger.info("CLI override", setting="seed", value=cli_args["seed"])

        return AppConfig(**config_dict)

    @staticmethod
    def _assign(config_dict: Dict[str, Any], target: Tuple[str, ...], value: Any) -> None:
        section = config_dict
        for key in target[:-1]:
            section = section[key]
        section[target[-1]] = value
