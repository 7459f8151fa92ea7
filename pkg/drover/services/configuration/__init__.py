"""Configuration management package.

This package provides configuration loading, validation, and override handling
for drover.
"""

from pathlib import Path
from typing import Any, Dict, Optional

import structlog

from ...models.config import AppConfig
from ...models.robot import RobotSpec
from .cli_override_handler import CLIOverrideHandler
from .loader import ConfigurationLoader

__all__ = [
    'CLIOverrideHandler',
    'ConfigurationLoader',
    'ConfigurationService',
]


class ConfigurationService:
    """Facade over loading, overriding and directory setup."""

    def __init__(self):
        self.logger = structlog.get_logger(__name__)
        self.loader = ConfigurationLoader(logger=self.logger)
        self.cli_handler = CLIOverrideHandler()

    def load(self, config_path: Optional[Path] = None) -> AppConfig:
        return self.loader.load_config(config_path)

    def load_config(self, config_path: Optional[Path] = None) -> AppConfig:
        """Load configuration from file (alias for load method)."""
        return self.load(config_path)

    def load_robot(self, config: AppConfig) -> RobotSpec:
        """Load the robot description referenced by the configuration."""
        return self.loader.load_robot_spec(config.robot_config)

    def merge_cli_overrides(self, config: AppConfig, cli_args: Dict[str, Any]) -> AppConfig:
        """Merge CLI overrides into configuration."""
        return self.cli_handler.merge_cli_overrides(config, cli_args)

    def setup_directories(self, config: AppConfig) -> None:
        """Create output and log directories."""
        config.output_directory.mkdir(parents=True, exist_ok=True)
        config.log_dir.mkdir(parents=True, exist_ok=True)
        self.logger.info(
            "Directories created",
            output_dir=str(config.output_directory),
            log_dir=str(config.log_dir),
        )
