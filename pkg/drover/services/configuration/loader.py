"""Configuration loading module.

Reads the YAML application configuration and the robot description file.
"""

from pathlib import Path
from typing import Optional

import structlog
import yaml

from drover.models.config import AppConfig
from drover.models.robot import RobotSpec


class ConfigurationLoader:
    """Handles configuration loading from YAML files."""

    def __init__(self, logger: Optional[structlog.stdlib.BoundLogger] = None) -> None:
        self.logger = logger or structlog.get_logger(__name__)

    def load_config(self, config_path: Optional[Path] = None) -> AppConfig:
        """Load and validate ``config.yaml`` (or the given path)."""
        raw_config = self._read_yaml(Path(config_path or "config.yaml"), "configuration")
        config = AppConfig(**(raw_config or {}))
        self.logger.debug("Configuration loaded and validated", config=str(config))
        return config

    def load_robot_spec(self, robot_path: Path) -> RobotSpec:
        """Load and validate a robot description."""
        raw_spec = self._read_yaml(Path(robot_path), "robot description")
        spec = RobotSpec(**(raw_spec or {}))
        self.logger.debug(
            "Robot description loaded",
            name=spec.name,
            version=spec.version,
            limbs=[limb.name for limb in spec.limbs],
        )
        return spec

    def _read_yaml(self, path: Path, what: str):
        self.logger.info(f"Loading {what}", path=str(path.absolute()))

        if not path.is_file():
            self.logger.error(f"{what.capitalize()} file not found", path=str(path))
            raise FileNotFoundError(f"{what.capitalize()} file not found: {path}")

        try:
            with open(path, "r", encoding="utf-8") as f:
                return yaml.safe_load(f)
        except yaml.YAMLError as e:
            self.logger.exception(f"Error parsing {what} file", path=str(path), error=str(e))
            raise ValueError(f"Invalid YAML in {what} file {path}: {e}") from e
