"""CLI helper functions for main.py.

This module sets up logging, loads the configuration with CLI overrides,
runs one workflow and maps its outcome or error onto the process exit code.
"""

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import structlog
from pydantic import ValidationError
from rich.console import Console

from drover.errors import DroverError, PlanningError
from drover.models.config import AppConfig
from drover.services.configuration import ConfigurationService
from drover.services.logging_service import LoggingService
from drover.services.orchestration import CommandOutcome, PipelineWorkflows

console = Console()

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INTERRUPTED = 130


def exit_code_for(error: BaseException) -> int:
    """Exit code of an error raised by a workflow."""
    if isinstance(error, PlanningError):
        return EXIT_INFEASIBLE
    if isinstance(error, OSError):
        return EXIT_IO
    if isinstance(error, (ValidationError, ValueError, KeyError, IndexError)):
        return EXIT_USAGE
    return EXIT_INFEASIBLE


def error_payload(error: BaseException, exit_code: int) -> str:
    """One-line JSON description of ``error`` for stderr."""
    message = str(error)
    if isinstance(error, ValidationError):
        message = "; ".join(
            f"{'.'.join(str(p) for p in item['loc'])}: {item['msg']}" for item in error.errors())
    return json.dumps({"error": type(error).__name__, "message": message, "exit_code": exit_code})


@dataclass
class GlobalOptions:
    """Options shared by every subcommand."""

    config: Path = Path("config.yaml")
    seed: Optional[int] = None
    deterministic: Optional[bool] = None
    out: Optional[Path] = None
    log_level: Optional[str] = None
    overrides: Dict[str, Any] = field(default_factory=dict)

    def cli_args(self, **command_args: Any) -> Dict[str, Any]:
        """Arguments handed to the configuration override handler."""
        args = {
            "seed": self.seed,
            "deterministic": self.deterministic,
            "output_directory": self.out,
            "log_level": self.log_level,
        }
        args.update(command_args)
        return args


class CLISetup:
    """Handles CLI setup and configuration loading."""

    @staticmethod
    def setup_logging(log_level: Optional[str], log_dir: Optional[Path] = None) -> LoggingService:
        """Setup logging service with appropriate log level."""
        logging_service = LoggingService()
        logging_service.setup_logging(
            log_level=log_level or "INFO",
            log_dir=str(log_dir) if log_dir else None,
        )
        return logging_service

    @staticmethod
    def load_config(config_path: Path, cli_args: Dict[str, Any]) -> AppConfig:
        """Load the YAML configuration and apply CLI overrides.

        Raises:
            FileNotFoundError: The configuration file does not exist.
            ValidationError: The file or the overrides are invalid.
        """
        service = ConfigurationService()
        config = service.merge_cli_overrides(service.load(config_path), cli_args)
        service.setup_directories(config)
        return config


class CommandRunner:
    """Runs one workflow and reports its result."""

    def __init__(self, options: GlobalOptions):
        self.options = options
        self.logger = structlog.get_logger(__name__)

    def run(
        self,
        command: str,
        workflow: Callable[[PipelineWorkflows], CommandOutcome],
        **command_args: Any,
    ) -> int:
        """Execute ``workflow`` and return the process exit code."""
        try:
            cli_args = self.options.cli_args(**command_args)
            config = CLISetup.load_config(self.options.config, cli_args)
            logging_service = CLISetup.setup_logging(config.log_level, config.log_dir)
            logging_service.bind_run_context(command, config.seed, config.deterministic)
            self.logger.info("Command started", config=str(self.options.config))
            outcome = workflow(PipelineWorkflows(config))
        except KeyboardInterrupt:
            console.print("\n[yellow]Operation cancelled by user.[/yellow]")
            return EXIT_INTERRUPTED
        except (DroverError, ValidationError, ValueError, KeyError, IndexError, OSError) as e:
            return self.fail(e)

        self.report(outcome)
        return EXIT_OK if outcome.success else EXIT_INFEASIBLE

    def fail(self, error: BaseException) -> int:
        code = exit_code_for(error)
        self.logger.error("Command failed", error=type(error).__name__, message=str(error), exit_code=code)
        console.print(f"[red]Error: {error}[/red]")
        sys.stderr.write(error_payload(error, code) + "\n")
        return code

    @staticmethod
    def report(outcome: CommandOutcome) -> None:
        colour = "green" if outcome.success else "yellow"
        status = "completed" if outcome.success else "finished without a feasible result"
        console.print(f"[{colour}]{outcome.command} {status}[/{colour}]")
        for name, path in outcome.outputs.items():
            console.print(f"  {name}: {path}")
