"""
Logging service for structured logging configuration.

This module provides the LoggingService class that configures structlog with a
human-readable console stream and rotating JSONL files.
"""

import logging
import logging.handlers
from pathlib import Path
from typing import Dict, Optional, Tuple

import structlog

_MAX_BYTES = 10 * 1024 * 1024


class LoggingService:
    """Configures structured logging with multiple output streams.

    Creates three log files in JSONL format:
    - drover.jsonl: operational logs (INFO and above)
    - drover-trace.jsonl: full trace (DEBUG and above)
    - drover-error.jsonl: errors only (ERROR and above)
    """

    def __init__(self) -> None:
        """Initialize the logging service."""
        self._configured = False

    @property
    def configured(self) -> bool:
        """Whether ``setup_logging`` already ran."""
        return self._configured

    def setup_logging(
        self,
        log_level: str = "INFO",
        log_dir: Optional[str] = None
    ) -> None:
        """Configure structured logging with console and file handlers.

        Args:
            log_level: Minimum level for console output (INFO, DEBUG, ...)
            log_dir: Directory for log files. Defaults to 'logs'

        Raises:
            ValueError: If log_level is not a valid logging level
        """
        if self._configured:
            return

        numeric_level, log_paths = self._setup_logging_environment(log_level, log_dir)
        processors = self._create_structlog_processors()
        handlers = self._create_log_handlers(numeric_level, log_paths)
        self._configure_structlog_and_formatters(processors, handlers)
        self._finalize_logging_setup(handlers, log_level, log_paths)

    def get_logger(self, name: str) -> structlog.stdlib.BoundLogger:
        """Get a structured logger instance.

        Raises:
            RuntimeError: If logging has not been configured yet
        """
        if not self._configured:
            raise RuntimeError("Logging must be configured before getting loggers")
        return structlog.get_logger(name)

    @staticmethod
    def bind_run_context(command: str, seed: int, deterministic: bool) -> None:
        """Attach the running command, its seed and mode to every later log event."""
        structlog.contextvars.clear_contextvars()
        structlog.contextvars.bind_contextvars(command=command, seed=seed, deterministic=deterministic)

    def _setup_logging_environment(
        self, log_level: str, log_dir: Optional[str]
    ) -> Tuple[int, Dict[str, Path]]:
        """Validate the level and prepare the log directory."""
        numeric_level = getattr(logging, log_level.upper(), None)
        if not isinstance(numeric_level, int):
            raise ValueError(f"Invalid log level: {log_level}")

        log_dir_path = Path(log_dir or "logs")
        log_dir_path.mkdir(parents=True, exist_ok=True)

        log_paths = {
            'normal': log_dir_path / "drover.jsonl",
            'trace': log_dir_path / "drover-trace.jsonl",
            'error': log_dir_path / "drover-error.jsonl",
        }
        return numeric_level, log_paths

    def _create_structlog_processors(self):
        """Create the shared structlog processor chain."""
        return [
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="ISO"),
            structlog.processors.CallsiteParameterAdder(
                parameters=[
                    structlog.processors.CallsiteParameter.FUNC_NAME,
                    structlog.processors.CallsiteParameter.LINENO,
                ]
            ),
        ]

    def _create_log_handlers(self, numeric_level: int, log_paths: Dict[str, Path]):
        """Create console and rotating file handlers."""
        console_handler = logging.StreamHandler()
        console_handler.setLevel(numeric_level)

        levels = {'normal': logging.INFO, 'trace': logging.DEBUG, 'error': logging.ERROR}
        handlers = {'console': console_handler}
        for key, level in levels.items():
            handler = logging.handlers.RotatingFileHandler(
                log_paths[key], maxBytes=_MAX_BYTES, backupCount=5
            )
            handler.setLevel(level)
            handlers[key] = handler
        return handlers

    def _configure_structlog_and_formatters(self, processors, handlers) -> None:
        """Configure structlog and attach formatters."""
        structlog.configure(
            processors=processors + [
                structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
            ],
            logger_factory=structlog.stdlib.LoggerFactory(),
            wrapper_class=structlog.stdlib.BoundLogger,
            cache_logger_on_first_use=True,
        )

        console_formatter = structlog.stdlib.ProcessorFormatter(
            processor=structlog.dev.ConsoleRenderer(colors=True),
            foreign_pre_chain=processors,
        )
        json_formatter = structlog.stdlib.ProcessorFormatter(
            processor=structlog.processors.JSONRenderer(),
            foreign_pre_chain=processors,
        )

        handlers['console'].setFormatter(console_formatter)
        for key in ('normal', 'trace', 'error'):
            handlers[key].setFormatter(json_formatter)

    def _finalize_logging_setup(self, handlers, log_level: str, log_paths) -> None:
        """Install handlers on the root logger."""
        root_logger = logging.getLogger()
        root_logger.setLevel(logging.DEBUG)
        root_logger.handlers.clear()
        for handler in handlers.values():
            root_logger.addHandler(handler)

        self._configured = True

        logger = structlog.get_logger(__name__)
        logger.info(
            "Logging configured successfully",
            console_level=log_level,
            normal_log=str(log_paths['normal']),
            trace_log=str(log_paths['trace']),
            error_log=str(log_paths['error']),
        )
