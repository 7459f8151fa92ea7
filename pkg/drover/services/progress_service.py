"""Progress tracking service for long-running drover loops.

Roadmap construction and evaluation sweeps report progress through Rich
progress bars while structured logs keep the per-run details.
"""

import logging
from contextlib import contextmanager
from typing import Generator, Iterator, Tuple

import structlog
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TaskID,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)


class ProgressService:
    """Tracks run outcomes and renders progress bars.

    Attributes:
        total_items: Number of runs scheduled.
        succeeded_count: Runs that produced a result.
        failed_count: Runs that ended in a recorded failure.
    """

    def __init__(self, enabled: bool = True) -> None:
        """Initialize counters; ``enabled=False`` renders nothing (tests, workers)."""
        self.logger = structlog.get_logger(__name__)
        self.enabled = enabled
        self.total_items = 0
        self.succeeded_count = 0
        self.failed_count = 0

    def set_total_items(self, total: int) -> None:
        """Set the number of runs to be processed.

        Raises:
            ValueError: If total is negative.
        """
        if total < 0:
            raise ValueError("Total items cannot be negative")
        self.total_items = total
        self.logger.info("Progress tracking initialized", total_items=total)

    def create_progress_display(self) -> Progress:
        """Create a Rich progress display with the standard column set."""
        return Progress(
            TextColumn("[bold blue]{task.description}"),
            BarColumn(bar_width=None),
            MofNCompleteColumn(),
            TaskProgressColumn(),
            TimeElapsedColumn(),
            TimeRemainingColumn(),
            expand=True,
            disable=not self.enabled,
        )

    @contextmanager
    def track(self, description: str, total: int) -> Iterator[Tuple[Progress, TaskID]]:
        """Open a progress bar while console logging is suppressed."""
        with self._suppress_console_logging():
            with self.create_progress_display() as progress:
                task_id = progress.add_task(description, total=total)
                yield progress, task_id

    def increment_succeeded(self) -> None:
        """Count one successful run."""
        self.succeeded_count += 1

    def increment_failed(self) -> None:
        """Count one failed run."""
        self.failed_count += 1

    def log_final_summary(self) -> None:
        """Log the success rate over all attempted runs."""
        attempted = self.succeeded_count + self.failed_count
        success_rate = self.succeeded_count / attempted * 100 if attempted else 0.0
        self.logger.info(
            "Runs completed",
            total_items=self.total_items,
            succeeded=self.succeeded_count,
            failed=self.failed_count,
            success_rate=f"{success_rate:.1f}%",
        )

    @contextmanager
    def _suppress_console_logging(self) -> Generator[None, None, None]:
        """Temporarily detach console handlers so log lines do not tear the bar."""
        root_logger = logging.getLogger()
        console_handlers = []
        if self.enabled:
            for handler in root_logger.handlers[:]:
                if type(handler) is logging.StreamHandler:
                    console_handlers.append(handler)
                    root_logger.removeHandler(handler)
        try:
            yield
        finally:
            for handler in console_handlers:
                root_logger.addHandler(handler)
