import json
import logging

import pytest
import structlog

from drover.services.logging_service import LoggingService
from drover.services.progress_service import ProgressService


@pytest.fixture
def restore_logging():
    root = logging.getLogger()
    handlers = root.handlers[:]
    yield
    for handler in root.handlers:
        handler.close()
    root.handlers[:] = handlers
    structlog.contextvars.clear_contextvars()
    structlog.reset_defaults()


def test_setup_creates_jsonl_files(tmp_path, restore_logging):
    service = LoggingService()
    with pytest.raises(RuntimeError):
        service.get_logger("drover")
    service.setup_logging("DEBUG", str(tmp_path))
    assert service.configured
    names = {p.name for p in tmp_path.iterdir()}
    assert {"drover.jsonl", "drover-trace.jsonl", "drover-error.jsonl"} <= names


def test_run_context_reaches_every_event(tmp_path, restore_logging):
    service = LoggingService()
    service.setup_logging("INFO", str(tmp_path))
    service.bind_run_context("plan", seed=4, deterministic=True)
    service.get_logger("drover.test").info("Planning started", nodes=1)
    for handler in logging.getLogger().handlers:
        handler.flush()

    events = [json.loads(line) for line in (tmp_path / "drover.jsonl").read_text().splitlines()]
    event = next(e for e in events if e["event"] == "Planning started")
    assert event["command"] == "plan"
    assert event["seed"] == 4
    assert event["deterministic"] is True
    assert event["nodes"] == 1


def test_invalid_level(tmp_path):
    with pytest.raises(ValueError):
        LoggingService().setup_logging("LOUD", str(tmp_path))


def test_progress_counts_and_suppresses_console():
    progress_service = ProgressService(enabled=True)
    progress_service.set_total_items(3)
    console = logging.StreamHandler()
    root = logging.getLogger()
    root.addHandler(console)
    try:
        with progress_service.track("Evaluating", total=3) as (progress, task_id):
            assert console not in root.handlers
            progress.update(task_id, advance=1)
            progress_service.increment_succeeded()
            progress_service.increment_failed()
        assert console in root.handlers
    finally:
        root.removeHandler(console)
    assert (progress_service.succeeded_count, progress_service.failed_count) == (1, 1)
    progress_service.log_final_summary()


def test_progress_rejects_negative_total():
    with pytest.raises(ValueError):
        ProgressService().set_total_items(-1)
