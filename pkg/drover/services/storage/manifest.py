"""Run manifests and JSON/CSV artifact writers."""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

import structlog
from pydantic import BaseModel

from drover import __version__
from ...models.config import AppConfig
from ...models.plan import RunManifest
from .file_writer import FileWriter

logger = structlog.get_logger(__name__)


def write_model_json(model: BaseModel, path: Path) -> None:
    """Write a pydantic model as indented JSON."""
    FileWriter().write_text_atomic(model.model_dump_json(indent=2) + "\n", Path(path))


def write_json(data: Any, path: Path) -> None:
    """Write plain JSON data with sorted keys."""
    FileWriter().write_text_atomic(json.dumps(data, indent=2, sort_keys=True) + "\n", Path(path))


def write_csv(rows: Iterable[Mapping[str, Any]], fieldnames: List[str], path: Path) -> None:
    """Write dictionaries as CSV rows."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: row.get(key) for key in fieldnames})
    FileWriter().write_text_atomic(buffer.getvalue(), Path(path))


def build_manifest(
    command: str,
    config: AppConfig,
    inputs: Optional[Dict[str, Any]] = None,
    outputs: Optional[Dict[str, Any]] = None,
    timings: Optional[Dict[str, float]] = None,
    summary: Optional[Dict[str, Any]] = None,
) -> RunManifest:
    """Assemble a manifest for one command invocation."""
    return RunManifest(
        command=command,
        tool_version=__version__,
        config=config.model_dump(mode="json"),
        inputs={k: str(v) for k, v in (inputs or {}).items()},
        outputs={k: str(v) for k, v in (outputs or {}).items()},
        seed=config.seed,
        deterministic=config.deterministic,
        timings=dict(timings or {}),
        summary=dict(summary or {}),
    )


def write_manifest(manifest: RunManifest, path: Path) -> None:
    """Write a manifest next to the command outputs."""
    write_model_json(manifest, path)
    logger.info("Manifest written", command=manifest.command, path=str(path))
