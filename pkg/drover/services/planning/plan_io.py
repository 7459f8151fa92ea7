"""Plan files: JSON documents of phases, states and planner metrics."""

import json
from pathlib import Path
from typing import Optional, Union

import numpy as np
import structlog
from pydantic import ValidationError

from ...errors import ConfigHashMismatchError, CorruptedFileError, VersionMismatchError
from ...models.plan import PhaseRecord, PlanFile, StateRecord
from ..reeds_shepp import SE2Pose
from ..robot import Pose3, RobotModel, WholeBodyState
from ..storage import write_model_json
from .path import PlanPhase, WholeBodyPath

logger = structlog.get_logger(__name__)

PLAN_FORMAT_VERSION = 1


def state_record(state: WholeBodyState, time: float) -> StateRecord:
    return StateRecord(
        time=float(time),
        position=[float(v) for v in state.base_pose.position],
        quaternion=[float(v) for v in state.base_pose.quaternion],
        q=[float(v) for v in state.q],
        contacts=list(state.contacts),
        contact_points=[None if p is None else [float(v) for v in p] for p in state.contact_points],
    )


def record_state(record: StateRecord) -> WholeBodyState:
    points = tuple(None if p is None else np.asarray(p, dtype=float) for p in record.contact_points)
    pose = Pose3(np.asarray(record.position), np.asarray(record.quaternion))
    return WholeBodyState(pose, np.asarray(record.q, dtype=float), tuple(record.contacts), points)


def to_plan_file(path: WholeBodyPath, model: RobotModel, kind: str = "plan") -> PlanFile:
    phases = [
        PhaseRecord(
            duration=float(phase.duration),
            contacts=list(phase.contacts),
            states=[state_record(s, t) for s, t in zip(phase.states, phase.times)],
        )
        for phase in path.phases
    ]
    return PlanFile(
        format_version=PLAN_FORMAT_VERSION,
        kind=kind,
        robot_config_hash=model.config_hash,
        limb_names=model.limb_names,
        start=path.start.as_tuple(),
        goal=path.goal.as_tuple(),
        metrics=path.metrics,
        phases=phases,
    )


def from_plan_file(document: PlanFile) -> WholeBodyPath:
    phases = [
        PlanPhase(
            duration=record.duration,
            contacts=tuple(record.contacts),
            states=[record_state(s) for s in record.states],
            times=[s.time for s in record.states],
        )
        for record in document.phases
    ]
    path = WholeBodyPath(start=SE2Pose(*document.start), goal=SE2Pose(*document.goal), phases=phases)
    if document.metrics is not None:
        path.metrics = document.metrics
    return path


def save_plan(path: WholeBodyPath, model: RobotModel, output: Union[str, Path], kind: str = "plan") -> Path:
    """Write a plan (or refined trajectory) file atomically."""
    output = Path(output)
    write_model_json(to_plan_file(path, model, kind), output)
    logger.info("Plan saved", path=str(output), kind=kind, phases=len(path.phases))
    return output


def read_plan_file(source: Union[str, Path], model: Optional[RobotModel] = None) -> PlanFile:
    """Parse and check a plan file.

    Raises:
        FileNotFoundError: No such file.
        CorruptedFileError: Not a valid plan document.
        VersionMismatchError: Unsupported format version.
        ConfigHashMismatchError: Written for a different robot description.
    """
    source = Path(source)
    text = source.read_text(encoding="utf-8")
    try:
        document = PlanFile.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise CorruptedFileError(f"Invalid plan file {source}: {e}") from e
    if document.format_version != PLAN_FORMAT_VERSION:
        raise VersionMismatchError(
            f"Plan file version {document.format_version} is not supported (expected {PLAN_FORMAT_VERSION})")
    if model is not None and document.robot_config_hash != model.config_hash:
        raise ConfigHashMismatchError(f"Plan {source} was made for another robot configuration")
    return document


def load_plan(source: Union[str, Path], model: Optional[RobotModel] = None) -> WholeBodyPath:
    return from_plan_file(read_plan_file(source, model))
