"""Command workflows of the drover pipeline.

Each workflow reads its inputs, runs one pipeline stage, writes its outputs
atomically and records a run manifest next to them.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import structlog

from ...models.config import AppConfig, TerrainSpec
from ...models.enums import SeedMode
from ..configuration import ConfigurationService
from ..gridmap import GridMap, export_csv, load_map, map_summary, save_map
from ..planning import InitPlanner, WholeBodyPath, load_plan, save_plan
from ..progress_service import ProgressService
from ..reeds_shepp import SE2Pose
from ..refinement import PenaltySolver, seed_linear, transcribe
from ..roadmap import RoadmapSet
from ..robot import RobotModel
from ..storage import build_manifest, write_csv, write_manifest, write_model_json
from ..terrain import generate_with_labels, preprocess, write_sidecar

logger = structlog.get_logger(__name__)

SIDECAR_SUFFIX = ".labels.json"
MANIFEST_SUFFIX = ".manifest.json"
REPORT_SUFFIX = ".report.json"


def sidecar_path(map_path: Path) -> Path:
    """Ground-truth sidecar written next to a generated map."""
    return map_path.with_name(map_path.stem + SIDECAR_SUFFIX)


def manifest_path(output: Path) -> Path:
    """Manifest of the command that wrote ``output``."""
    if output.suffix == "":
        return output / "manifest.json"
    return output.with_name(output.stem + MANIFEST_SUFFIX)


def report_path(output: Path) -> Path:
    return output.with_name(output.stem + REPORT_SUFFIX)


def read_sidecar_poses(map_path: Path) -> Optional[Tuple[SE2Pose, SE2Pose]]:
    """Suggested start and goal stored next to a generated map, if any."""
    sidecar = sidecar_path(map_path)
    if not sidecar.exists():
        return None
    labels = json.loads(sidecar.read_text(encoding="utf-8"))
    return SE2Pose(*labels["start"]), SE2Pose(*labels["goal"])


@dataclass
class CommandOutcome:
    """Result of one workflow; ``success`` False maps to the planner exit code."""

    command: str
    success: bool = True
    outputs: Dict[str, Path] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)


class PipelineWorkflows:
    """Runs the single-stage commands for one loaded configuration."""

    def __init__(self, config: AppConfig, progress_service: Optional[ProgressService] = None):
        self.config = config
        self.progress_service = progress_service or ProgressService()
        self.configuration = ConfigurationService()
        self.logger = structlog.get_logger(__name__)
        self._model: Optional[RobotModel] = None

    @property
    def model(self) -> RobotModel:
        """Robot model loaded lazily from ``config.robot_config``."""
        if self._model is None:
            self._model = RobotModel(self.configuration.load_robot(self.config))
        return self._model

    def _timings(self, started: float) -> Dict[str, float]:
        if self.config.deterministic:
            return {}
        return {"wall_time": time.perf_counter() - started}

    def _finish(
        self,
        outcome: CommandOutcome,
        manifest_target: Path,
        inputs: Dict[str, Any],
        started: float,
    ) -> CommandOutcome:
        manifest = build_manifest(
            outcome.command,
            self.config,
            inputs=inputs,
            outputs=outcome.outputs,
            timings=self._timings(started),
            summary=outcome.summary,
        )
        target = manifest_path(manifest_target)
        write_manifest(manifest, target)
        outcome.outputs["manifest"] = target
        return outcome

    # Terrain

    def gen_terrain(self, spec: TerrainSpec, output: Path) -> CommandOutcome:
        """Generate a procedural map, pre-process it and write its sidecar."""
        started = time.perf_counter()
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)
        raw, labels = generate_with_labels(spec)
        grid = preprocess(raw, self.config.preprocessing)
        save_map(grid, output)
        sidecar = write_sidecar(labels, sidecar_path(output))
        outcome = CommandOutcome(
            command="gen-terrain",
            outputs={"map": output, "sidecar": sidecar},
            summary={
                "family": labels.family,
                "difficulty": labels.difficulty,
                "parameter": labels.parameter,
                "value": labels.value,
                **map_summary(grid),
            },
        )
        return self._finish(outcome, output, {}, started)

    def preprocess_map(self, source: Path, output: Path) -> CommandOutcome:
        """Derive plane-fit, traversability and SDF layers for an existing map."""
        started = time.perf_counter()
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)
        grid = preprocess(load_map(source), self.config.preprocessing)
        save_map(grid, output)
        outcome = CommandOutcome(command="preprocess", outputs={"map": output}, summary=map_summary(grid))
        return self._finish(outcome, output, {"map": source}, started)

    # Roadmaps

    def build_roadmaps(self, output_dir: Path) -> CommandOutcome:
        """Build and save one roadmap per limb."""
        started = time.perf_counter()
        output_dir = Path(output_dir)
        model = self.model
        with self.progress_service.track("Building roadmaps", total=2 * len(model.limbs)) as (progress, task_id):
            roadmaps = RoadmapSet.build(
                model, self.config.roadmap,
                on_progress=lambda steps: progress.update(task_id, advance=steps),
            )
        files = roadmaps.save(output_dir)
        outcome = CommandOutcome(
            command="build-roadmap",
            outputs={name: path for name, path in files.items()},
            summary={
                "config_hash": model.config_hash,
                "vertices": {rm.limb_name: rm.vertex_count for rm in roadmaps},
                "edges": {rm.limb_name: rm.edge_count for rm in roadmaps},
            },
        )
        return self._finish(outcome, output_dir, {"robot_config": self.config.robot_config}, started)

    # Planning

    def make_planner(self, grid: GridMap, roadmaps: RoadmapSet) -> InitPlanner:
        cfg = self.config
        return InitPlanner(
            grid,
            self.model,
            roadmaps,
            config=cfg.planner,
            sampler=cfg.sampler,
            finalize=cfg.finalize,
            sdf_margin=cfg.preprocessing.traversability.sdf_margin,
            grounded_threshold=cfg.roadmap.grounded_threshold,
            deterministic=cfg.deterministic,
        )

    def plan(
        self,
        map_file: Path,
        roadmap_dir: Path,
        output: Path,
        start: Optional[SE2Pose] = None,
        goal: Optional[SE2Pose] = None,
    ) -> CommandOutcome:
        """Plan between two planar poses; missing poses come from the map sidecar.

        Raises:
            PlanningError: Infeasible start or goal, or no solution in budget.
            ValueError: No poses given and no sidecar next to the map.
        """
        started = time.perf_counter()
        map_file, output = Path(map_file), Path(output)
        if start is None or goal is None:
            suggested = read_sidecar_poses(map_file)
            if suggested is None:
                raise ValueError("start and goal are required when the map has no sidecar")
            start = start or suggested[0]
            goal = goal or suggested[1]

        grid = load_map(map_file)
        roadmaps = RoadmapSet.load(roadmap_dir, self.model)
        path = self.make_planner(grid, roadmaps).plan(start, goal)

        output.parent.mkdir(parents=True, exist_ok=True)
        save_plan(path, self.model, output)
        outcome = CommandOutcome(
            command="plan",
            outputs={"plan": output},
            summary=plan_summary(path),
        )
        return self._finish(outcome, output, {"map": map_file, "roadmaps": roadmap_dir}, started)

    # Refinement

    def refine(self, plan_file: Path, map_file: Path, output: Path) -> CommandOutcome:
        """Refine a plan; an unsuccessful report is an outcome, not an error."""
        started = time.perf_counter()
        plan_file, output = Path(plan_file), Path(output)
        path = load_plan(plan_file, self.model)
        grid = load_map(map_file)
        cfg = self.config
        problem = transcribe(path, grid, self.model, cfg.refine.dt, cfg.refine, cfg.solver,
                             traversability=cfg.preprocessing.traversability)
        if cfg.refine.seed_mode == SeedMode.LINEAR:
            problem = seed_linear(problem)
        trajectory, report = PenaltySolver(cfg.solver, cfg.deterministic).solve(
            problem, seed_mode=cfg.refine.seed_mode.value)

        output.parent.mkdir(parents=True, exist_ok=True)
        save_plan(trajectory.path, self.model, output, kind="refined")
        report_file = report_path(output)
        write_model_json(report, report_file)
        outcome = CommandOutcome(
            command="refine",
            success=report.success,
            outputs={"trajectory": output, "report": report_file},
            summary={
                "success": report.success,
                "knots": report.knots,
                "outer_iterations": report.outer_iterations,
                "final_violation": report.final_violation,
            },
        )
        return self._finish(outcome, output, {"plan": plan_file, "map": map_file}, started)

    # Export

    def export(self, source: Path, output_dir: Path) -> CommandOutcome:
        """Write plot-ready CSV files for a map or a plan/trajectory file."""
        started = time.perf_counter()
        source, output_dir = Path(source), Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        if source.suffix == ".json":
            files = export_plan_csv(load_plan(source, self.model), self.model, output_dir)
            kind = "plan"
        else:
            files = export_csv(load_map(source), output_dir)
            kind = "map"
        outcome = CommandOutcome(
            command="export",
            outputs={f.stem: f for f in files},
            summary={"kind": kind, "files": len(files)},
        )
        return self._finish(outcome, output_dir, {"source": source}, started)


def plan_summary(path: WholeBodyPath) -> Dict[str, Any]:
    """Metrics recorded in plan manifests and sweep rows."""
    metrics = path.metrics
    return {
        "phases": len(path.phases),
        "states": len(path.states()),
        "duration": path.duration,
        "arc_length": path.arc_length(),
        "contact_breaks": path.contact_breaks(),
        "iterations": metrics.iterations,
        "iterations_to_first_solution": metrics.iterations_to_first_solution,
        "time_to_first_solution": metrics.time_to_first_solution,
        "initial_cost": metrics.initial_cost,
        "final_cost": metrics.final_cost,
    }


def export_plan_csv(path: WholeBodyPath, model: RobotModel, output_dir: Path) -> List[Path]:
    """``states.csv`` (one row per state) and ``phases.csv`` (one row per phase)."""
    joint_names = [f"{limb.name}_q{j}" for limb in model.limbs for j in range(limb.dof)]
    contact_names = [f"{name}_contact" for name in model.limb_names]
    state_fields = ["phase", "time", "x", "y", "z", "roll", "pitch", "yaw"] + contact_names + joint_names

    rows = []
    for index, phase in enumerate(path.phases):
        for state, t in zip(phase.states, phase.times):
            roll, pitch, yaw = state.base_pose.euler()
            row = {"phase": index, "time": t, "roll": roll, "pitch": pitch, "yaw": yaw}
            row.update(zip(("x", "y", "z"), (float(v) for v in state.base_pose.position)))
            row.update(zip(contact_names, (int(flag) for flag in state.contacts)))
            row.update(zip(joint_names, (float(v) for v in state.q)))
            rows.append(row)
    states_file = output_dir / "states.csv"
    write_csv(rows, state_fields, states_file)

    phase_rows = [
        {"phase": i, "start": phase.times[0] if phase.times else 0.0, "duration": phase.duration,
         "contacts": "".join("1" if c else "0" for c in phase.contacts)}
        for i, phase in enumerate(path.phases)
    ]
    phases_file = output_dir / "phases.csv"
    write_csv(phase_rows, ["phase", "start", "duration", "contacts"], phases_file)
    return [states_file, phases_file]
