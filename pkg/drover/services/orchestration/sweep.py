"""Evaluation sweeps over terrain families and difficulties.

Every (family, difficulty, trial) triple is an independent run with its own
derived seed: generate and pre-process a map, plan across it, and refine the
result from the planner seed and from a straight-line seed. Failed runs are
recorded and the sweep continues.
"""

import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import structlog

from ...errors import DroverError
from ...models.config import AppConfig, TerrainSpec
from ...models.enums import TerrainFamily
from ..configuration import ConfigurationLoader
from ..planning import InitPlanner, save_plan
from ..progress_service import ProgressService
from ..reeds_shepp import SE2Pose
from ..refinement import PenaltySolver, seed_linear, transcribe
from ..roadmap import RoadmapSet
from ..robot import RobotModel
from ..storage import build_manifest, write_csv, write_manifest
from ..terrain import generate_with_labels, preprocess
from .workflows import CommandOutcome, plan_summary

logger = structlog.get_logger(__name__)

RUN_FIELDS = [
    "family", "difficulty", "trial", "seed", "success", "error",
    "iterations", "iterations_to_first_solution", "time_to_first_solution",
    "initial_cost", "final_cost", "contact_breaks", "duration",
    "refine_init_success", "refine_init_violation",
    "refine_linear_success", "refine_linear_violation",
]
RATE_FIELDS = [
    "family", "difficulty", "trials", "successes", "success_rate",
    "mean_iterations_to_first_solution", "mean_time_to_first_solution",
    "mean_initial_cost", "mean_final_cost", "mean_contact_breaks",
]
SEEDING_FIELDS = [
    "family", "difficulty", "planned",
    "init_successes", "init_success_rate", "linear_successes", "linear_success_rate",
]


def trial_seed(sweep_seed: int, family: TerrainFamily, difficulty_index: int, trial: int) -> int:
    """Seed of one trial, independent of worker count and sweep ordering."""
    family_index = list(TerrainFamily).index(family)
    sequence = np.random.SeedSequence([sweep_seed, family_index, difficulty_index, trial])
    return int(sequence.generate_state(1)[0])


def trial_key(family: str, difficulty: float, trial: int) -> str:
    return f"{family}_d{difficulty:.2f}_t{trial}"


@dataclass(frozen=True)
class TrialTask:
    """Everything a worker process needs to run one trial."""

    config: AppConfig
    family: TerrainFamily
    difficulty: float
    trial: int
    seed: int
    roadmap_dir: Path
    trial_dir: Path

    @property
    def trial_id(self) -> str:
        return trial_key(self.family.value, self.difficulty, self.trial)


def _trial_config(task: TrialTask) -> AppConfig:
    config = task.config.model_copy(deep=True)
    config.planner.max_iterations = config.sweep.max_iterations
    config.planner.seed = task.seed
    return config


def _refine_row(config: AppConfig, path, grid, model: RobotModel) -> Dict[str, Any]:
    solver = PenaltySolver(config.solver, config.deterministic)
    problem = transcribe(path, grid, model, config.refine.dt, config.refine, config.solver,
                         traversability=config.preprocessing.traversability)
    _, init_report = solver.solve(problem, seed_mode="init")
    row: Dict[str, Any] = {
        "refine_init_success": init_report.success,
        "refine_init_violation": max(init_report.final_violation.values(), default=0.0),
    }
    if config.sweep.compare_linear:
        _, linear_report = solver.solve(seed_linear(problem), seed_mode="linear")
        row["refine_linear_success"] = linear_report.success
        row["refine_linear_violation"] = max(linear_report.final_violation.values(), default=0.0)
    return row


def run_trial(task: TrialTask) -> Dict[str, Any]:
    """Run one trial; planner and refinement failures become row fields."""
    started = time.perf_counter()
    config = _trial_config(task)
    row: Dict[str, Any] = {
        "family": task.family.value,
        "difficulty": task.difficulty,
        "trial": task.trial,
        "seed": task.seed,
        "success": False,
        "error": None,
    }
    try:
        spec = TerrainSpec(
            family=task.family,
            difficulty=task.difficulty,
            seed=task.seed,
            extent=config.sweep.extent,
            resolution=config.sweep.resolution,
        )
        raw, labels = generate_with_labels(spec)
        grid = preprocess(raw, config.preprocessing)
        model = RobotModel(ConfigurationLoader().load_robot_spec(config.robot_config))
        roadmaps = RoadmapSet.load(task.roadmap_dir, model)
        planner = InitPlanner(
            grid, model, roadmaps,
            config=config.planner,
            sampler=config.sampler,
            finalize=config.finalize,
            sdf_margin=config.preprocessing.traversability.sdf_margin,
            grounded_threshold=config.roadmap.grounded_threshold,
            deterministic=config.deterministic,
        )
        path = planner.plan(SE2Pose(*labels.start), SE2Pose(*labels.goal))
        row.update(plan_summary(path))
        row["success"] = True
        save_plan(path, model, task.trial_dir / f"{task.trial_id}.plan.json")
        if config.sweep.refine:
            row.update(_refine_row(config, path, grid, model))
    except DroverError as e:
        row["error"] = type(e).__name__
        logger.info("Trial failed", trial=task.trial_id, error=type(e).__name__, message=str(e))

    timings = {} if config.deterministic else {"wall_time": time.perf_counter() - started}
    manifest = build_manifest(
        "eval-trial", config,
        inputs={"roadmaps": task.roadmap_dir},
        timings=timings,
        summary={key: row.get(key) for key in RUN_FIELDS},
    )
    write_manifest(manifest, task.trial_dir / f"{task.trial_id}.manifest.json")
    return {key: row.get(key) for key in RUN_FIELDS}


def _mean(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [float(v) for v in values if v is not None]
    return float(np.mean(present)) if present else None


def _rate(hits: int, total: int) -> Optional[float]:
    return hits / total if total else None


def success_rates(rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """One row per (family, difficulty); means are over successful trials."""
    table = []
    for (family, difficulty), group in _grouped(rows).items():
        solved = [r for r in group if r["success"]]
        table.append({
            "family": family,
            "difficulty": difficulty,
            "trials": len(group),
            "successes": len(solved),
            "success_rate": len(solved) / len(group),
            "mean_iterations_to_first_solution": _mean(r["iterations_to_first_solution"] for r in solved),
            "mean_time_to_first_solution": _mean(r["time_to_first_solution"] for r in solved),
            "mean_initial_cost": _mean(r["initial_cost"] for r in solved),
            "mean_final_cost": _mean(r["final_cost"] for r in solved),
            "mean_contact_breaks": _mean(r["contact_breaks"] for r in solved),
        })
    return table


def seeding_comparison(rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """Refinement success from planner seeds against straight-line seeds."""
    table = []
    for (family, difficulty), group in _grouped(rows).items():
        planned = [r for r in group if r["refine_init_success"] is not None]
        compared = [r for r in planned if r["refine_linear_success"] is not None]
        init_hits = sum(1 for r in planned if r["refine_init_success"])
        linear_hits = sum(1 for r in compared if r["refine_linear_success"])
        table.append({
            "family": family,
            "difficulty": difficulty,
            "planned": len(planned),
            "init_successes": init_hits,
            "init_success_rate": _rate(init_hits, len(planned)),
            "linear_successes": linear_hits,
            "linear_success_rate": _rate(linear_hits, len(compared)),
        })
    return table


def _grouped(rows: List[Dict[str, Any]]) -> Dict[tuple, List[Dict[str, Any]]]:
    groups: Dict[tuple, List[Dict[str, Any]]] = {}
    for row in rows:
        groups.setdefault((row["family"], row["difficulty"]), []).append(row)
    return groups


class EvaluationSweep:
    """Runs trials in a process pool, falling back to sequential execution."""

    def __init__(self, config: AppConfig, progress_service: Optional[ProgressService] = None):
        self.config = config
        self.progress_service = progress_service or ProgressService()
        self.logger = structlog.get_logger(__name__)

    def tasks(self, roadmap_dir: Path, trial_dir: Path) -> List[TrialTask]:
        sweep = self.config.sweep
        return [
            TrialTask(
                config=self.config,
                family=family,
                difficulty=difficulty,
                trial=trial,
                seed=trial_seed(sweep.seed, family, d_index, trial),
                roadmap_dir=roadmap_dir,
                trial_dir=trial_dir,
            )
            for family in sweep.families
            for d_index, difficulty in enumerate(sweep.difficulties)
            for trial in range(sweep.trials)
        ]

    def prepare_roadmaps(self, output_dir: Path, roadmap_dir: Optional[Path]) -> Path:
        """Reuse ``roadmap_dir`` or build one shared roadmap set for all trials."""
        if roadmap_dir is not None:
            return Path(roadmap_dir)
        model = RobotModel(ConfigurationLoader().load_robot_spec(self.config.robot_config))
        target = output_dir / "roadmaps"
        RoadmapSet.build(model, self.config.roadmap).save(target)
        return target

    def run(self, output_dir: Path, roadmap_dir: Optional[Path] = None) -> CommandOutcome:
        """Run every trial and write ``runs.csv``, ``success_rates.csv`` and ``seeding.csv``."""
        started = time.perf_counter()
        output_dir = Path(output_dir)
        trial_dir = output_dir / "trials"
        trial_dir.mkdir(parents=True, exist_ok=True)
        roadmap_dir = self.prepare_roadmaps(output_dir, roadmap_dir)

        tasks = self.tasks(roadmap_dir, trial_dir)
        self.progress_service.set_total_items(len(tasks))
        rows = self._execute(tasks)
        order = {task.trial_id: i for i, task in enumerate(tasks)}
        rows.sort(key=lambda r: order[trial_key(r["family"], r["difficulty"], r["trial"])])

        outputs = {
            "runs": output_dir / "runs.csv",
            "success_rates": output_dir / "success_rates.csv",
            "seeding": output_dir / "seeding.csv",
        }
        write_csv(rows, RUN_FIELDS, outputs["runs"])
        rates = success_rates(rows)
        write_csv(rates, RATE_FIELDS, outputs["success_rates"])
        write_csv(seeding_comparison(rows), SEEDING_FIELDS, outputs["seeding"])
        self.progress_service.log_final_summary()

        outcome = CommandOutcome(
            command="eval",
            outputs=outputs,
            summary={
                "trials": len(rows),
                "successes": sum(1 for r in rows if r["success"]),
                "success_rates": {f"{r['family']}@{r['difficulty']}": r["success_rate"] for r in rates},
            },
        )
        timings = {} if self.config.deterministic else {"wall_time": time.perf_counter() - started}
        manifest = build_manifest("eval", self.config, inputs={"roadmaps": roadmap_dir},
                                  outputs=outputs, timings=timings, summary=outcome.summary)
        write_manifest(manifest, output_dir / "manifest.json")
        outcome.outputs["manifest"] = output_dir / "manifest.json"
        return outcome

    def _execute(self, tasks: List[TrialTask]) -> List[Dict[str, Any]]:
        workers = min(self.config.sweep.max_workers, len(tasks))
        with self.progress_service.track("Evaluating", total=len(tasks)) as (progress, task_id):
            def record(row: Dict[str, Any]) -> None:
                if row["success"]:
                    self.progress_service.increment_succeeded()
                else:
                    self.progress_service.increment_failed()
                progress.update(task_id, advance=1)

            if workers <= 1:
                return [self._record(run_trial(task), record) for task in tasks]
            return self._run_parallel(tasks, workers, record)

    @staticmethod
    def _record(row: Dict[str, Any], record) -> Dict[str, Any]:
        record(row)
        return row

    def _run_parallel(self, tasks: List[TrialTask], workers: int, record) -> List[Dict[str, Any]]:
        rows: Dict[str, Dict[str, Any]] = {}
        self.logger.info("Starting parallel sweep", trials=len(tasks), max_workers=workers)
        try:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = {executor.submit(run_trial, task): task for task in tasks}
                for future in as_completed(futures):
                    task = futures[future]
                    try:
                        rows[task.trial_id] = self._record(future.result(), record)
                    except BrokenProcessPool:
                        raise
                    except Exception as e:
                        self.logger.error("Trial crashed", trial=task.trial_id, error=str(e))
                        rows[task.trial_id] = self._record(_crashed_row(task, e), record)
        except (BrokenProcessPool, OSError) as e:
            self.logger.warning("Process pool failed, continuing sequentially",
                                error=str(e), finished=len(rows))
        for task in tasks:
            if task.trial_id not in rows:
                rows[task.trial_id] = self._record(run_trial(task), record)
        return list(rows.values())


def _crashed_row(task: TrialTask, error: Exception) -> Dict[str, Any]:
    row = {key: None for key in RUN_FIELDS}
    row.update(family=task.family.value, difficulty=task.difficulty, trial=task.trial,
               seed=task.seed, success=False, error=type(error).__name__)
    return row
