"""drover - two-stage motion planning for legged-wheeled robots.

Thin entrypoint that uses Typer for the CLI and delegates to the pipeline
workflows.
"""

from pathlib import Path
from typing import List, Optional

import typer

from cli_helpers import CommandRunner, GlobalOptions
from drover.models.enums import SeedMode, TerrainFamily
from drover.services.orchestration import EvaluationSweep
from drover.services.reeds_shepp import SE2Pose

app = typer.Typer(
    help="Terrain-aware whole-body planning for legged-wheeled robots.",
    no_args_is_help=True,
    add_completion=False,
)


def _parse_pose(value: Optional[str]) -> Optional[SE2Pose]:
    """Parse ``x,y,yaw`` into a planar pose."""
    if value is None:
        return None
    try:
        x, y, yaw = (float(part) for part in value.split(","))
    except ValueError:
        raise typer.BadParameter(f"expected 'x,y,yaw', got {value!r}")
    return SE2Pose(x, y, yaw)


def _parse_families(value: Optional[str]) -> Optional[List[TerrainFamily]]:
    if value is None:
        return None
    try:
        return [TerrainFamily(name.strip()) for name in value.split(",") if name.strip()]
    except ValueError:
        valid = ", ".join(f.value for f in TerrainFamily)
        raise typer.BadParameter(f"unknown family in {value!r}; valid families: {valid}")


# Global options

def _get_config_option():
    """Get config file option definition."""
    return typer.Option(
        Path("config.yaml"),
        "--config",
        "-c",
        help="Path to YAML configuration file",
    )

def _get_seed_option():
    """Get global seed option definition."""
    return typer.Option(
        None,
        "--seed",
        help="Seed applied to terrain, roadmap, planner and sweep sections",
    )

def _get_deterministic_option():
    """Get deterministic mode option definition."""
    return typer.Option(
        None,
        "--deterministic/--wall-clock",
        help="Use iteration budgets and omit wall-clock metrics",
    )

def _get_out_option():
    """Get output directory option definition."""
    return typer.Option(
        None,
        "--out",
        "-o",
        help="Base output directory (overrides output_directory)",
    )

def _get_log_level_option():
    """Get log level option definition."""
    return typer.Option(
        None,
        "--log-level",
        "-l",
        help="Set logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL",
    )


# Command options

def _get_output_option(what: str):
    """Get per-command output path option definition."""
    return typer.Option(
        None,
        "--output",
        help=f"Where to write the {what} (default: inside the output directory)",
    )

def _get_roadmaps_option():
    """Get roadmap directory option definition."""
    return typer.Option(
        None,
        "--roadmaps",
        help="Directory holding one roadmap file per limb",
    )


@app.callback()
def main(
    ctx: typer.Context,
    config: Path = _get_config_option(),
    seed: Optional[int] = _get_seed_option(),
    deterministic: Optional[bool] = _get_deterministic_option(),
    out: Optional[Path] = _get_out_option(),
    log_level: Optional[str] = _get_log_level_option(),
) -> None:
    """Plan whole-body motions over rough terrain.

    Pipeline: gen-terrain (or preprocess) -> build-roadmap -> plan -> refine,
    with eval for success-rate sweeps and export for plot-ready CSV.
    """
    ctx.obj = GlobalOptions(config=config, seed=seed, deterministic=deterministic,
                            out=out, log_level=log_level)


def _runner(ctx: typer.Context) -> CommandRunner:
    return CommandRunner(ctx.obj)


def _finish(code: int) -> None:
    if code:
        raise typer.Exit(code)


@app.command("gen-terrain")
def gen_terrain(
    ctx: typer.Context,
    family: Optional[TerrainFamily] = typer.Option(None, "--family", help="Terrain family"),
    difficulty: Optional[float] = typer.Option(None, "--difficulty", help="Difficulty in [0, 1]"),
    output: Optional[Path] = _get_output_option("map file"),
) -> None:
    """Generate a procedural, plan-ready map and its ground-truth sidecar."""
    def workflow(workflows):
        spec = workflows.config.terrain
        target = output or (workflows.config.output_directory / "maps"
                            / f"{spec.family.value}_{spec.difficulty:.2f}_s{spec.seed}.dmap")
        return workflows.gen_terrain(spec, target)

    _finish(_runner(ctx).run("gen-terrain", workflow, family=family, difficulty=difficulty))


@app.command("preprocess")
def preprocess(
    ctx: typer.Context,
    map_file: Path = typer.Argument(..., help="Map file with an elevation layer"),
    output: Optional[Path] = _get_output_option("pre-processed map"),
) -> None:
    """Derive normals, smoothed elevation, traversability and SDF layers."""
    def workflow(workflows):
        target = output or workflows.config.output_directory / "maps" / f"{map_file.stem}_pre.dmap"
        return workflows.preprocess_map(map_file, target)

    _finish(_runner(ctx).run("preprocess", workflow))


@app.command("build-roadmap")
def build_roadmap(
    ctx: typer.Context,
    robot: Optional[Path] = typer.Option(None, "--robot", help="Robot description file"),
    leg_vertices: Optional[int] = typer.Option(None, "--leg-vertices", help="Vertices per leg"),
    arm_vertices: Optional[int] = typer.Option(None, "--arm-vertices", help="Vertices of the arm"),
    output: Optional[Path] = _get_output_option("roadmap directory"),
) -> None:
    """Build one configuration roadmap per limb."""
    def workflow(workflows):
        return workflows.build_roadmaps(output or workflows.config.output_directory / "roadmaps")

    _finish(_runner(ctx).run("build-roadmap", workflow, robot_config=robot,
                             leg_vertices=leg_vertices, arm_vertices=arm_vertices))


@app.command("plan")
def plan(
    ctx: typer.Context,
    map_file: Path = typer.Argument(..., help="Pre-processed map file"),
    roadmaps: Optional[Path] = _get_roadmaps_option(),
    start: Optional[str] = typer.Option(None, "--start", help="Start pose 'x,y,yaw' (default: sidecar)"),
    goal: Optional[str] = typer.Option(None, "--goal", help="Goal pose 'x,y,yaw' (default: sidecar)"),
    stepping_penalty: Optional[float] = typer.Option(None, "--stepping-penalty", help="Cost per contact change"),
    max_iterations: Optional[int] = typer.Option(None, "--max-iterations", help="Iteration budget"),
    time_budget: Optional[float] = typer.Option(None, "--time-budget", help="Wall-clock budget (s)"),
    output: Optional[Path] = _get_output_option("plan file"),
) -> None:
    """Plan a whole-body path between two planar poses."""
    start_pose, goal_pose = _parse_pose(start), _parse_pose(goal)

    def workflow(workflows):
        base = workflows.config.output_directory
        target = output or base / "plans" / f"{map_file.stem}.plan.json"
        return workflows.plan(map_file, roadmaps or base / "roadmaps", target, start_pose, goal_pose)

    _finish(_runner(ctx).run("plan", workflow, stepping_penalty=stepping_penalty,
                             max_iterations=max_iterations, time_budget=time_budget))


@app.command("refine")
def refine(
    ctx: typer.Context,
    plan_file: Path = typer.Argument(..., help="Plan file written by 'plan'"),
    map_file: Path = typer.Argument(..., help="Map the plan was computed on"),
    seed_mode: Optional[SeedMode] = typer.Option(None, "--seed-mode", help="Initial trajectory source"),
    dt: Optional[float] = typer.Option(None, "--dt", help="Knot spacing (s)"),
    clip_threshold: Optional[float] = typer.Option(None, "--clip-threshold", help="Terrain gradient cap"),
    output: Optional[Path] = _get_output_option("refined trajectory"),
) -> None:
    """Refine a plan into a trajectory satisfying the terrain constraints."""
    def workflow(workflows):
        name = plan_file.name.replace(".plan.json", "") if plan_file.name.endswith(".plan.json") else plan_file.stem
        target = output or plan_file.parent / f"{name}.refined.json"
        return workflows.refine(plan_file, map_file, target)

    _finish(_runner(ctx).run("refine", workflow, seed_mode=seed_mode, dt=dt, clip_threshold=clip_threshold))


@app.command("eval")
def evaluate(
    ctx: typer.Context,
    families: Optional[str] = typer.Option(None, "--families", help="Comma-separated terrain families"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Trials per family and difficulty"),
    max_workers: Optional[int] = typer.Option(None, "--max-workers", help="Parallel trial workers"),
    roadmaps: Optional[Path] = _get_roadmaps_option(),
    output: Optional[Path] = _get_output_option("sweep directory"),
) -> None:
    """Run a success-rate sweep over terrain families and difficulties."""
    family_list = _parse_families(families)

    def workflow(workflows):
        target = output or workflows.config.output_directory / "eval"
        return EvaluationSweep(workflows.config, workflows.progress_service).run(target, roadmaps)

    _finish(_runner(ctx).run("eval", workflow, families=family_list, trials=trials, max_workers=max_workers))


@app.command("export")
def export(
    ctx: typer.Context,
    source: Path = typer.Argument(..., help="Map file or plan/trajectory JSON"),
    output: Optional[Path] = _get_output_option("CSV directory"),
) -> None:
    """Write plot-ready CSV files for a map or a trajectory."""
    def workflow(workflows):
        return workflows.export(source, output or workflows.config.output_directory / "export" / source.stem)

    _finish(_runner(ctx).run("export", workflow))


if __name__ == "__main__":
    app()
