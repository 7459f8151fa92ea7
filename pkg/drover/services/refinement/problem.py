"""Transcription of whole-body paths into knot-based refinement problems.

Each knot holds the base pose as (x, y, z, roll, pitch, yaw) followed by the
concatenated joint vector. Contact flags come from the input schedule and
never change; the first and last base poses are pinned.
"""

import bisect
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
import structlog

from ...errors import EmptyPathError, RefinementError
from ...models.config import RefineConfig, SolverConfig, TraversabilityParams
from ...models.enums import InterpolationMethod
from ...models.plan import PlannerMetrics
from ..gridmap import GridMap
from ..planning import PlanPhase, WholeBodyPath, contact_runs
from ..reeds_shepp import SE2Pose
from ..robot import GRAVITY_UP, CollisionModel, Pose3, RobotModel, WholeBodyState

logger = structlog.get_logger(__name__)

BASE_VARIABLES = 6


@dataclass
class RefinementProblem:
    grid: GridMap
    model: RobotModel
    collision: CollisionModel
    dt: float
    times: np.ndarray
    contacts: np.ndarray
    x0: np.ndarray
    free: np.ndarray
    start: SE2Pose
    goal: SE2Pose
    height_layer: str = "elevation_filled"
    interpolation: InterpolationMethod = InterpolationMethod.BICUBIC_CONVOLUTION
    d_min: float = 0.15
    sdf_margin: float = 0.3
    hinge_margin: float = 0.01
    terrain_fd_step: float = 1e-5
    metrics: Optional[PlannerMetrics] = None

    @property
    def knots(self) -> int:
        return len(self.times)

    @property
    def variables_per_knot(self) -> int:
        return BASE_VARIABLES + self.model.dof

    def joints(self, x: np.ndarray) -> np.ndarray:
        return x[:, BASE_VARIABLES:]


def state_variables(state: WholeBodyState) -> np.ndarray:
    roll, pitch, yaw = state.base_pose.euler()
    return np.concatenate([state.base_pose.position, [roll, pitch, yaw], state.q])


def knot_count(duration: float, dt: float) -> int:
    """Knots covering ``duration`` at spacing ``dt`` with both ends included."""
    return max(int(math.ceil(duration / dt - 1e-9)) + 1, 2)


def transcribe(
    path: WholeBodyPath,
    grid: GridMap,
    model: RobotModel,
    dt: float,
    refine: Optional[RefineConfig] = None,
    solver: Optional[SolverConfig] = None,
    collision: Optional[CollisionModel] = None,
    traversability: Optional[TraversabilityParams] = None,
) -> RefinementProblem:
    """Resample ``path`` at ``dt`` into an initialized refinement problem.

    Contacts must keep the same signed distance ``sdf_margin`` from
    untraversable terrain that the planner required.

    Raises:
        EmptyPathError: The path holds no states.
        RefinementError: ``dt`` is not positive.
    """
    if dt <= 0:
        raise RefinementError(f"dt must be positive, got {dt}")
    states = path.states()
    if not states:
        raise EmptyPathError("Cannot transcribe an empty path")
    refine = refine or RefineConfig()
    solver = solver or SolverConfig()
    traversability = traversability or TraversabilityParams()

    state_times = [float(t) for t in path.times()]
    rows = np.array([state_variables(state) for state in states])
    rows[:, 3:6] = np.unwrap(rows[:, 3:6], axis=0)
    duration = state_times[-1] - state_times[0]
    count = knot_count(duration, dt)
    times = np.minimum(state_times[0] + dt * np.arange(count), state_times[-1])

    x0 = np.empty((count, rows.shape[1]))
    contacts = np.empty((count, len(model.limbs)), dtype=bool)
    for k, t in enumerate(times):
        i = min(max(bisect.bisect_right(state_times, t) - 1, 0), len(states) - 1)
        contacts[k] = states[i].contacts
        if i == len(states) - 1 or state_times[i + 1] <= state_times[i]:
            x0[k] = rows[i]
        else:
            fraction = (t - state_times[i]) / (state_times[i + 1] - state_times[i])
            x0[k] = (1.0 - fraction) * rows[i] + fraction * rows[i + 1]
    x0[0, :BASE_VARIABLES] = rows[0, :BASE_VARIABLES]
    x0[-1, :BASE_VARIABLES] = rows[-1, :BASE_VARIABLES]

    free = np.ones_like(x0, dtype=bool)
    free[0, :BASE_VARIABLES] = False
    free[-1, :BASE_VARIABLES] = False

    problem = RefinementProblem(
        grid=grid,
        model=model,
        collision=collision or model.collision,
        dt=float(dt),
        times=times,
        contacts=contacts,
        x0=x0,
        free=free,
        start=path.start,
        goal=path.goal,
        height_layer=refine.height_layer,
        interpolation=refine.interpolation,
        d_min=solver.d_min,
        sdf_margin=traversability.sdf_margin,
        hinge_margin=solver.hinge_margin,
        terrain_fd_step=solver.terrain_fd_step,
        metrics=path.metrics,
    )
    logger.debug("Path transcribed", knots=count, dt=dt, duration=round(duration, 3))
    return problem


def seed_linear(problem: RefinementProblem) -> RefinementProblem:
    """Same problem seeded with a straight start-to-goal interpolation."""
    first, last = problem.x0[0], problem.x0[-1]
    span = problem.times[-1] - problem.times[0]
    if span > 0:
        fraction = (problem.times - problem.times[0]) / span
    else:
        fraction = np.zeros(problem.knots)
    x0 = (1.0 - fraction)[:, None] * first + fraction[:, None] * last
    x0[0], x0[-1] = first, last
    return replace(problem, x0=x0)


def project_joints(problem: RefinementProblem, x: np.ndarray) -> np.ndarray:
    """Clip every joint into its limits."""
    x = x.copy()
    x[:, BASE_VARIABLES:] = np.clip(
        x[:, BASE_VARIABLES:], problem.model.lower_limits(), problem.model.upper_limits())
    return x


def knot_pose(row: np.ndarray) -> Pose3:
    return Pose3.from_euler(row[:3], row[3], row[4], row[5])


def knot_state(problem: RefinementProblem, x: np.ndarray, k: int) -> WholeBodyState:
    """Whole-body state at knot ``k`` with kinematic contact points."""
    model = problem.model
    pose = knot_pose(x[k])
    q = x[k, BASE_VARIABLES:].copy()
    points: List[Optional[np.ndarray]] = []
    for i, (limb, q_i) in enumerate(zip(model.limbs, model.split(q))):
        if problem.contacts[k, i]:
            point = pose.transform(limb.ee_positions(q_i)[0])
            if limb.wheeled:
                point = point - model.wheel_radius * GRAVITY_UP
            points.append(point)
        else:
            points.append(None)
    return WholeBodyState(pose, q, tuple(bool(c) for c in problem.contacts[k]), tuple(points))


def to_path(problem: RefinementProblem, x: np.ndarray) -> WholeBodyPath:
    """Dense knot trajectory grouped into constant-contact phases."""
    states = [knot_state(problem, x, k) for k in range(problem.knots)]
    runs = contact_runs(states)
    phases = []
    for n, run in enumerate(runs):
        end_time = problem.times[runs[n + 1][0]] if n + 1 < len(runs) else problem.times[-1]
        phases.append(PlanPhase(
            duration=float(end_time - problem.times[run[0]]),
            contacts=states[run[0]].contacts,
            states=[states[k] for k in run],
            times=[float(problem.times[k]) for k in run],
        ))
    path = WholeBodyPath(start=problem.start, goal=problem.goal, phases=phases)
    if problem.metrics is not None:
        path.metrics = problem.metrics
    return path


def endpoint_error(problem: RefinementProblem, x: np.ndarray) -> Tuple[float, float]:
    """Largest deviation of the first and last base poses from their pinned values."""
    start = float(np.max(np.abs(x[0, :BASE_VARIABLES] - problem.x0[0, :BASE_VARIABLES])))
    goal = float(np.max(np.abs(x[-1, :BASE_VARIABLES] - problem.x0[-1, :BASE_VARIABLES])))
    return start, goal
