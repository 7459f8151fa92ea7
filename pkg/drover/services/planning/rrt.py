"""Optimizing RRT over planar base poses with Reeds-Shepp steering.

Every connection is discretized into subnodes; each subnode is lifted onto
the terrain and must admit a feasible whole-body state before the edge
enters the tree.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from ...errors import (
    InfeasibleGoalError,
    InfeasibleStartError,
    MissingValueError,
    NoSolutionError,
    NoTraversableCellError,
    OutOfBoundsError,
)
from ...models.config import FinalizeConfig, PlannerConfig, SamplerConfig
from ...models.plan import PlannerMetrics
from ..gridmap import GridMap
from ..reeds_shepp import RSPath, SE2Pose, discretize, shortest_path, truncate, wrap_angle
from ..roadmap import RoadmapSet
from ..robot import RobotModel, WholeBodyState
from ..sampler import PoseLifter
from .feasibility import FeasibilityChecker, contact_changes
from .finalize import PathFinalizer
from .path import WholeBodyPath

logger = structlog.get_logger(__name__)

# Iteration cap used in deterministic mode when none is configured
DETERMINISTIC_ITERATIONS = 300
_SAME_POSE = 1e-9


@dataclass
class TreeNode:
    se2: SE2Pose
    state: WholeBodyState
    parent: Optional[int] = None
    edge: Optional[RSPath] = None
    subnodes: List[WholeBodyState] = field(default_factory=list)
    edge_cost: float = 0.0
    cost: float = 0.0
    children: List[int] = field(default_factory=list)
    at_goal: bool = False


@dataclass
class Connection:
    """Validated steering result between a tree node and a target pose."""

    end: SE2Pose
    path: RSPath
    states: List[WholeBodyState]
    changes: int
    cost: float


def same_pose(a: SE2Pose, b: SE2Pose) -> bool:
    return a.distance_to(b) <= _SAME_POSE and abs(wrap_angle(a.yaw - b.yaw)) <= _SAME_POSE


class InitPlanner:
    """Sampling-based initialization stage producing whole-body paths."""

    def __init__(
        self,
        grid: GridMap,
        model: RobotModel,
        roadmaps: RoadmapSet,
        config: Optional[PlannerConfig] = None,
        sampler: Optional[SamplerConfig] = None,
        finalize: Optional[FinalizeConfig] = None,
        sdf_margin: float = 0.3,
        grounded_threshold: int = 1,
        deterministic: bool = False,
    ):
        self.grid = grid
        self.model = model
        self.roadmaps = roadmaps
        self.config = config or PlannerConfig()
        self.deterministic = deterministic
        self.lifter = PoseLifter(grid, model, roadmaps, sampler, sdf_margin, grounded_threshold)
        self.checker = FeasibilityChecker(grid, model, roadmaps, sdf_margin)
        self.finalizer = PathFinalizer(grid, model, roadmaps, self.checker, finalize)
        self.nodes: List[TreeNode] = []
        self._evaluated: Dict[Tuple[float, float, float], Optional[WholeBodyState]] = {}

        low = grid.origin + grid.resolution
        high = grid.origin + grid.resolution * (np.array([grid.cols, grid.rows]) - 2)
        self._bounds = (low, high)

    # Pose evaluation and steering

    def evaluate(self, pose: SE2Pose) -> Optional[WholeBodyState]:
        """Lift ``pose`` and check whole-body feasibility; ``None`` when infeasible."""
        key = pose.as_tuple()
        if key not in self._evaluated:
            try:
                lifted = self.lifter.lift_pose((pose.x, pose.y), pose.yaw)
                self._evaluated[key] = self.checker.check(lifted.base_pose)
            except (OutOfBoundsError, MissingValueError, NoTraversableCellError):
                self._evaluated[key] = None
        return self._evaluated[key]

    def steer(self, origin: int, target: SE2Pose, cap: bool = True) -> Optional[Connection]:
        """Feasible connection from a tree node towards ``target``.

        With ``cap`` the path is cut at ``max_connection_length``; without it
        longer paths are rejected.
        """
        node = self.nodes[origin]
        path = shortest_path(node.se2, target, self.config.turning_radius)
        length = path.total_length
        if length <= _SAME_POSE:
            return None
        truncated = length > self.config.max_connection_length
        if truncated:
            if not cap:
                return None
            path = truncate(path, self.config.max_connection_length)
            length = path.total_length

        poses = discretize(path, node.se2, self.config.subnode_step)[1:]
        if not truncated:
            poses[-1] = target
        states = []
        for pose in poses:
            state = self.evaluate(pose)
            if state is None:
                return None
            states.append(state)

        changes = 0
        previous = node.state
        for state in states:
            changes += contact_changes(previous.contacts, state.contacts)
            previous = state
        cost = length + self.config.stepping_penalty * changes
        return Connection(end=poses[-1], path=path, states=states, changes=changes, cost=cost)

    def distances(self, target: SE2Pose) -> np.ndarray:
        """Weighted planar plus angular distance from every node to ``target``."""
        xy = np.array([[n.se2.x, n.se2.y] for n in self.nodes])
        yaw = np.array([n.se2.yaw for n in self.nodes])
        w_euclid, w_angular = self.config.connect_cost_weights
        dyaw = np.abs((target.yaw - yaw + math.pi) % (2.0 * math.pi) - math.pi)
        return w_euclid * np.hypot(xy[:, 0] - target.x, xy[:, 1] - target.y) + w_angular * dyaw

    def sample(self, rng: np.random.Generator) -> SE2Pose:
        low, high = self._bounds
        x = rng.uniform(low[0], high[0])
        y = rng.uniform(low[1], high[1])
        return SE2Pose(x, y, rng.uniform(-math.pi, math.pi))

    # Tree maintenance

    def _add(self, parent: int, connection: Connection, goal: SE2Pose) -> int:
        node = TreeNode(
            se2=connection.end,
            state=connection.states[-1],
            parent=parent,
            edge=connection.path,
            subnodes=connection.states,
            edge_cost=connection.cost,
            cost=self.nodes[parent].cost + connection.cost,
            at_goal=same_pose(connection.end, goal),
        )
        self.nodes.append(node)
        index = len(self.nodes) - 1
        self.nodes[parent].children.append(index)
        return index

    def _reparent(self, index: int, parent: int, connection: Connection) -> None:
        node = self.nodes[index]
        self.nodes[node.parent].children.remove(index)
        self.nodes[parent].children.append(index)
        node.parent = parent
        node.edge = connection.path
        node.subnodes = connection.states
        node.edge_cost = connection.cost
        delta = self.nodes[parent].cost + connection.cost - node.cost
        stack = [index]
        while stack:
            current = self.nodes[stack.pop()]
            current.cost += delta
            stack.extend(current.children)

    def _near(self, target: SE2Pose) -> List[int]:
        distances = self.distances(target)
        count = min(self.config.rewire_neighbors, len(self.nodes))
        order = np.argsort(distances, kind="stable")[:count]
        return [int(i) for i in order]

    def _lower_bound(self, origin: int, target: SE2Pose) -> float:
        node = self.nodes[origin]
        return node.cost + shortest_path(node.se2, target, self.config.turning_radius).total_length

    def _extend(self, target: SE2Pose, goal: SE2Pose) -> Optional[int]:
        nearest = int(np.argmin(self.distances(target)))
        connection = self.steer(nearest, target, cap=True)
        if connection is None:
            return None
        end = connection.end

        parent, best = nearest, self.nodes[nearest].cost + connection.cost
        near = [i for i in self._near(end) if i != nearest]
        bounds = sorted((self._lower_bound(i, end), i) for i in near)
        for bound, candidate in bounds:
            if bound >= best:
                break
            alternative = self.steer(candidate, end, cap=False)
            if alternative is not None and self.nodes[candidate].cost + alternative.cost < best:
                parent, connection = candidate, alternative
                best = self.nodes[candidate].cost + alternative.cost
        index = self._add(parent, connection, goal)

        for other in near:
            if other == parent or self.nodes[other].parent is None:
                continue
            if self._lower_bound(index, self.nodes[other].se2) >= self.nodes[other].cost:
                continue
            rewired = self.steer(index, self.nodes[other].se2, cap=False)
            if rewired is not None and self.nodes[index].cost + rewired.cost < self.nodes[other].cost:
                self._reparent(other, index, rewired)
        return index

    def _connect_goal(self, index: int, goal: SE2Pose, best_cost: float) -> None:
        node = self.nodes[index]
        if node.at_goal or node.se2.distance_to(goal) > self.config.max_connection_length:
            return
        if self._lower_bound(index, goal) >= best_cost:
            return
        connection = self.steer(index, goal, cap=False)
        if connection is not None:
            self._add(index, connection, goal)

    def _best_goal(self) -> Tuple[Optional[int], float]:
        best, cost = None, math.inf
        for i, node in enumerate(self.nodes):
            if node.at_goal and node.cost < cost:
                best, cost = i, node.cost
        return best, cost

    def _budget_left(self, iteration: int, started: float) -> bool:
        cap = self.config.max_iterations
        if cap is None and self.deterministic:
            cap = DETERMINISTIC_ITERATIONS
        if cap is not None:
            return iteration < cap
        return time.perf_counter() - started < self.config.time_budget

    # Entry point

    def plan(self, start: SE2Pose, goal: SE2Pose) -> WholeBodyPath:
        """Plan a whole-body path between two planar poses.

        Raises:
            InfeasibleStartError: The lifted start pose is infeasible.
            InfeasibleGoalError: The lifted goal pose is infeasible.
            NoSolutionError: No goal connection within the budget.
        """
        started = time.perf_counter()
        start_state = self.evaluate(start)
        if start_state is None:
            raise InfeasibleStartError(f"Start pose {start.as_tuple()} is infeasible")
        if self.evaluate(goal) is None:
            raise InfeasibleGoalError(f"Goal pose {goal.as_tuple()} is infeasible")

        self.nodes = [TreeNode(se2=start, state=start_state, at_goal=same_pose(start, goal))]
        metrics = PlannerMetrics()
        logger.info("Planning started", start=start.as_tuple(), goal=goal.as_tuple(),
                    deterministic=self.deterministic)

        rng = np.random.default_rng(self.config.seed)
        best, best_cost = self._best_goal()
        if best is not None:
            metrics.iterations_to_first_solution = 0
            metrics.cost_history.append((0, 0.0))
        iteration = 0
        while not self.nodes[0].at_goal and self._budget_left(iteration, started):
            iteration += 1
            target = goal if rng.random() < self.config.goal_bias else self.sample(rng)
            index = self._extend(target, goal)
            if index is not None:
                self._connect_goal(index, goal, best_cost)
            candidate, cost = self._best_goal()
            if candidate is not None and cost < best_cost:
                if best is None:
                    metrics.iterations_to_first_solution = iteration
                    if not self.deterministic:
                        metrics.time_to_first_solution = time.perf_counter() - started
                    logger.info("First solution", iteration=iteration, cost=round(cost, 3))
                best, best_cost = candidate, cost
                metrics.cost_history.append((iteration, cost))

        metrics.iterations = iteration
        metrics.tree_size = len(self.nodes)
        if best is None:
            raise NoSolutionError(f"No solution after {iteration} iterations ({len(self.nodes)} nodes)")
        metrics.initial_cost = metrics.cost_history[0][1]
        metrics.final_cost = self.nodes[best].cost

        path = self.finalizer.finalize(self.extract(best), start, goal, metrics)
        metrics.contact_changes = sum(
            contact_changes(a.contacts, b.contacts) for a, b in zip(path.phases, path.phases[1:])
        )
        logger.info(
            "Planning finished",
            iterations=iteration,
            nodes=len(self.nodes),
            cost=round(metrics.final_cost, 3),
            phases=len(path.phases),
        )
        return path

    def extract(self, index: int) -> List[WholeBodyState]:
        """State sequence from the root to node ``index``."""
        chain = []
        while index is not None:
            chain.append(self.nodes[index])
            index = self.nodes[index].parent
        chain.reverse()
        states = [chain[0].state]
        for node in chain[1:]:
            states.extend(node.subnodes)
        return states


def plan(
    model: RobotModel,
    grid: GridMap,
    roadmaps: RoadmapSet,
    start: SE2Pose,
    goal: SE2Pose,
    config: Optional[PlannerConfig] = None,
    **kwargs,
) -> WholeBodyPath:
    """Plan with a fresh ``InitPlanner``; keyword arguments go to its constructor."""
    return InitPlanner(grid, model, roadmaps, config, **kwargs).plan(start, goal)
