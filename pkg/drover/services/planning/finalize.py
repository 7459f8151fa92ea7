"""Post-processing of raw tree paths into timed whole-body paths."""

from typing import List, Optional, Sequence

import numpy as np
import structlog
from scipy.spatial.distance import cdist

from ...errors import ArmDetourError, IKConvergenceError, NoPathError, ScheduleRepairError
from ...models.config import FinalizeConfig
from ...models.plan import PlannerMetrics
from ..gridmap import GridMap
from ..reeds_shepp import SE2Pose
from ..roadmap import RoadmapSet, contact_points_world, grounded_candidates, invalidate, search_path
from ..robot import GRAVITY_UP, CollisionModel, Pose3, RobotModel, WholeBodyState
from .feasibility import FeasibilityChecker, contact_changes
from .path import PlanPhase, WholeBodyPath

logger = structlog.get_logger(__name__)


def with_limb(
    model: RobotModel,
    state: WholeBodyState,
    limb: int,
    q_limb: np.ndarray,
    contact: bool,
    point: Optional[np.ndarray],
) -> WholeBodyState:
    """Copy of ``state`` with one limb's joints, flag and contact point replaced."""
    q = state.q.copy()
    q[model.slices[limb]] = q_limb
    contacts = list(state.contacts)
    points = list(state.contact_points)
    contacts[limb] = contact
    points[limb] = point if contact else None
    return WholeBodyState(state.base_pose, q, tuple(contacts), tuple(points))


def contact_runs(states: Sequence[WholeBodyState]) -> List[List[int]]:
    """Index runs of consecutive states with identical contact flags."""
    runs: List[List[int]] = []
    for i, state in enumerate(states):
        if runs and states[runs[-1][-1]].contacts == state.contacts:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


class PathFinalizer:
    """Turns the state sequence of a tree path into a ``WholeBodyPath``."""

    def __init__(
        self,
        grid: GridMap,
        model: RobotModel,
        roadmaps: RoadmapSet,
        checker: FeasibilityChecker,
        config: Optional[FinalizeConfig] = None,
        collision: Optional[CollisionModel] = None,
    ):
        self.grid = grid
        self.model = model
        self.roadmaps = roadmaps
        self.checker = checker
        self.config = config or FinalizeConfig()
        self.collision = collision or checker.collision
        self.arm = checker.arm

    def finalize(
        self,
        states: Sequence[WholeBodyState],
        start: SE2Pose,
        goal: SE2Pose,
        metrics: Optional[PlannerMetrics] = None,
    ) -> WholeBodyPath:
        states = self.repair_schedule(states)
        if self.arm is not None:
            states = self.anchor_arm_contacts(states)
            states = self.smooth_arm_motion(states)
            # Full-contact insertions may add several legs at once
            states = self.repair_schedule(states)
        path = self.assign_durations(states, start, goal)
        if metrics is not None:
            path.metrics = metrics
        logger.debug(
            "Path finalized",
            states=len(states),
            phases=len(path.phases),
            duration=round(path.duration, 3),
        )
        return path

    # Contact schedule

    def repair_schedule(self, states: Sequence[WholeBodyState]) -> List[WholeBodyState]:
        """Insert full-contact states wherever several flags change at once.

        Raises:
            ScheduleRepairError: No stable single-contact sequence exists for a switch.
        """
        repaired = [states[0]]
        for state in states[1:]:
            previous = repaired[-1]
            if contact_changes(previous.contacts, state.contacts) > 1:
                repaired.extend(self._bridge(previous, state))
            repaired.append(state)
        return repaired

    def _bridge(self, previous: WholeBodyState, following: WholeBodyState) -> List[WholeBodyState]:
        limbs = range(len(self.model.limbs))
        added = [i for i in limbs if following.contacts[i] and not previous.contacts[i]]
        removed = [i for i in limbs if previous.contacts[i] and not following.contacts[i]]
        for host, other in ((following, previous), (previous, following)):
            chain = self._chain(host, other, previous.contacts, following.contacts, added, removed)
            if chain is not None:
                return chain
        added_names = [self.model.limbs[i].name for i in added]
        removed_names = [self.model.limbs[i].name for i in removed]
        logger.warning("Contact schedule repair failed", added=added_names, removed=removed_names)
        raise ScheduleRepairError(
            f"No stable single-contact sequence adds {added_names} and removes {removed_names}"
        )

    def _chain(
        self,
        host: WholeBodyState,
        other: WholeBodyState,
        initial: Sequence[bool],
        final: Sequence[bool],
        added: List[int],
        removed: List[int],
    ) -> Optional[List[WholeBodyState]]:
        """Add contacts one at a time, then remove them, all at the host's base pose."""
        union = host
        for limb in range(len(self.model.limbs)):
            if other.contacts[limb] and not host.contacts[limb]:
                q_limb = self.anchor(limb, host.base_pose, other.contact_points[limb],
                                     other.q[self.model.slices[limb]])
                if q_limb is None:
                    return None
                union = with_limb(self.model, union, limb, q_limb, True, other.contact_points[limb])

        flags = list(initial)
        sequence = []
        for limb in added:
            flags[limb] = True
            sequence.append(tuple(flags))
        for limb in removed:
            flags[limb] = False
            sequence.append(tuple(flags))
        sequence = [contacts for contacts in sequence if contacts != tuple(final)]

        chain = []
        for contacts in sequence:
            points = tuple(p if flag else None for p, flag in zip(union.contact_points, contacts))
            state = WholeBodyState(union.base_pose, union.q.copy(), contacts, points)
            if not self.checker.is_stable(state):
                return None
            chain.append(state)
        return chain

    def anchor(self, limb: int, base_pose: Pose3, point: np.ndarray, seed: np.ndarray) -> Optional[np.ndarray]:
        """Joints keeping a world contact point while the base sits at ``base_pose``."""
        target = np.asarray(point, dtype=float)
        if self.model.limbs[limb].wheeled:
            target = target + self.model.wheel_radius * GRAVITY_UP
        try:
            return self.model.ik_limb(limb, base_pose.inverse_transform(target), seed)
        except IKConvergenceError:
            return None

    # Arm contacts

    def anchor_arm_contacts(self, states: Sequence[WholeBodyState]) -> List[WholeBodyState]:
        """Give every arm contact phase a single world contact point."""
        states = list(states)
        arm = self.roadmaps[self.arm]
        for run in contact_runs(states):
            if not states[run[0]].contacts[self.arm]:
                continue
            anchor = self._anchor_point(states[run[0]], states[run[-1]])
            for i in run:
                state = states[i]
                seed = state.q[self.model.slices[self.arm]]
                q_arm = self.anchor(self.arm, state.base_pose, anchor, seed)
                point = anchor
                if q_arm is None:
                    target = state.base_pose.inverse_transform(anchor)
                    q_arm = arm.q[arm.nearest_vertex(target)]
                    point = self.model.contact_point(self.arm, q_arm, state.base_pose)
                states[i] = with_limb(self.model, state, self.arm, q_arm, True, point)
        return states

    def _anchor_point(self, first: WholeBodyState, last: WholeBodyState) -> np.ndarray:
        """Midpoint of the closest pair of arm contacts reachable at both ends of a phase."""
        arm = self.roadmaps[self.arm]
        candidates = []
        for state in (first, last):
            ids = grounded_candidates(arm, self.model, state.base_pose, self.grid,
                                      sdf_margin=self.checker.sdf_margin)
            candidates.append(contact_points_world(self.model, arm, state.base_pose)[ids])
        if any(len(points) == 0 for points in candidates):
            return np.asarray(first.contact_points[self.arm], dtype=float)
        distances = cdist(candidates[0], candidates[1])
        i, j = np.unravel_index(int(np.argmin(distances)), distances.shape)
        return 0.5 * (candidates[0][i] + candidates[1][j])

    def smooth_arm_motion(self, states: Sequence[WholeBodyState]) -> List[WholeBodyState]:
        """Route large swing-arm jumps through the arm roadmap."""
        arm = self.roadmaps[self.arm]
        limb = self.model.limbs[self.arm]
        arm_slice = self.model.slices[self.arm]
        smoothed = [states[0]]
        for state in states[1:]:
            previous = smoothed[-1]
            q_a, q_b = previous.q[arm_slice], state.q[arm_slice]
            both_down = previous.contacts[self.arm] and state.contacts[self.arm]
            if np.linalg.norm(q_b - q_a) > self.config.arm_motion_threshold and not both_down:
                start = arm.nearest_vertex(limb.ee_positions(q_a)[0])
                goal = arm.nearest_vertex(limb.ee_positions(q_b)[0])
                smoothed.extend(self._arm_detour(previous, state, start, goal))
            smoothed.append(state)
        return smoothed

    def _arm_detour(
        self, previous: WholeBodyState, following: WholeBodyState, start: int, goal: int
    ) -> List[WholeBodyState]:
        """Arm detour states, preceded by a full-contact state when one was needed.

        Raises:
            ArmDetourError: No stable detour exists from either endpoint or
                from the inserted full-contact state.
        """
        detour = self._search_detour(previous, (previous, following), start, goal)
        if detour is not None:
            return detour
        full = self.full_contact(previous, following)
        if full is not None and full is not previous:
            detour = self._search_detour(full, (full,), start, goal)
            if detour is not None:
                logger.debug("Arm detour after full-contact insertion", start=start, goal=goal,
                             states=len(detour))
                return [full] + detour
        logger.warning("No arm detour", start=start, goal=goal)
        raise ArmDetourError(f"No stable arm detour between roadmap vertices {start} and {goal}")

    def _search_detour(
        self, base: WholeBodyState, hosts: Sequence[WholeBodyState], start: int, goal: int
    ) -> Optional[List[WholeBodyState]]:
        """Stable swing-arm states on ``base`` along the first path any host admits."""
        arm = self.roadmaps[self.arm]
        for host in hosts:
            view = invalidate(arm, self.model, host, self.grid, self.collision)
            try:
                vertices = search_path(view, start, goal)
            except NoPathError:
                continue
            detour = [with_limb(self.model, base, self.arm, arm.q[v], False, None) for v in vertices]
            if all(self.checker.is_stable(state) for state in detour):
                return detour
        return None

    def full_contact(self, previous: WholeBodyState, following: WholeBodyState) -> Optional[WholeBodyState]:
        """``previous`` with every leg on the ground, or ``None`` if that is not stable.

        Legs that touch down in ``following`` keep its contact point; other
        swing legs take the grounded roadmap vertex closest to their default.
        """
        full = previous
        base_pose = previous.base_pose
        for limb in self.model.wheeled:
            if full.contacts[limb]:
                continue
            if following.contacts[limb]:
                point = following.contact_points[limb]
                q_limb = self.anchor(limb, base_pose, point, following.q[self.model.slices[limb]])
                if q_limb is None:
                    return None
            else:
                roadmap = self.roadmaps[limb]
                ids = grounded_candidates(roadmap, self.model, base_pose, self.grid,
                                          sdf_margin=self.checker.sdf_margin)
                if len(ids) == 0:
                    return None
                q_limb = roadmap.q[self.checker.closest_to_default(limb, ids)]
                point = self.model.contact_point(limb, q_limb, base_pose)
            full = with_limb(self.model, full, limb, q_limb, True, point)
        if full is not previous and not self.checker.is_stable(full):
            return None
        return full

    # Timing

    def assign_durations(
        self, states: Sequence[WholeBodyState], start: SE2Pose, goal: SE2Pose
    ) -> WholeBodyPath:
        """Phase durations from base speed with a lower bound per phase."""
        positions = np.array([state.base_pose.position[:2] for state in states])
        steps = np.linalg.norm(np.diff(positions, axis=0), axis=1) if len(states) > 1 else np.zeros(0)
        arc = np.concatenate([[0.0], np.cumsum(steps)])

        runs = contact_runs(states)
        phases = []
        clock = 0.0
        for k, run in enumerate(runs):
            end = runs[k + 1][0] if k + 1 < len(runs) else run[-1]
            length = float(arc[end] - arc[run[0]])
            duration = max(length / self.config.base_speed, self.config.min_phase_duration)
            slots = len(run) if k + 1 < len(runs) else max(len(run) - 1, 1)
            times = []
            for n, i in enumerate(run):
                fraction = (arc[i] - arc[run[0]]) / length if length > 0 else n / slots
                times.append(clock + duration * float(fraction))
            phases.append(PlanPhase(duration, states[run[0]].contacts, [states[i] for i in run], times))
            clock += duration
        return WholeBodyPath(start=start, goal=goal, phases=phases)


def finalize(
    states: Sequence[WholeBodyState],
    start: SE2Pose,
    goal: SE2Pose,
    checker: FeasibilityChecker,
    config: Optional[FinalizeConfig] = None,
) -> WholeBodyPath:
    """Finalize a raw state sequence with a fresh ``PathFinalizer``."""
    finalizer = PathFinalizer(checker.grid, checker.model, checker.roadmaps, checker, config)
    return finalizer.finalize(states, start, goal)
