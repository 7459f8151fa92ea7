"""Whole-body feasibility of a base pose.

Legs are grounded from their roadmaps first. With every leg down the pose is
accepted as is; with one leg short the arm acts as counterweight; with two
legs short the arm has to take over as third support.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from ...models.enums import InterpolationMethod
from ..gridmap import ELEVATION, GridMap
from ..roadmap import RoadmapSet, contact_points_world, grounded_candidates, invalidate
from ..robot import CollisionModel, Pose3, RobotModel, WholeBodyState, support_margin

logger = structlog.get_logger(__name__)

# Swing limbs higher than this above the terrain count as equally clear
SWING_CLEARANCE = 0.3


@dataclass
class _Assignment:
    """Vertex chosen per limb while a state is being assembled."""

    vertex: Dict[int, int]
    contacts: Dict[int, bool]


class FeasibilityChecker:
    """Decides whether a base pose admits a statically stable whole-body state."""

    def __init__(
        self,
        grid: GridMap,
        model: RobotModel,
        roadmaps: RoadmapSet,
        sdf_margin: float = 0.3,
        collision: Optional[CollisionModel] = None,
    ):
        self.grid = grid
        self.model = model
        self.roadmaps = roadmaps
        self.sdf_margin = sdf_margin
        self.collision = collision or model.collision
        self.arm = model.arms[0] if model.arms else None
        self._default_distance = {
            roadmap.limb_index: np.linalg.norm(
                roadmap.q - model.limbs[roadmap.limb_index].default_config, axis=1)
            for roadmap in roadmaps
        }

    # Selection helpers

    def closest_to_default(self, limb_index: int, ids: np.ndarray) -> int:
        distances = self._default_distance[limb_index][ids]
        return int(ids[int(np.argmin(distances))])

    def _state(self, base_pose: Pose3, chosen: _Assignment) -> WholeBodyState:
        q = np.concatenate([
            self.roadmaps[i].q[chosen.vertex[i]] for i in range(len(self.model.limbs))
        ])
        contacts = [chosen.contacts.get(i, False) for i in range(len(self.model.limbs))]
        points: List[Optional[np.ndarray]] = []
        for i, flag in enumerate(contacts):
            if flag:
                roadmap = self.roadmaps[i]
                world = contact_points_world(self.model, roadmap, base_pose)
                points.append(world[chosen.vertex[i]])
            else:
                points.append(None)
        return WholeBodyState(base_pose, q, tuple(contacts), tuple(points))

    def _com(self, base_pose: Pose3, chosen: _Assignment) -> np.ndarray:
        coms = [self.roadmaps[i].p_com[chosen.vertex[i]] for i in range(len(self.model.limbs))]
        return self.model.com_from_limb_coms(base_pose, coms)

    def _swing_vertex(self, limb_index: int, state: WholeBodyState) -> Optional[int]:
        """Free configuration with the most terrain clearance, then closest to default."""
        roadmap = self.roadmaps[limb_index]
        view = invalidate(roadmap, self.model, state, self.grid, self.collision)
        ids = view.vertex_ids()
        if len(ids) == 0:
            return None
        points = contact_points_world(self.model, roadmap, state.base_pose)[ids]
        heights = self.grid.values_at(ELEVATION, points[:, :2], InterpolationMethod.BICUBIC)
        clearance = np.where(np.isnan(heights), SWING_CLEARANCE, points[:, 2] - heights)
        score = np.minimum(clearance, SWING_CLEARANCE)
        order = np.lexsort((self._default_distance[limb_index][ids], -score))
        return int(ids[order[0]])

    def _support(self, state: WholeBodyState) -> List[np.ndarray]:
        return [p for p in state.contact_points if p is not None]

    def is_stable(self, state: WholeBodyState) -> bool:
        """CoM projection inside the contact polygon shrunk by the stability margin."""
        support = self._support(state)
        if len(support) < 3:
            return False
        com = self.model.whole_body_com(state)
        return support_margin(support, com) >= self.model.stability_margin

    # Main check

    def check(self, base_pose: Pose3) -> Optional[WholeBodyState]:
        """Whole-body state for ``base_pose`` or ``None`` when infeasible."""
        roll, pitch, _ = base_pose.euler()
        if abs(roll) > self.model.max_roll or abs(pitch) > self.model.max_pitch:
            return None

        chosen = _Assignment(vertex={}, contacts={})
        swing: List[int] = []
        for index in self.model.wheeled:
            ids = grounded_candidates(self.roadmaps[index], self.model, base_pose, self.grid,
                                      sdf_margin=self.sdf_margin)
            if len(ids):
                chosen.vertex[index] = self.closest_to_default(index, ids)
                chosen.contacts[index] = True
            else:
                chosen.vertex[index] = 0
                swing.append(index)
        for index in self.model.arms:
            chosen.vertex[index] = 0

        if not swing:
            return self._state(base_pose, chosen)
        if len(swing) == 1:
            return self._three_contacts(base_pose, chosen, swing)
        if len(swing) == 2 and self.arm is not None:
            return self._arm_support(base_pose, chosen, swing)
        return None

    def _place_swing_legs(self, base_pose: Pose3, chosen: _Assignment, swing: List[int]) -> bool:
        for index in swing:
            vertex = self._swing_vertex(index, self._state(base_pose, chosen))
            if vertex is None:
                return False
            chosen.vertex[index] = vertex
        return True

    def _three_contacts(self, base_pose: Pose3, chosen: _Assignment, swing: List[int]) -> Optional[WholeBodyState]:
        if not self._place_swing_legs(base_pose, chosen, swing):
            return None
        if self.arm is not None:
            self._counterweight(base_pose, chosen)
        state = self._state(base_pose, chosen)
        return state if self.is_stable(state) else None

    def _counterweight(self, base_pose: Pose3, chosen: _Assignment) -> None:
        """Arm configuration centring the CoM over the contact polygon."""
        arm = self.roadmaps[self.arm]
        state = self._state(base_pose, chosen)
        support = np.array(self._support(state))
        centroid = support[:, :2].mean(axis=0)
        ids = invalidate(arm, self.model, state, self.grid, self.collision).vertex_ids()
        if len(ids) == 0:
            return
        others = self._com(base_pose, chosen) * self.model.total_mass
        limb = self.model.limbs[self.arm]
        current = base_pose.transform(arm.p_com[chosen.vertex[self.arm]])
        base_part = others - limb.mass * current
        coms = (base_part + limb.mass * base_pose.transform(arm.p_com[ids])) / self.model.total_mass
        offsets = np.linalg.norm(coms[:, :2] - centroid, axis=1)
        chosen.vertex[self.arm] = int(ids[int(np.argmin(offsets))])

    def _arm_support(self, base_pose: Pose3, chosen: _Assignment, swing: List[int]) -> Optional[WholeBodyState]:
        arm = self.roadmaps[self.arm]
        grounded = grounded_candidates(arm, self.model, base_pose, self.grid, sdf_margin=self.sdf_margin)
        if len(grounded) == 0:
            return None
        state = self._state(base_pose, chosen)
        view = invalidate(arm, self.model, state, self.grid, self.collision)
        grounded = grounded[view.valid[grounded]]
        if len(grounded) == 0:
            return None

        legs = np.array(self._support(state))
        points = contact_points_world(self.model, arm, base_pose)[grounded]
        com = self._com(base_pose, chosen)
        margins = np.array([support_margin(np.vstack([legs, point]), com) for point in points])
        chosen.vertex[self.arm] = int(grounded[int(np.argmax(margins))])
        chosen.contacts[self.arm] = True

        if not self._place_swing_legs(base_pose, chosen, swing):
            return None
        state = self._state(base_pose, chosen)
        return state if self.is_stable(state) else None


def check_feasibility(
    model: RobotModel,
    grid: GridMap,
    roadmaps: RoadmapSet,
    base_pose: Pose3,
    sdf_margin: float = 0.3,
) -> Optional[WholeBodyState]:
    """One-shot feasibility check; build a ``FeasibilityChecker`` for repeated use."""
    return FeasibilityChecker(grid, model, roadmaps, sdf_margin).check(base_pose)


def contact_changes(first: Tuple[bool, ...], second: Tuple[bool, ...]) -> int:
    """Number of limbs whose contact flag differs."""
    return sum(1 for a, b in zip(first, second) if a != b)
