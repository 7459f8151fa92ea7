"""Lifting planar samples to full base poses on the terrain."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ...errors import MissingValueError, NoTraversableCellError, OutOfBoundsError
from ...models.config import SamplerConfig
from ..gridmap import (
    ELEVATION,
    ELEVATION_SMOOTH_L,
    NORMAL_X_L,
    NORMAL_X_S,
    NORMAL_Y_L,
    NORMAL_Y_S,
    TRAVERSABILITY,
    GridMap,
)
from ..roadmap import RoadmapSet, grounded_candidates
from ..robot import Pose3, RobotModel
from ..terrain import slope_to_normal

logger = structlog.get_logger(__name__)


class CandidateSource(str, Enum):
    RAW = "raw"
    FILTERED = "filtered"
    NEAREST_RAW = "nearest_raw"
    NEAREST_FILTERED = "nearest_filtered"


SOURCE_ORDER = (
    CandidateSource.RAW,
    CandidateSource.FILTERED,
    CandidateSource.NEAREST_RAW,
    CandidateSource.NEAREST_FILTERED,
)


@dataclass(frozen=True)
class PoseCandidate:
    height: float
    normal_xy: Tuple[float, float]
    height_source: CandidateSource
    normal_source: CandidateSource
    cost: float


@dataclass(frozen=True)
class LiftedPose:
    base_pose: Pose3
    chosen: PoseCandidate


def nearest_traversable(grid: GridMap, xy: Sequence[float]) -> np.ndarray:
    """Center of the traversable cell closest to ``xy``.

    The query's own cell wins when traversable; otherwise ties resolve to
    the first cell in (row, col) order.

    Raises:
        NoTraversableCellError: No cell is traversable.
    """
    traversable = grid.layer(TRAVERSABILITY) > 0.5
    fr, fc = grid.continuous_index(np.asarray(xy, dtype=float))
    row, col = int(np.floor(fr + 0.5)), int(np.floor(fc + 0.5))
    if 0 <= row < grid.rows and 0 <= col < grid.cols and traversable[row, col]:
        return grid.origin + grid.resolution * np.array([col, row], dtype=float)

    cells = np.flatnonzero(traversable.ravel())
    if len(cells) == 0:
        raise NoTraversableCellError("Map has no traversable cell")
    rows, cols = np.divmod(cells, grid.cols)
    centers = grid.origin + grid.resolution * np.column_stack([cols, rows]).astype(float)
    best = int(np.argmin(np.sum((centers - np.asarray(xy, dtype=float)) ** 2, axis=1)))
    return centers[best]


def level_pose(position: Sequence[float], normal_xy: Sequence[float], yaw: float) -> Pose3:
    """Pose at ``position`` with heading ``yaw`` and body z-axis on the terrain normal.

    Uses ``R = Rz(yaw) Ry(pitch) Rx(roll)`` so the heading is kept exactly.
    """
    n = slope_to_normal(np.asarray(normal_xy, dtype=float))
    c, s = np.cos(yaw), np.sin(yaw)
    n_local = np.array([c * n[0] + s * n[1], -s * n[0] + c * n[1], n[2]])
    roll = float(-np.arcsin(np.clip(n_local[1], -1.0, 1.0)))
    pitch = float(np.arctan2(n_local[0], n_local[2]))
    return Pose3.from_euler(position, roll, pitch, yaw)


class PoseLifter:
    """Chooses terrain height and normal for sampled base positions."""

    def __init__(
        self,
        grid: GridMap,
        model: RobotModel,
        roadmaps: RoadmapSet,
        config: Optional[SamplerConfig] = None,
        sdf_margin: float = 0.3,
        grounded_threshold: int = 1,
    ):
        self.grid = grid
        self.model = model
        self.roadmaps = roadmaps
        self.config = config or SamplerConfig()
        self.sdf_margin = sdf_margin
        self.grounded_threshold = grounded_threshold

    def grounded_legs(self, base_pose: Pose3) -> List[bool]:
        """Per wheeled limb: enough roadmap vertices touch traversable terrain."""
        flags = []
        for index in self.model.wheeled:
            ids = grounded_candidates(
                self.roadmaps[index], self.model, base_pose, self.grid, sdf_margin=self.sdf_margin
            )
            flags.append(len(ids) >= self.grounded_threshold)
        return flags

    def pose_cost(self, base_pose: Pose3) -> float:
        """Weighted ungrounded-leg count plus squared roll and pitch."""
        ungrounded = sum(1 for grounded in self.grounded_legs(base_pose) if not grounded)
        roll, pitch, _ = base_pose.euler()
        return self.config.w_grounded * ungrounded + self.config.w_tilt * (roll * roll + pitch * pitch)

    def _sample(self, xy: np.ndarray) -> Tuple[Dict[CandidateSource, float], Dict[CandidateSource, Tuple[float, float]]]:
        method = self.config.interpolation
        nearest = nearest_traversable(self.grid, xy)
        points = np.vstack([xy, nearest])

        def read(layer: str) -> np.ndarray:
            return self.grid.values_at(layer, points, method)

        raw_h, filt_h = read(ELEVATION), read(ELEVATION_SMOOTH_L)
        raw_nx, raw_ny = read(NORMAL_X_S), read(NORMAL_Y_S)
        filt_nx, filt_ny = read(NORMAL_X_L), read(NORMAL_Y_L)
        heights = {
            CandidateSource.RAW: raw_h[0],
            CandidateSource.FILTERED: filt_h[0],
            CandidateSource.NEAREST_RAW: raw_h[1],
            CandidateSource.NEAREST_FILTERED: filt_h[1],
        }
        normals = {
            CandidateSource.RAW: (raw_nx[0], raw_ny[0]),
            CandidateSource.FILTERED: (filt_nx[0], filt_ny[0]),
            CandidateSource.NEAREST_RAW: (raw_nx[1], raw_ny[1]),
            CandidateSource.NEAREST_FILTERED: (filt_nx[1], filt_ny[1]),
        }
        return heights, normals

    def candidates(self, xy: Sequence[float], yaw: float) -> List[Tuple[PoseCandidate, Pose3]]:
        """All finite (normal, height) pairs, normals outer and heights inner."""
        xy = np.asarray(xy, dtype=float)
        if not self.grid.contains(xy, self.config.interpolation):
            raise OutOfBoundsError(f"Position {tuple(xy.tolist())} is outside the map")
        heights, normals = self._sample(xy)

        scored: Dict[Tuple[float, float, float], float] = {}
        result = []
        for normal_source in SOURCE_ORDER:
            normal = normals[normal_source]
            if not np.all(np.isfinite(normal)):
                continue
            for height_source in SOURCE_ORDER:
                height = heights[height_source]
                if not np.isfinite(height):
                    continue
                key = (float(height), float(normal[0]), float(normal[1]))
                pose = level_pose((xy[0], xy[1], height + self.model.h_desired), normal, yaw)
                if key not in scored:
                    scored[key] = self.pose_cost(pose)
                candidate = PoseCandidate(
                    height=float(height),
                    normal_xy=(float(normal[0]), float(normal[1])),
                    height_source=height_source,
                    normal_source=normal_source,
                    cost=scored[key],
                )
                result.append((candidate, pose))
        return result

    def lift_pose(self, xy: Sequence[float], yaw: float) -> LiftedPose:
        """Minimum-cost candidate pose; the first enumerated minimum wins ties.

        Raises:
            OutOfBoundsError: ``xy`` outside the map.
            MissingValueError: No finite height/normal candidate.
            NoTraversableCellError: Map without traversable cells.
        """
        best: Optional[Tuple[PoseCandidate, Pose3]] = None
        for candidate, pose in self.candidates(xy, yaw):
            if best is None or candidate.cost < best[0].cost:
                best = (candidate, pose)
        if best is None:
            raise MissingValueError(f"No terrain candidate at {tuple(np.asarray(xy).tolist())}")
        return LiftedPose(base_pose=best[1], chosen=best[0])
