"""Online use of limb roadmaps: grounding, invalidation and limb-path search."""

from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
import structlog

from ...errors import NoPathError
from ...models.enums import InterpolationMethod
from ..gridmap import ELEVATION, SDF, GridMap
from ..robot import GRAVITY_UP, CollisionModel, Pose3, RobotModel, WholeBodyState, segment_distance
from .limb_roadmap import LimbRoadmap, edge_configurations

logger = structlog.get_logger(__name__)


def contact_points_world(model: RobotModel, roadmap: LimbRoadmap, base_pose: Pose3) -> np.ndarray:
    """World contact point of every vertex ``(V, 3)``."""
    points = base_pose.transform(roadmap.p_ee)
    if model.limbs[roadmap.limb_index].wheeled:
        points = points - model.wheel_radius * GRAVITY_UP
    return points


def grounded_candidates(
    roadmap: LimbRoadmap,
    model: RobotModel,
    base_pose: Pose3,
    grid: GridMap,
    eps: Optional[float] = None,
    sdf_margin: float = 0.3,
) -> np.ndarray:
    """Vertex ids whose contact point touches traversable terrain.

    A vertex qualifies when its contact point lies within ``eps`` of the
    bicubic elevation and the signed distance there exceeds ``sdf_margin``.
    Points over missing terrain or outside the map never qualify.
    """
    eps = model.contact_eps if eps is None else eps
    points = contact_points_world(model, roadmap, base_pose)
    heights = grid.values_at(ELEVATION, points[:, :2], InterpolationMethod.BICUBIC)
    clearance = grid.values_at(SDF, points[:, :2], InterpolationMethod.LINEAR)
    with np.errstate(invalid="ignore"):
        ok = (np.abs(points[:, 2] - heights) <= eps) & (clearance > sdf_margin)
    return np.flatnonzero(ok)


class RoadmapView:
    """Subset of a roadmap that is free of other limbs and of the terrain.

    Vertex validity is evaluated up front; edge validity is evaluated the
    first time a search touches the edge and memoised.
    """

    def __init__(
        self,
        roadmap: LimbRoadmap,
        model: RobotModel,
        collision: CollisionModel,
        state: WholeBodyState,
        grid: Optional[GridMap] = None,
        clearance: float = 0.0,
    ):
        self.roadmap = roadmap
        self.model = model
        self.collision = collision
        self.base_pose = state.base_pose
        self.grid = grid
        self.clearance = clearance

        starts, ends = collision.world_segments(state.base_pose, state.q)
        others = np.flatnonzero(
            (collision.owners != roadmap.limb_index) & (collision.owners >= 0)
        )
        self._other_a = starts[others]
        self._other_b = ends[others]
        self._other_r = collision.radii[others]

        own = collision.indices_of(roadmap.limb_index)
        self._own = own
        self._own_r = collision.radii[own]
        self._own_terrain = np.array([collision.entries[i].terrain_contact for i in own], dtype=bool)

        self.valid = self._clear(roadmap.q) if len(own) else np.ones(roadmap.vertex_count, dtype=bool)
        self._edge_memo: Dict[Tuple[int, int], bool] = {}
        self.graph = nx.subgraph_view(
            roadmap.graph, filter_node=self._node_ok, filter_edge=self._edge_ok
        )
        logger.debug(
            "Roadmap view created",
            limb=roadmap.limb_name,
            valid=int(self.valid.sum()),
            vertices=roadmap.vertex_count,
        )

    def _node_ok(self, node: int) -> bool:
        return bool(self.valid[node])

    def _edge_ok(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        if key not in self._edge_memo:
            samples = edge_configurations(self.roadmap.q[key[0]], self.roadmap.q[key[1]],
                                          self.roadmap.edge_step)
            self._edge_memo[key] = bool(
                self.valid[u] and self.valid[v]
                and (len(samples) <= 2 or self._clear(samples[1:-1]).all())
            )
        return self._edge_memo[key]

    def _clear(self, q_batch: np.ndarray) -> np.ndarray:
        """Per-configuration freedom from other limbs and terrain."""
        starts, ends = self.collision.limb_segments(self.roadmap.limb_index, q_batch)
        starts = self.base_pose.transform(starts)
        ends = self.base_pose.transform(ends)
        ok = np.ones(len(q_batch), dtype=bool)

        if len(self._other_r):
            axis = segment_distance(
                starts[:, :, None, :], ends[:, :, None, :],
                self._other_a[None, None], self._other_b[None, None],
            )
            gaps = axis - self._own_r[None, :, None] - self._other_r[None, None, :]
            ok &= np.all(gaps > self.clearance, axis=(1, 2))

        if self.grid is not None and not self._own_terrain.all():
            body = ~self._own_terrain
            probes = np.stack([starts, ends, 0.5 * (starts + ends)], axis=2)[:, body]
            heights = self.grid.values_at(ELEVATION, probes[..., :2].reshape(-1, 2),
                                          InterpolationMethod.BICUBIC).reshape(probes.shape[:-1])
            lowest = probes[..., 2] - self._own_r[body][None, :, None]
            with np.errstate(invalid="ignore"):
                below = lowest < heights
            ok &= ~np.any(below, axis=(1, 2))
        return ok

    def vertex_ids(self) -> np.ndarray:
        return np.flatnonzero(self.valid)

    def edge_count(self) -> int:
        return self.graph.number_of_edges()


def invalidate(
    roadmap: LimbRoadmap,
    model: RobotModel,
    state: WholeBodyState,
    grid: Optional[GridMap] = None,
    collision: Optional[CollisionModel] = None,
) -> RoadmapView:
    """View of ``roadmap`` without vertices and edges blocked in ``state``."""
    return RoadmapView(roadmap, model, collision or model.collision, state, grid)


def search_path(view: RoadmapView, start: int, goal: int) -> List[int]:
    """Shortest vertex sequence by end-effector edge length (A*).

    Raises:
        NoPathError: An endpoint is invalid or the endpoints are disconnected.
    """
    if not (view.valid[start] and view.valid[goal]):
        raise NoPathError(f"Endpoint invalid in view of {view.roadmap.limb_name}: {start} -> {goal}")
    if start == goal:
        return [start]
    p_ee = view.roadmap.p_ee

    def heuristic(a: int, b: int) -> float:
        return float(np.linalg.norm(p_ee[a] - p_ee[b]))

    try:
        return [int(v) for v in nx.astar_path(view.graph, start, goal, heuristic=heuristic, weight="length")]
    except (nx.NetworkXNoPath, nx.NodeNotFound) as e:
        raise NoPathError(f"No path in {view.roadmap.limb_name} roadmap: {start} -> {goal}") from e


def path_length(roadmap: LimbRoadmap, path: List[int]) -> float:
    return float(sum(np.linalg.norm(roadmap.p_ee[a] - roadmap.p_ee[b]) for a, b in zip(path, path[1:])))
