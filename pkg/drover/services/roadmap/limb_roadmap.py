"""Per-limb roadmaps of joint configurations.

Each vertex caches the base-frame end-effector (wheel center for legs) and
the limb CoM of its configuration. Vertices are joined to their nearest
neighbours in end-effector space when the straight joint-space motion
between them stays clear of the base.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import networkx as nx
import numpy as np
import structlog
from scipy.spatial import KDTree

from ...errors import RoadmapBuildError
from ..robot import CollisionModel, RobotModel

logger = structlog.get_logger(__name__)

# Batch size for sampling and for edge collision checks
_SAMPLE_BATCH = 512
_EDGE_BATCH = 256
_MAX_SAMPLE_ROUNDS = 200


@dataclass
class LimbRoadmap:
    """Graph of limb configurations with cached workspace positions."""

    limb_name: str
    limb_index: int
    q: np.ndarray
    p_ee: np.ndarray
    p_com: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    d_max: float
    k_neighbors: int
    edge_step: float
    seed: int
    config_hash: str
    graph: nx.Graph = field(init=False, repr=False, compare=False)
    tree: KDTree = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(len(self.q)))
        self.graph.add_weighted_edges_from(
            ((int(i), int(j), float(w)) for (i, j), w in zip(self.edges, self.lengths)),
            weight="length",
        )
        self.tree = KDTree(self.p_ee)

    @property
    def vertex_count(self) -> int:
        return len(self.q)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def nearest_vertex(self, p_ee: np.ndarray) -> int:
        """Vertex whose end effector is closest to a base-frame point."""
        _, index = self.tree.query(np.asarray(p_ee, dtype=float))
        return int(index)

    def equals(self, other: "LimbRoadmap") -> bool:
        """Bit-exact comparison of every stored array and parameter."""
        arrays = ("q", "p_ee", "p_com", "edges", "lengths")
        scalars = ("limb_name", "limb_index", "d_max", "k_neighbors", "edge_step", "seed", "config_hash")
        return all(getattr(self, name) == getattr(other, name) for name in scalars) and all(
            getattr(self, name).dtype == getattr(other, name).dtype
            and getattr(self, name).tobytes() == getattr(other, name).tobytes()
            for name in arrays
        )


def interpolation_steps(q_a: np.ndarray, q_b: np.ndarray, edge_step: float) -> int:
    """Number of segments so that no joint moves more than ``edge_step`` per step."""
    return max(int(np.ceil(np.max(np.abs(q_b - q_a)) / edge_step - 1e-9)), 1)


def edge_configurations(q_a: np.ndarray, q_b: np.ndarray, edge_step: float) -> np.ndarray:
    """Joint-space samples from ``q_a`` to ``q_b`` inclusive."""
    steps = interpolation_steps(q_a, q_b, edge_step)
    t = np.linspace(0.0, 1.0, steps + 1)[:, None]
    return q_a + t * (q_b - q_a)


def _sample_vertices(
    model: RobotModel, collision: CollisionModel, limb_index: int, n_vertices: int,
    rng: np.random.Generator,
) -> np.ndarray:
    limb = model.limbs[limb_index]
    accepted = []
    count = 0
    if collision.limb_vs_base(limb_index, limb.default_config[None, :])[0] > 0:
        accepted.append(limb.default_config[None, :])
        count = 1
    for _ in range(_MAX_SAMPLE_ROUNDS):
        if count >= n_vertices:
            break
        batch = limb.sample(rng, _SAMPLE_BATCH)
        keep = batch[collision.limb_vs_base(limb_index, batch) > 0]
        keep = keep[: n_vertices - count]
        accepted.append(keep)
        count += len(keep)
    if count == 0:
        raise RoadmapBuildError(f"Could not sample any collision-free configuration for {limb.name}")
    if count < n_vertices:
        logger.warning("Roadmap has fewer vertices than requested", limb=limb.name,
                       requested=n_vertices, sampled=count)
    return np.vstack(accepted)


def _candidate_edges(p_ee: np.ndarray, k_neighbors: int, d_max: float) -> np.ndarray:
    """Unique (i, j) pairs, i < j, among each vertex's k nearest within d_max.

    Ties in distance are broken by vertex id.
    """
    tree = KDTree(p_ee)
    query_k = min(k_neighbors + 5, len(p_ee))
    distances, indices = tree.query(p_ee, k=query_k, distance_upper_bound=d_max)
    distances = np.atleast_2d(distances)
    indices = np.atleast_2d(indices)
    pairs = set()
    for vertex in range(len(p_ee)):
        found = np.isfinite(distances[vertex]) & (indices[vertex] != vertex)
        ids = indices[vertex][found]
        dist = distances[vertex][found]
        order = np.lexsort((ids, dist))[:k_neighbors]
        for neighbour in ids[order]:
            a, b = sorted((vertex, int(neighbour)))
            pairs.add((a, b))
    return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)


def _edges_clear(
    collision: CollisionModel, limb_index: int, q: np.ndarray, candidates: np.ndarray, edge_step: float
) -> np.ndarray:
    keep = np.ones(len(candidates), dtype=bool)
    for start in range(0, len(candidates), _EDGE_BATCH):
        chunk = candidates[start:start + _EDGE_BATCH]
        samples = [edge_configurations(q[i], q[j], edge_step)[1:-1] for i, j in chunk]
        sizes = [len(s) for s in samples]
        if sum(sizes) == 0:
            continue
        clearance = collision.limb_vs_base(limb_index, np.vstack([s for s in samples if len(s)]))
        offset = 0
        for row, size in enumerate(sizes):
            if size:
                keep[start + row] = bool(np.all(clearance[offset:offset + size] > 0))
                offset += size
    return keep


def build_roadmap(
    model: RobotModel,
    limb_id,
    n_vertices: int,
    k_neighbors: int = 10,
    d_max: float = 0.3,
    seed: int = 0,
    edge_step: float = 0.05,
    collision: Optional[CollisionModel] = None,
    on_progress: Optional[Callable[[int], None]] = None,
) -> LimbRoadmap:
    """Sample and connect a roadmap for one limb.

    Vertex 0 is the limb's default configuration. Results are identical for
    identical (model, seed, parameters).

    Raises:
        RoadmapBuildError: No collision-free configuration could be sampled.
    """
    if n_vertices < 10:
        raise ValueError("A roadmap needs at least 10 vertices")
    limb_index = model.limb_index[limb_id] if isinstance(limb_id, str) else int(limb_id)
    limb = model.limbs[limb_index]
    collision = collision or model.collision
    rng = np.random.default_rng(seed)

    q = _sample_vertices(model, collision, limb_index, n_vertices, rng)
    if on_progress:
        on_progress(1)
    p_ee = limb.ee_positions(q)
    p_com = limb.com_positions(q)

    candidates = _candidate_edges(p_ee, k_neighbors, d_max)
    edges = candidates[_edges_clear(collision, limb_index, q, candidates, edge_step)] if len(candidates) else candidates
    lengths = np.linalg.norm(p_ee[edges[:, 0]] - p_ee[edges[:, 1]], axis=1) if len(edges) else np.zeros(0)
    if on_progress:
        on_progress(1)

    roadmap = LimbRoadmap(
        limb_name=limb.name,
        limb_index=limb_index,
        q=q,
        p_ee=p_ee,
        p_com=p_com,
        edges=edges,
        lengths=lengths,
        d_max=float(d_max),
        k_neighbors=int(k_neighbors),
        edge_step=float(edge_step),
        seed=int(seed),
        config_hash=model.config_hash,
    )
    logger.info(
        "Roadmap built",
        limb=limb.name,
        vertices=roadmap.vertex_count,
        edges=roadmap.edge_count,
        rejected_edges=int(len(candidates) - len(edges)),
    )
    return roadmap
