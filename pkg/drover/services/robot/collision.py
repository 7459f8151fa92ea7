"""Analytic distances between collision primitives.

Every primitive is a swept sphere: spheres are zero-length segments and
cylinders use their axis segment with the cylinder radius.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...models.robot import PrimitiveSpec
from .model import Pose3, RobotModel, WholeBodyState

BASE_OWNER = -1

_EPS = 1e-12


def segment_closest_points(
    p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Segment parameters ``(s, t)`` and witness points of the closest approach.

    Batched over leading axes (Ericson, Real-Time Collision Detection 5.1.9).
    """
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    f = np.einsum("...i,...i->...", d2, r)
    c = np.einsum("...i,...i->...", d1, r)
    b = np.einsum("...i,...i->...", d1, d2)
    denom = a * e - b * b

    safe_a = np.where(a > _EPS, a, 1.0)
    safe_e = np.where(e > _EPS, e, 1.0)
    s = np.where(denom > _EPS, np.clip((b * f - c * e) / np.where(denom > _EPS, denom, 1.0), 0.0, 1.0), 0.0)
    t = np.where(e > _EPS, (b * s + f) / safe_e, 0.0)

    # Re-clamp t and recompute s where t left [0, 1]
    t_clamped = np.clip(t, 0.0, 1.0)
    s = np.where(t != t_clamped, np.clip((b * t_clamped - c) / safe_a, 0.0, 1.0), s)
    t = t_clamped

    # Degenerate segments
    s = np.where(a <= _EPS, 0.0, s)
    t = np.where((a <= _EPS) & (e > _EPS), np.clip(f / safe_e, 0.0, 1.0), t)
    s = np.where((e <= _EPS) & (a > _EPS), np.clip(-c / safe_a, 0.0, 1.0), s)
    t = np.where(e <= _EPS, 0.0, t)

    closest1 = p1 + s[..., None] * d1
    closest2 = p2 + t[..., None] * d2
    return s, t, closest1, closest2


def segment_distance(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Closest distance between segments ``p1q1`` and ``p2q2`` (batched over leading axes)."""
    _, _, closest1, closest2 = segment_closest_points(p1, q1, p2, q2)
    return np.linalg.norm(closest1 - closest2, axis=-1)


def primitive_distance(
    seg_a: Tuple[np.ndarray, np.ndarray], radius_a: float,
    seg_b: Tuple[np.ndarray, np.ndarray], radius_b: float,
) -> float:
    """Signed surface distance of two swept spheres; negative when penetrating."""
    axis = segment_distance(np.asarray(seg_a[0], float), np.asarray(seg_a[1], float),
                            np.asarray(seg_b[0], float), np.asarray(seg_b[1], float))
    return float(axis) - radius_a - radius_b


@dataclass(frozen=True)
class PrimitiveEntry:
    """A primitive placed on the base (owner -1) or on a limb link."""

    name: str
    owner: int
    link: int
    radius: float
    a: np.ndarray
    b: np.ndarray
    terrain_contact: bool


class CollisionModel:
    """Primitive list and the non-adjacent pairs checked for self-collision.

    Primitives on the same limb are adjacent, and so are the base and the
    first link of each limb.
    """

    def __init__(self, model: RobotModel):
        self.model = model
        entries: List[PrimitiveEntry] = []
        entries.extend(_entries(model.spec.base.primitives, BASE_OWNER))
        for index, limb in enumerate(model.spec.limbs):
            entries.extend(_entries(limb.primitives, index))
        self.entries = entries
        self.radii = np.array([entry.radius for entry in entries])
        self.owners = np.array([entry.owner for entry in entries])
        pairs = [
            (i, j)
            for i in range(len(entries))
            for j in range(i + 1, len(entries))
            if not self.adjacent(entries[i], entries[j])
        ]
        self.pairs = np.array(pairs, dtype=np.intp).reshape(-1, 2)

    @staticmethod
    def adjacent(first: PrimitiveEntry, second: PrimitiveEntry) -> bool:
        if first.owner == second.owner:
            return True
        if first.owner == BASE_OWNER:
            return second.link == 0
        if second.owner == BASE_OWNER:
            return first.link == 0
        return False

    def indices_of(self, owner: int) -> np.ndarray:
        return np.flatnonzero(self.owners == owner)

    def limb_segments(self, limb_index: int, q_batch: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Base-frame endpoints ``(N, P, 3)`` of one limb's primitives."""
        limb = self.model.limbs[limb_index]
        frames = limb.frames(q_batch)
        ids = self.indices_of(limb_index)
        starts = np.stack([limb.attached_points(frames, self.entries[i].link, self.entries[i].a) for i in ids], axis=1)
        ends = np.stack([limb.attached_points(frames, self.entries[i].link, self.entries[i].b) for i in ids], axis=1)
        return starts, ends

    def base_segments(self) -> Tuple[np.ndarray, np.ndarray]:
        ids = self.indices_of(BASE_OWNER)
        return (np.array([self.entries[i].a for i in ids]).reshape(-1, 3),
                np.array([self.entries[i].b for i in ids]).reshape(-1, 3))

    def world_segments(self, base_pose: Pose3, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """World endpoints of every primitive in entry order."""
        starts = np.zeros((len(self.entries), 3))
        ends = np.zeros((len(self.entries), 3))
        base_ids = self.indices_of(BASE_OWNER)
        if len(base_ids):
            a, b = self.base_segments()
            starts[base_ids], ends[base_ids] = a, b
        for index, q_i in enumerate(self.model.split(np.asarray(q, dtype=float))):
            ids = self.indices_of(index)
            if len(ids):
                a, b = self.limb_segments(index, q_i)
                starts[ids], ends[ids] = a[0], b[0]
        return base_pose.transform(starts), base_pose.transform(ends)

    def pair_distances(self, base_pose: Pose3, q: np.ndarray) -> np.ndarray:
        starts, ends = self.world_segments(base_pose, q)
        i, j = self.pairs[:, 0], self.pairs[:, 1]
        axis = segment_distance(starts[i], ends[i], starts[j], ends[j])
        return axis - self.radii[i] - self.radii[j]

    def min_pair_distance(self, state: WholeBodyState) -> Tuple[float, Optional[Tuple[str, str]]]:
        """Smallest signed distance over non-adjacent pairs and the pair's names."""
        if len(self.pairs) == 0:
            return np.inf, None
        distances = self.pair_distances(state.base_pose, state.q)
        k = int(np.argmin(distances))
        i, j = self.pairs[k]
        return float(distances[k]), (self.entries[i].name, self.entries[j].name)

    def limb_vs_base(self, limb_index: int, q_batch: np.ndarray) -> np.ndarray:
        """Per-configuration minimum distance of a limb's primitives to the base ``(N,)``."""
        limb_ids = self.indices_of(limb_index)
        base_ids = self.indices_of(BASE_OWNER)
        count = np.atleast_2d(q_batch).shape[0]
        pairs = [(p, b) for p in range(len(limb_ids)) for b in range(len(base_ids))
                 if not self.adjacent(self.entries[limb_ids[p]], self.entries[base_ids[b]])]
        if not pairs:
            return np.full(count, np.inf)
        starts, ends = self.limb_segments(limb_index, q_batch)
        base_a, base_b = self.base_segments()
        p_idx = np.array([p for p, _ in pairs])
        b_idx = np.array([b for _, b in pairs])
        axis = segment_distance(starts[:, p_idx], ends[:, p_idx], base_a[b_idx], base_b[b_idx])
        radii = self.radii[limb_ids[p_idx]] + self.radii[base_ids[b_idx]]
        return (axis - radii).min(axis=1)


def _entries(primitives: Sequence[PrimitiveSpec], owner: int) -> List[PrimitiveEntry]:
    return [
        PrimitiveEntry(
            name=primitive.name,
            owner=owner,
            link=primitive.link,
            radius=primitive.radius,
            a=np.asarray(primitive.a, dtype=float),
            b=np.asarray(primitive.b, dtype=float),
            terrain_contact=primitive.terrain_contact,
        )
        for primitive in primitives
    ]


def min_pair_distance(model: RobotModel, state: WholeBodyState) -> Tuple[float, Optional[Tuple[str, str]]]:
    return model.collision.min_pair_distance(state)
