"""Constraint residuals, quadratic penalty and its gradient.

Kinematic derivatives are analytic. Derivatives of terrain layers come from
central differences of the interpolated layer, and every gradient term that
flows through a terrain layer is norm-clipped before accumulation.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from ...errors import BoundaryProximityError, OutOfBoundsError
from ..gridmap import SDF
from ..robot import BASE_OWNER, GRAVITY_UP, axis_rotation, segment_closest_points, skew
from .problem import BASE_VARIABLES, RefinementProblem

logger = structlog.get_logger(__name__)

CONTACT_HEIGHT = "contact_height"
TRAVERSABILITY = "traversability"
ROLLING = "rolling"
COLLISION = "collision"
JOINT_LIMITS = "joint_limits"
BASE_POSE_BOUNDARY = "base_pose_boundary"

FAMILIES = (CONTACT_HEIGHT, TRAVERSABILITY, ROLLING, COLLISION, JOINT_LIMITS, BASE_POSE_BOUNDARY)

_E = np.eye(3)
_PERP = np.array([[0.0, -1.0], [1.0, 0.0]])
_TINY = 1e-12


def base_rotation(angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """``Rz(yaw) Ry(pitch) Rx(roll)`` per knot and its derivatives ``(n, 3, 3, 3)``."""
    rx = axis_rotation(_E[0], angles[:, 0])
    ry = axis_rotation(_E[1], angles[:, 1])
    rz = axis_rotation(_E[2], angles[:, 2])
    rotation = rz @ ry @ rx
    d_roll = rotation @ skew(_E[0])
    d_pitch = rz @ ry @ skew(_E[1]) @ rx
    d_yaw = skew(_E[2]) @ rotation
    return rotation, np.stack([d_roll, d_pitch, d_yaw], axis=1)


class KnotKinematics:
    """World positions and knot-variable Jacobians of points on the robot."""

    def __init__(self, problem: RefinementProblem, x: np.ndarray):
        self.model = problem.model
        self.count, self.width = x.shape
        self.position = x[:, :3]
        self.rotation, self.d_rotation = base_rotation(x[:, 3:6])
        self.frames = [
            limb.frames(x[:, BASE_VARIABLES + s.start:BASE_VARIABLES + s.stop])
            for limb, s in zip(self.model.limbs, self.model.slices)
        ]

    def _columns(self, limb: int) -> slice:
        s = self.model.slices[limb]
        return slice(BASE_VARIABLES + s.start, BASE_VARIABLES + s.stop)

    def world(self, local: np.ndarray) -> np.ndarray:
        return self.position + np.einsum("nij,nj->ni", self.rotation, local)

    def jacobian(self, local: np.ndarray, limb: Optional[int] = None,
                 local_jacobian: Optional[np.ndarray] = None) -> np.ndarray:
        """``(n, 3, width)`` Jacobian of ``t + R v`` for base-frame points ``v``."""
        jac = np.zeros((self.count, 3, self.width))
        jac[:, :, :3] = _E
        jac[:, :, 3:6] = np.einsum("nkij,nj->nik", self.d_rotation, local)
        if limb is not None:
            jac[:, :, self._columns(limb)] = self.rotation @ local_jacobian
        return jac

    def contact(self, limb: int) -> Tuple[np.ndarray, np.ndarray]:
        """Contact point of a limb at every knot and its Jacobian."""
        kin = self.model.limbs[limb]
        frames = self.frames[limb]
        local_jac = kin.point_jacobian(frames, frames.ee, kin.dof - 1)
        point = self.world(frames.ee)
        if kin.wheeled:
            point = point - self.model.wheel_radius * GRAVITY_UP
        return point, self.jacobian(frames.ee, limb, local_jac)

    def heading(self, limb: int) -> Tuple[np.ndarray, np.ndarray]:
        """Rolling direction of a wheel (last link x-axis) and its Jacobian."""
        frames = self.frames[limb]
        local = frames.rotations[:, -1] @ _E[0]
        direction = np.einsum("nij,nj->ni", self.rotation, local)
        jac = np.zeros((self.count, 3, self.width))
        jac[:, :, 3:6] = np.einsum("nkij,nj->nik", self.d_rotation, local)
        local_jac = np.cross(frames.axes, local[:, None, :]).transpose(0, 2, 1)
        jac[:, :, self._columns(limb)] = self.rotation @ local_jac
        return direction, jac

    def primitive_point(self, owner: int, link: int, local: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """A point fixed to the base or to a limb link, with its Jacobian."""
        if owner == BASE_OWNER:
            v = np.broadcast_to(local, (self.count, 3))
            return self.world(v), self.jacobian(v)
        kin = self.model.limbs[owner]
        frames = self.frames[owner]
        v = kin.attached_points(frames, link, local)
        return self.world(v), self.jacobian(v, owner, kin.point_jacobian(frames, v, link))


@dataclass
class Evaluation:
    """Residuals, violations and (optionally) the penalty gradient at one iterate."""

    residuals: Dict[str, np.ndarray]
    violations: Dict[str, np.ndarray]
    penalty: float
    gradient: Optional[np.ndarray] = None
    terrain_gradients: Dict[str, np.ndarray] = field(default_factory=dict)

    def family_max(self) -> Dict[str, float]:
        return {name: float(values.max()) if values.size else 0.0
                for name, values in self.violations.items()}

    def max_violation(self) -> float:
        return max(self.family_max().values(), default=0.0)


def _clip_rows(rows: np.ndarray, threshold: Optional[float]) -> np.ndarray:
    if threshold is None or not np.isfinite(threshold) or rows.size == 0:
        return rows
    norms = np.linalg.norm(rows, axis=1)
    scale = np.minimum(1.0, threshold / np.maximum(norms, _TINY))
    return rows * scale[:, None]


class _Accumulator:
    def __init__(self, shape: Tuple[int, int], enabled: bool):
        self.enabled = enabled
        self.gradient = np.zeros(shape) if enabled else None

    def add(self, knots: np.ndarray, rows: np.ndarray) -> None:
        if self.enabled and len(knots):
            np.add.at(self.gradient, knots, rows)


def _contact_points(problem: RefinementProblem, kin: KnotKinematics):
    """Per-limb contact points and Jacobians at every knot."""
    return [kin.contact(limb) for limb in range(len(problem.model.limbs))]


def _terrain(problem: RefinementProblem, layer: str, xy: np.ndarray, strict: bool):
    values = problem.grid.values_at(layer, xy, problem.interpolation)
    if np.isnan(values).any():
        if strict:
            bad = xy[np.flatnonzero(np.isnan(values))[0]]
            raise OutOfBoundsError(f"Contact point {tuple(np.round(bad, 4))} is outside the map footprint")
        return None, None
    slopes = problem.grid.gradients_at(layer, xy, problem.interpolation, problem.terrain_fd_step)
    return values, np.nan_to_num(slopes, nan=0.0, posinf=0.0, neginf=0.0)


def evaluate(
    problem: RefinementProblem,
    x: np.ndarray,
    weight: float = 1.0,
    gradient: bool = True,
    clip: Optional[float] = None,
    strict: bool = False,
) -> Evaluation:
    """Residuals of every constraint family and the weighted quadratic penalty.

    Non-strict evaluation returns an infinite penalty when a contact leaves
    the map footprint; strict evaluation raises ``OutOfBoundsError``.
    """
    kin = KnotKinematics(problem, x)
    acc = _Accumulator(x.shape, gradient)
    model = problem.model
    residuals: Dict[str, np.ndarray] = {}
    violations: Dict[str, np.ndarray] = {}
    slopes_used: Dict[str, np.ndarray] = {}
    penalty = 0.0

    contacts = _contact_points(problem, kin)
    knots_of = [np.flatnonzero(problem.contacts[:, limb]) for limb in range(len(model.limbs))]
    knots = np.concatenate(knots_of) if knots_of else np.zeros(0, dtype=int)
    points = np.concatenate([contacts[l][0][k] for l, k in enumerate(knots_of)]).reshape(-1, 3)
    jacs = np.concatenate([contacts[l][1][k] for l, k in enumerate(knots_of)]).reshape(-1, 3, x.shape[1])

    # Contact height
    heights, height_slopes = _terrain(problem, problem.height_layer, points[:, :2], strict)
    if heights is None:
        return _infeasible()
    r_height = points[:, 2] - heights
    height_kin = jacs[:, 2, :]
    height_terrain = -np.einsum("mi,min->mn", height_slopes, jacs[:, :2, :])
    penalty += weight * float(np.sum(r_height ** 2))
    acc.add(knots, 2.0 * weight * r_height[:, None] * height_kin)
    acc.add(knots, _clip_rows(2.0 * weight * r_height[:, None] * height_terrain, clip))
    residuals[CONTACT_HEIGHT] = r_height
    violations[CONTACT_HEIGHT] = np.abs(r_height)
    slopes_used[CONTACT_HEIGHT] = height_slopes

    # Traversability
    clearance, sdf_slopes = _terrain(problem, SDF, points[:, :2], strict)
    if clearance is None:
        return _infeasible()
    with np.errstate(invalid="ignore"):
        hinge = problem.sdf_margin + problem.hinge_margin - clearance
    active = hinge > 0
    penalty += weight * float(np.sum(hinge[active] ** 2))
    rows = -np.einsum("mi,min->mn", sdf_slopes[active], jacs[active][:, :2, :])
    acc.add(knots[active], _clip_rows(2.0 * weight * hinge[active][:, None] * rows, clip))
    residuals[TRAVERSABILITY] = np.maximum(0.0, problem.sdf_margin - clearance)
    violations[TRAVERSABILITY] = residuals[TRAVERSABILITY]
    slopes_used[TRAVERSABILITY] = sdf_slopes

    # Rolling
    penalty += _rolling(problem, kin, contacts, knots_of, r_height, height_kin, height_terrain,
                        weight, clip, acc, residuals, violations)

    # Collision
    penalty += _collision(problem, kin, weight, acc, residuals, violations)

    # Joint limits
    q = x[:, BASE_VARIABLES:]
    below = np.maximum(0.0, model.lower_limits() - q)
    above = np.maximum(0.0, q - model.upper_limits())
    penalty += weight * float(np.sum(below ** 2) + np.sum(above ** 2))
    if gradient:
        acc.gradient[:, BASE_VARIABLES:] += 2.0 * weight * (above - below)
    residuals[JOINT_LIMITS] = (below + above).ravel()
    violations[JOINT_LIMITS] = residuals[JOINT_LIMITS]

    pinned = np.concatenate([
        np.abs(x[0, :BASE_VARIABLES] - problem.x0[0, :BASE_VARIABLES]),
        np.abs(x[-1, :BASE_VARIABLES] - problem.x0[-1, :BASE_VARIABLES]),
    ])
    residuals[BASE_POSE_BOUNDARY] = pinned
    violations[BASE_POSE_BOUNDARY] = pinned

    return Evaluation(residuals, violations, penalty, acc.gradient, slopes_used)


def _infeasible() -> Evaluation:
    empty = {name: np.zeros(0) for name in FAMILIES}
    return Evaluation(empty, dict(empty), np.inf, None)


def _rolling(problem, kin, contacts, knots_of, r_height, height_kin, height_terrain,
             weight, clip, acc, residuals, violations) -> float:
    """Lateral slip against the wheel heading and drift off the surface between knots."""
    penalty = 0.0
    lateral: List[np.ndarray] = []
    vertical: List[np.ndarray] = []
    offset = 0
    offsets = []
    for limb_knots in knots_of:
        offsets.append(offset)
        offset += len(limb_knots)

    for limb in problem.model.wheeled:
        both = problem.contacts[:-1, limb] & problem.contacts[1:, limb]
        first = np.flatnonzero(both)
        if len(first) == 0:
            continue
        second = first + 1
        point, jac = contacts[limb]
        direction, d_jac = kin.heading(limb)

        u = direction[first, :2]
        norm = np.maximum(np.linalg.norm(u, axis=1), _TINY)
        normal = (u @ _PERP.T) / norm[:, None]
        delta = point[second, :2] - point[first, :2]
        r_lat = np.sum(normal * delta, axis=1)

        projector = (np.eye(2)[None] - normal[:, :, None] * normal[:, None, :]) / norm[:, None, None]
        d_normal = np.einsum("mij,jk,mkn->min", projector, _PERP, d_jac[first, :2, :])
        rows_first = np.einsum("mi,min->mn", delta, d_normal) - np.einsum("mi,min->mn", normal, jac[first, :2, :])
        rows_second = np.einsum("mi,min->mn", normal, jac[second, :2, :])
        penalty += weight * float(np.sum(r_lat ** 2))
        acc.add(first, 2.0 * weight * r_lat[:, None] * rows_first)
        acc.add(second, 2.0 * weight * r_lat[:, None] * rows_second)
        lateral.append(r_lat)

        # Rows of the contact-height residual for this limb, indexed by knot
        position = np.full(problem.knots, -1)
        position[knots_of[limb]] = offsets[limb] + np.arange(len(knots_of[limb]))
        a, b = position[first], position[second]
        r_vert = r_height[b] - r_height[a]
        penalty += weight * float(np.sum(r_vert ** 2))
        coeff = 2.0 * weight * r_vert[:, None]
        acc.add(second, coeff * height_kin[b])
        acc.add(first, -coeff * height_kin[a])
        acc.add(second, _clip_rows(coeff * height_terrain[b], clip))
        acc.add(first, _clip_rows(-coeff * height_terrain[a], clip))
        vertical.append(r_vert)

    r_all = np.concatenate(lateral + vertical) if lateral else np.zeros(0)
    residuals[ROLLING] = r_all
    violations[ROLLING] = np.abs(r_all)
    return penalty


def _collision(problem, kin, weight, acc, residuals, violations) -> float:
    """Hinge on the signed distance of every non-adjacent primitive pair."""
    collision = problem.collision
    if len(collision.pairs) == 0:
        residuals[COLLISION] = np.zeros(problem.knots)
        violations[COLLISION] = residuals[COLLISION]
        return 0.0

    ends = [
        (kin.primitive_point(e.owner, e.link, e.a), kin.primitive_point(e.owner, e.link, e.b))
        for e in collision.entries
    ]
    starts = np.stack([a[0] for a, _ in ends], axis=1)
    finishes = np.stack([b[0] for _, b in ends], axis=1)
    i, j = collision.pairs[:, 0], collision.pairs[:, 1]
    s, t, c1, c2 = segment_closest_points(starts[:, i], finishes[:, i], starts[:, j], finishes[:, j])
    diff = c1 - c2
    axis = np.linalg.norm(diff, axis=-1)
    distance = axis - collision.radii[i] - collision.radii[j]

    hinge = problem.d_min + problem.hinge_margin - distance
    knots, pairs = np.nonzero(hinge > 0)
    penalty = weight * float(np.sum(hinge[knots, pairs] ** 2))
    if acc.enabled and len(knots):
        normal = diff[knots, pairs] / np.maximum(axis[knots, pairs], _TINY)[:, None]
        rows = np.zeros((len(knots), kin.width))
        for n, (k, p) in enumerate(zip(knots, pairs)):
            first, second = ends[i[p]], ends[j[p]]
            dc1 = (1.0 - s[k, p]) * first[0][1][k] + s[k, p] * first[1][1][k]
            dc2 = (1.0 - t[k, p]) * second[0][1][k] + t[k, p] * second[1][1][k]
            rows[n] = -normal[n] @ (dc1 - dc2)
        acc.add(knots, 2.0 * weight * hinge[knots, pairs][:, None] * rows)

    residuals[COLLISION] = np.maximum(0.0, problem.d_min - distance.min(axis=1))
    violations[COLLISION] = residuals[COLLISION]
    return penalty


def eval_constraints(problem: RefinementProblem, x: np.ndarray) -> Dict[str, np.ndarray]:
    """Signed residual vectors per constraint family.

    Raises:
        OutOfBoundsError: A contact point lies outside the map footprint.
    """
    return evaluate(problem, x, gradient=False, strict=True).residuals


def check_gradients(
    problem: RefinementProblem,
    x: np.ndarray,
    step: float = 1e-6,
    samples: int = 60,
    seed: int = 0,
    zero_tol: float = 1e-6,
) -> float:
    """Largest relative error between the assembled and a central-difference gradient.

    Coordinates where both gradients are below ``zero_tol`` in magnitude are
    skipped; their absolute error is logged with the result.

    Raises:
        BoundaryProximityError: A terrain query lies within one cell of the footprint edge.
    """
    grid = problem.grid
    kin = KnotKinematics(problem, x)
    for limb in range(len(problem.model.limbs)):
        points = kin.contact(limb)[0][problem.contacts[:, limb]]
        if len(points) == 0:
            continue
        fr, fc = grid.continuous_index(points[:, :2])
        if fr.min() < 2 or fc.min() < 2 or fr.max() > grid.rows - 3 or fc.max() > grid.cols - 3:
            raise BoundaryProximityError("Terrain query within one cell of the map boundary")

    analytic = evaluate(problem, x, gradient=True, clip=None).gradient
    free = np.argwhere(problem.free)
    rng = np.random.default_rng(seed)
    chosen = free[np.sort(rng.choice(len(free), size=min(samples, len(free)), replace=False))]

    worst = worst_absolute = 0.0
    skipped = 0
    for k, v in chosen:
        plus, minus = x.copy(), x.copy()
        plus[k, v] += step
        minus[k, v] -= step
        numeric = (evaluate(problem, plus, gradient=False).penalty
                   - evaluate(problem, minus, gradient=False).penalty) / (2.0 * step)
        error = abs(analytic[k, v] - numeric)
        worst_absolute = max(worst_absolute, error)
        scale = max(abs(numeric), abs(analytic[k, v]))
        if scale <= zero_tol:
            skipped += 1
            continue
        worst = max(worst, error / max(scale, _TINY))
    logger.debug("Gradient check", samples=len(chosen), skipped=skipped, step=step,
                 max_relative_error=worst, max_absolute_error=worst_absolute)
    return float(worst)
