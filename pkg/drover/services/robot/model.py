"""Whole-body robot model: base pose, limbs, CoM, contacts and IK."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.spatial.transform import Rotation

from ...errors import IKConvergenceError
from ...models.enums import InterpolationMethod
from ...models.robot import RobotSpec
from ..gridmap import ELEVATION, GridMap
from .kinematics import LimbKinematics

if TYPE_CHECKING:
    from .collision import CollisionModel

logger = structlog.get_logger(__name__)

GRAVITY_UP = np.array([0.0, 0.0, 1.0])

IK_DAMPING = 1e-3
IK_MAX_ITERATIONS = 200
IK_TOLERANCE = 1e-4
IK_MAX_STEP = 0.2


@dataclass(frozen=True)
class Pose3:
    """Rigid transform with a unit quaternion stored as (x, y, z, w)."""

    position: np.ndarray
    quaternion: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.0, 1.0]))

    def __post_init__(self) -> None:
        q = np.asarray(self.quaternion, dtype=float)
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "quaternion", q / np.linalg.norm(q))

    @classmethod
    def from_euler(cls, position: Sequence[float], roll: float, pitch: float, yaw: float) -> "Pose3":
        quat = Rotation.from_euler("ZYX", [yaw, pitch, roll]).as_quat()
        return cls(np.asarray(position, dtype=float), quat)

    @classmethod
    def from_matrix(cls, position: Sequence[float], matrix: np.ndarray) -> "Pose3":
        return cls(np.asarray(position, dtype=float), Rotation.from_matrix(matrix).as_quat())

    @property
    def rotation(self) -> np.ndarray:
        return Rotation.from_quat(self.quaternion).as_matrix()

    def euler(self) -> Tuple[float, float, float]:
        """(roll, pitch, yaw) for ``R = Rz(yaw) Ry(pitch) Rx(roll)``."""
        yaw, pitch, roll = Rotation.from_quat(self.quaternion).as_euler("ZYX")
        return float(roll), float(pitch), float(yaw)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Map base-frame points ``(..., 3)`` into the world."""
        return np.asarray(points, dtype=float) @ self.rotation.T + self.position

    def inverse_transform(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.position) @ self.rotation

    def translated(self, offset: Sequence[float]) -> "Pose3":
        return Pose3(self.position + np.asarray(offset, dtype=float), self.quaternion)


@dataclass
class WholeBodyState:
    """Base pose, concatenated joint vector and per-limb contacts."""

    base_pose: Pose3
    q: np.ndarray
    contacts: Tuple[bool, ...]
    contact_points: Tuple[Optional[np.ndarray], ...] = ()

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=float)
        self.contacts = tuple(bool(c) for c in self.contacts)
        if not self.contact_points:
            self.contact_points = tuple(None for _ in self.contacts)
        if len(self.contact_points) != len(self.contacts):
            raise ValueError("contact_points must have one entry per limb")


class RobotModel:
    """Kinematic model built from a validated ``RobotSpec``."""

    def __init__(self, spec: RobotSpec):
        self.spec = spec
        self.limbs: List[LimbKinematics] = [LimbKinematics(limb) for limb in spec.limbs]
        self.limb_index: Dict[str, int] = {limb.name: i for i, limb in enumerate(self.limbs)}
        self.wheel_radius = spec.wheel_radius
        self.h_desired = spec.h_desired
        self.max_roll = spec.max_roll
        self.max_pitch = spec.max_pitch
        self.contact_eps = spec.contact_eps
        self.stability_margin = spec.stability_margin
        self.base_mass = spec.base.mass
        self.base_com = np.asarray(spec.base.com_offset, dtype=float)
        self.total_mass = self.base_mass + sum(limb.mass for limb in self.limbs)

        bounds = np.cumsum([0] + [limb.dof for limb in self.limbs])
        self.slices = [slice(int(bounds[i]), int(bounds[i + 1])) for i in range(len(self.limbs))]
        self.dof = int(bounds[-1])
        self.wheeled = [i for i, limb in enumerate(self.limbs) if limb.wheeled]
        self.arms = [i for i, limb in enumerate(self.limbs) if not limb.wheeled]
        self.config_hash = spec.config_hash()

    @property
    def limb_names(self) -> List[str]:
        return [limb.name for limb in self.limbs]

    @cached_property
    def collision(self) -> "CollisionModel":
        """Self-collision model shared by every consumer of this robot."""
        from .collision import CollisionModel

        return CollisionModel(self)

    def limb(self, limb_id) -> LimbKinematics:
        if isinstance(limb_id, str):
            try:
                return self.limbs[self.limb_index[limb_id]]
            except KeyError:
                raise KeyError(f"Unknown limb: {limb_id}") from None
        return self.limbs[limb_id]

    def default_q(self) -> np.ndarray:
        return np.concatenate([limb.default_config for limb in self.limbs])

    def split(self, q: np.ndarray) -> List[np.ndarray]:
        """Per-limb views of a concatenated joint vector."""
        return [q[..., s] for s in self.slices]

    def lower_limits(self) -> np.ndarray:
        return np.concatenate([limb.lower for limb in self.limbs])

    def upper_limits(self) -> np.ndarray:
        return np.concatenate([limb.upper for limb in self.limbs])

    # Kinematics

    def fk_limb(self, limb_id, q_i: np.ndarray, base_pose: Pose3) -> np.ndarray:
        """World position of the limb's end effector (wheel center for wheels)."""
        limb = self.limb(limb_id)
        q_i = np.asarray(q_i, dtype=float)
        limb.check_limits(q_i)
        return base_pose.transform(limb.ee_positions(q_i)[0])

    def contact_point(self, limb_id, q_i: np.ndarray, base_pose: Pose3) -> np.ndarray:
        """Ground contact: below the wheel center along gravity, or the tool tip."""
        point = self.fk_limb(limb_id, q_i, base_pose)
        if self.limb(limb_id).wheeled:
            point = point - self.wheel_radius * GRAVITY_UP
        return point

    def in_contact(
        self,
        grid: GridMap,
        p_contact: Sequence[float],
        eps: Optional[float] = None,
        layer: str = ELEVATION,
    ) -> bool:
        """Whether ``p_contact`` lies within ``eps`` of the bicubic terrain height."""
        eps = self.contact_eps if eps is None else eps
        height = grid.value_at(layer, p_contact[:2], InterpolationMethod.BICUBIC)
        return bool(abs(float(p_contact[2]) - height) <= eps)

    def whole_body_com(self, state: WholeBodyState) -> np.ndarray:
        """World CoM from the base CoM and every limb's configuration-dependent CoM."""
        weighted = self.base_mass * self.base_com
        for limb, q_i in zip(self.limbs, self.split(state.q)):
            if limb.mass > 0:
                weighted = weighted + limb.mass * limb.com_positions(q_i)[0]
        return state.base_pose.transform(weighted / self.total_mass)

    def com_from_limb_coms(self, base_pose: Pose3, limb_coms: Sequence[np.ndarray]) -> np.ndarray:
        """World CoM from cached base-frame limb CoMs."""
        weighted = self.base_mass * self.base_com
        for limb, com in zip(self.limbs, limb_coms):
            weighted = weighted + limb.mass * np.asarray(com)
        return base_pose.transform(weighted / self.total_mass)

    def ik_limb(self, limb_id, target: Sequence[float], q_seed: np.ndarray) -> np.ndarray:
        """Joint vector placing the end effector at a base-frame ``target``.

        Damped least squares from ``q_seed`` with per-step norm capping and
        clamping to the joint limits.

        Raises:
            IKConvergenceError: Target unreachable within the iteration cap.
        """
        limb = self.limb(limb_id)
        target = np.asarray(target, dtype=float)
        if np.linalg.norm(target - limb.mount) > limb.reach + limb.dof * IK_TOLERANCE:
            raise IKConvergenceError(f"Target {target.tolist()} outside the reach of {limb.name}")

        q = limb.clamp(np.asarray(q_seed, dtype=float).copy())
        damping = IK_DAMPING * IK_DAMPING * np.eye(3)
        for _ in range(IK_MAX_ITERATIONS):
            error = target - limb.ee_positions(q)[0]
            if np.linalg.norm(error) <= IK_TOLERANCE:
                return q
            jac = limb.ee_jacobian(q)[0]
            step = jac.T @ np.linalg.solve(jac @ jac.T + damping, error)
            norm = np.linalg.norm(step)
            if norm > IK_MAX_STEP:
                step *= IK_MAX_STEP / norm
            q = limb.clamp(q + step)
        if np.linalg.norm(target - limb.ee_positions(q)[0]) <= IK_TOLERANCE:
            return q
        raise IKConvergenceError(
            f"IK for {limb.name} did not converge within {IK_MAX_ITERATIONS} iterations")

    # States

    def validate_state(self, state: WholeBodyState) -> None:
        """Raise when joints leave their limits or contacts are inconsistent."""
        if state.q.shape != (self.dof,):
            raise ValueError(f"Joint vector has shape {state.q.shape}, expected ({self.dof},)")
        for limb, q_i in zip(self.limbs, self.split(state.q)):
            limb.check_limits(q_i)
        if len(state.contacts) != len(self.limbs):
            raise ValueError("One contact flag per limb is required")
        for flag, point in zip(state.contacts, state.contact_points):
            if flag != (point is not None):
                raise ValueError("contact_points must be present exactly for limbs in contact")

    def with_contact_points(self, base_pose: Pose3, q: np.ndarray, contacts: Sequence[bool]) -> WholeBodyState:
        """State whose contact points are computed from kinematics."""
        points = []
        for i, (flag, q_i) in enumerate(zip(contacts, self.split(q))):
            points.append(self.contact_point(i, q_i, base_pose) if flag else None)
        return WholeBodyState(base_pose, q, tuple(contacts), tuple(points))

