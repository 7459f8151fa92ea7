"""Batched forward kinematics of serial revolute limbs.

Every joint ``j`` applies ``Trans(offset_j) * Rot(axis_j, q_j)`` to its
parent frame. All routines take a batch of configurations ``(N, n)`` and
return base-frame quantities.
"""

from dataclasses import dataclass

import numpy as np

from ...errors import JointLimitError
from ...models.robot import LimbSpec

# Joint values may exceed a limit by this much before counting as a violation
LIMIT_TOL = 1e-9


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrices of vectors ``(..., 3)``."""
    v = np.asarray(v, dtype=float)
    zero = np.zeros(v.shape[:-1])
    return np.stack([
        np.stack([zero, -v[..., 2], v[..., 1]], axis=-1),
        np.stack([v[..., 2], zero, -v[..., 0]], axis=-1),
        np.stack([-v[..., 1], v[..., 0], zero], axis=-1),
    ], axis=-2)


def axis_rotation(axis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rotation matrices about a fixed unit ``axis`` for every angle."""
    angles = np.asarray(angles, dtype=float)
    k = skew(np.asarray(axis, dtype=float))
    s = np.sin(angles)[..., None, None]
    c = np.cos(angles)[..., None, None]
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


@dataclass
class LimbFrames:
    """Joint frames for a batch of configurations (base frame)."""

    origins: np.ndarray  # (N, n, 3) joint origins
    axes: np.ndarray  # (N, n, 3) joint axes
    rotations: np.ndarray  # (N, n, 3, 3) frame orientation after each joint
    ee: np.ndarray  # (N, 3) wheel center or tool tip


class LimbKinematics:
    """Kinematic chain of one limb."""

    def __init__(self, spec: LimbSpec):
        self.spec = spec
        self.name = spec.name
        self.wheeled = spec.wheeled
        self.dof = len(spec.joints)
        self.mount = np.asarray(spec.mount, dtype=float)
        self.offsets = np.array([joint.offset for joint in spec.joints], dtype=float)
        self.joint_axes = np.array([joint.axis for joint in spec.joints], dtype=float)
        self.lower = np.array([joint.lower for joint in spec.joints])
        self.upper = np.array([joint.upper for joint in spec.joints])
        self.link_masses = np.array([joint.link_mass for joint in spec.joints])
        self.link_coms = np.array([joint.link_com for joint in spec.joints], dtype=float)
        self.mass = float(self.link_masses.sum())
        self.ee_offset = np.asarray(spec.ee_offset, dtype=float)
        self.default_config = np.asarray(spec.default_config, dtype=float)
        self.reach = float(np.linalg.norm(self.offsets[1:], axis=1).sum() + np.linalg.norm(self.ee_offset))

    # Limits

    def within_limits(self, q: np.ndarray) -> np.ndarray:
        q = np.atleast_2d(q)
        return np.all((q >= self.lower - LIMIT_TOL) & (q <= self.upper + LIMIT_TOL), axis=-1)

    def check_limits(self, q: np.ndarray) -> None:
        """Raise ``JointLimitError`` when any joint is outside its range."""
        if not self.within_limits(q).all():
            raise JointLimitError(f"Configuration {np.round(q, 6).tolist()} violates limits of {self.name}")

    def clamp(self, q: np.ndarray) -> np.ndarray:
        return np.clip(q, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform configurations inside the joint box."""
        return rng.uniform(self.lower, self.upper, size=(count, self.dof))

    # Forward kinematics

    def frames(self, q: np.ndarray) -> LimbFrames:
        q = np.atleast_2d(np.asarray(q, dtype=float))
        batch = q.shape[0]
        origins = np.empty((batch, self.dof, 3))
        axes = np.empty((batch, self.dof, 3))
        rotations = np.empty((batch, self.dof, 3, 3))
        position = np.broadcast_to(self.mount, (batch, 3)).copy()
        rotation = np.broadcast_to(np.eye(3), (batch, 3, 3)).copy()
        for j in range(self.dof):
            position = position + rotation @ self.offsets[j]
            axes[:, j] = rotation @ self.joint_axes[j]
            rotation = rotation @ axis_rotation(self.joint_axes[j], q[:, j])
            origins[:, j] = position
            rotations[:, j] = rotation
        ee = position + rotation @ self.ee_offset
        return LimbFrames(origins=origins, axes=axes, rotations=rotations, ee=ee)

    def ee_positions(self, q: np.ndarray) -> np.ndarray:
        """Base-frame end-effector (wheel center for wheeled limbs)."""
        return self.frames(q).ee

    def link_com_positions(self, frames: LimbFrames) -> np.ndarray:
        """Base-frame CoM of every link ``(N, n, 3)``."""
        return frames.origins + np.einsum("nkij,kj->nki", frames.rotations, self.link_coms)

    def com_positions(self, q: np.ndarray) -> np.ndarray:
        """Base-frame limb CoM; the mount for massless limbs."""
        frames = self.frames(q)
        if self.mass <= 0:
            return np.broadcast_to(self.mount, frames.ee.shape).copy()
        coms = self.link_com_positions(frames)
        return np.einsum("k,nki->ni", self.link_masses, coms) / self.mass

    def point_jacobian(self, frames: LimbFrames, points: np.ndarray, link: int) -> np.ndarray:
        """Jacobians ``(N, 3, n)`` of points rigidly attached to ``link``."""
        batch = frames.origins.shape[0]
        jac = np.zeros((batch, 3, self.dof))
        for j in range(link + 1):
            jac[:, :, j] = np.cross(frames.axes[:, j], points - frames.origins[:, j])
        return jac

    def ee_jacobian(self, q: np.ndarray) -> np.ndarray:
        frames = self.frames(q)
        return self.point_jacobian(frames, frames.ee, self.dof - 1)

    def com_jacobian(self, q: np.ndarray) -> np.ndarray:
        """Jacobian of the mass-weighted limb CoM sum ``sum_k m_k c_k``."""
        frames = self.frames(q)
        coms = self.link_com_positions(frames)
        jac = np.zeros((coms.shape[0], 3, self.dof))
        for k in range(self.dof):
            if self.link_masses[k] > 0:
                jac += self.link_masses[k] * self.point_jacobian(frames, coms[:, k], k)
        return jac

    def attached_points(self, frames: LimbFrames, link: int, local: np.ndarray) -> np.ndarray:
        """Base-frame position of a point given in the frame of ``link``."""
        return frames.origins[:, link] + frames.rotations[:, link] @ np.asarray(local, dtype=float)
