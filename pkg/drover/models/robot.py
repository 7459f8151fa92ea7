"""Robot description models.

The robot description is a versioned YAML file validated into ``RobotSpec``.
Its canonical JSON digest identifies the geometry a roadmap was built for.
"""

import hashlib
import json
import math
from typing import List, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from .enums import PrimitiveShape

Vector3 = Tuple[float, float, float]


class PrimitiveSpec(BaseModel):
    """Collision primitive attached to the base or to a limb link.

    Capsules and cylinders span the segment ``a``-``b`` in the link frame;
    spheres sit at ``a``.
    """

    name: str
    shape: PrimitiveShape
    radius: float
    a: Vector3 = (0.0, 0.0, 0.0)
    b: Vector3 = (0.0, 0.0, 0.0)
    link: int = Field(default=0, description="Index of the joint that drives the link")
    terrain_contact: bool = Field(
        default=False, description="Touches the ground by design (wheels, bucket)")

    @field_validator("radius")
    @classmethod
    def validate_radius(cls, v: float) -> float:
        """Ensure primitives have a size."""
        if v <= 0:
            raise ValueError("Primitive radius must be positive")
        return v

    @model_validator(mode="after")
    def collapse_sphere(self) -> "PrimitiveSpec":
        """A sphere's segment is a single point."""
        if self.shape == PrimitiveShape.SPHERE:
            self.b = self.a
        return self


class JointSpec(BaseModel):
    """Revolute joint with the link it drives."""

    name: str
    axis: Vector3
    offset: Vector3 = Field(description="Joint origin in the parent frame")
    lower: float
    upper: float
    link_mass: float = Field(default=0.0, description="Mass of the driven link (kg)")
    link_com: Vector3 = Field(default=(0.0, 0.0, 0.0), description="Link CoM in joint frame")

    @field_validator("axis")
    @classmethod
    def normalize_axis(cls, v: Vector3) -> Vector3:
        """Joint axes are unit vectors."""
        norm = math.sqrt(sum(c * c for c in v))
        if norm == 0.0:
            raise ValueError("Joint axis cannot be zero")
        return (v[0] / norm, v[1] / norm, v[2] / norm)

    @field_validator("link_mass")
    @classmethod
    def validate_mass(cls, v: float) -> float:
        """Masses are non-negative."""
        if v < 0:
            raise ValueError("link_mass must be non-negative")
        return v

    @model_validator(mode="after")
    def check_limits(self) -> "JointSpec":
        """Every joint has finite, ordered limits."""
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError(f"Joint {self.name} needs finite limits")
        if self.lower >= self.upper:
            raise ValueError(f"Joint {self.name} has lower >= upper")
        return self


class LimbSpec(BaseModel):
    """One serial limb rooted at a base-frame mount."""

    name: str
    wheeled: bool
    mount: Vector3
    joints: List[JointSpec]
    ee_offset: Vector3 = Field(description="Wheel center or tool tip in the last joint frame")
    default_config: List[float]
    primitives: List[PrimitiveSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_chain(self) -> "LimbSpec":
        """Chains have two joints or more and a default inside the limits."""
        if len(self.joints) < 2:
            raise ValueError(f"Limb {self.name} needs at least 2 joints")
        if len(self.default_config) != len(self.joints):
            raise ValueError(f"Limb {self.name} default_config has wrong length")
        for value, joint in zip(self.default_config, self.joints):
            if not joint.lower <= value <= joint.upper:
                raise ValueError(f"Limb {self.name} default_config violates {joint.name} limits")
        for primitive in self.primitives:
            if not 0 <= primitive.link < len(self.joints):
                raise ValueError(f"Primitive {primitive.name} references a missing link")
        return self

    @property
    def mass(self) -> float:
        """Total limb mass."""
        return float(sum(joint.link_mass for joint in self.joints))


class BaseSpec(BaseModel):
    """Floating base."""

    mass: float
    com_offset: Vector3 = (0.0, 0.0, 0.0)
    primitives: List[PrimitiveSpec] = Field(default_factory=list)

    @field_validator("mass")
    @classmethod
    def validate_mass(cls, v: float) -> float:
        """The base carries mass."""
        if v <= 0:
            raise ValueError("Base mass must be positive")
        return v


class RobotSpec(BaseModel):
    """Complete robot description."""

    version: int = Field(default=1, description="Robot description format version")
    name: str = Field(default="robot")
    base: BaseSpec
    limbs: List[LimbSpec]
    wheel_radius: float
    h_desired: float = Field(description="Nominal base height above smoothed terrain (m)")
    max_roll: float = Field(default=math.radians(20.0), description="Roll limit (rad)")
    max_pitch: float = Field(default=math.radians(20.0), description="Pitch limit (rad)")
    contact_eps: float = Field(default=0.05, description="Contact height tolerance (m)")
    stability_margin: float = Field(default=0.05, description="Support polygon shrink (m)")

    @field_validator("wheel_radius", "h_desired", "max_roll", "max_pitch", "contact_eps")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Ensure geometric scalars are positive."""
        if v <= 0:
            raise ValueError("Robot scalars must be positive")
        return v

    @field_validator("stability_margin")
    @classmethod
    def validate_margin(cls, v: float) -> float:
        """Margins are non-negative."""
        if v < 0:
            raise ValueError("stability_margin must be non-negative")
        return v

    @model_validator(mode="after")
    def check_limbs(self) -> "RobotSpec":
        """At least two wheeled limbs and unique names."""
        names = [limb.name for limb in self.limbs]
        if len(set(names)) != len(names):
            raise ValueError("Limb names must be unique")
        if sum(1 for limb in self.limbs if limb.wheeled) < 2:
            raise ValueError("A robot needs at least 2 wheeled limbs")
        return self

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form of the description."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
