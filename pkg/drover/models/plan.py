"""File models for plans, refinement reports and run manifests."""

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator


class StateRecord(BaseModel):
    """Serialized whole-body state."""

    time: float = 0.0
    position: List[float]
    quaternion: List[float] = Field(description="Unit quaternion (x, y, z, w)")
    q: List[float]
    contacts: List[bool]
    contact_points: List[Optional[List[float]]]

    @field_validator("position")
    @classmethod
    def validate_position(cls, v: List[float]) -> List[float]:
        """Positions are 3D."""
        if len(v) != 3:
            raise ValueError("position must have 3 components")
        return v

    @field_validator("quaternion")
    @classmethod
    def validate_quaternion(cls, v: List[float]) -> List[float]:
        """Orientations are quaternions."""
        if len(v) != 4:
            raise ValueError("quaternion must have 4 components")
        return v


class PhaseRecord(BaseModel):
    """Run of states sharing one contact configuration."""

    duration: float
    contacts: List[bool]
    states: List[StateRecord]


class PlannerMetrics(BaseModel):
    """Anytime statistics of one planner run."""

    iterations: int = 0
    tree_size: int = 0
    iterations_to_first_solution: Optional[int] = None
    time_to_first_solution: Optional[float] = None
    initial_cost: Optional[float] = None
    final_cost: Optional[float] = None
    cost_history: List[Tuple[int, float]] = Field(default_factory=list)
    contact_changes: int = 0


class PlanFile(BaseModel):
    """Plan or refined trajectory file."""

    format_version: int = 1
    kind: str = Field(default="plan", description="'plan' or 'refined'")
    robot_config_hash: str
    limb_names: List[str]
    start: Tuple[float, float, float]
    goal: Tuple[float, float, float]
    metrics: Optional[PlannerMetrics] = None
    phases: List[PhaseRecord]


class OuterIterationRecord(BaseModel):
    """Constraint status after one outer penalty iteration."""

    iteration: int
    weight: float
    accepted: bool
    inner_iterations: int
    max_violation: float
    violations: Dict[str, float]
    violated_counts: Dict[str, int]


class RefinementReport(BaseModel):
    """Outcome of a refinement run."""

    success: bool
    seed_mode: str
    knots: int
    outer_iterations: int
    inner_iterations: int
    wall_time: Optional[float] = None
    initial_violation: Dict[str, float]
    final_violation: Dict[str, float]
    history: List[OuterIterationRecord] = Field(default_factory=list)


class RunManifest(BaseModel):
    """Record of one command invocation."""

    command: str
    tool_version: str
    config: Dict[str, Any]
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    seed: int = 0
    deterministic: bool = False
    timings: Dict[str, float] = Field(default_factory=dict)
    summary: Dict[str, Any] = Field(default_factory=dict)
