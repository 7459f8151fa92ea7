"""Refinement stage: penalty-based trajectory feasibility over terrain."""

from .constraints import (
    BASE_POSE_BOUNDARY,
    COLLISION,
    CONTACT_HEIGHT,
    FAMILIES,
    JOINT_LIMITS,
    ROLLING,
    TRAVERSABILITY,
    Evaluation,
    KnotKinematics,
    base_rotation,
    check_gradients,
    eval_constraints,
    evaluate,
)
from .problem import (
    BASE_VARIABLES,
    RefinementProblem,
    endpoint_error,
    knot_count,
    knot_state,
    project_joints,
    seed_linear,
    state_variables,
    to_path,
    transcribe,
)
from .solver import PenaltySolver, RefinedTrajectory, solve, tolerances

__all__ = [
    "BASE_POSE_BOUNDARY",
    "BASE_VARIABLES",
    "COLLISION",
    "CONTACT_HEIGHT",
    "Evaluation",
    "FAMILIES",
    "JOINT_LIMITS",
    "KnotKinematics",
    "PenaltySolver",
    "ROLLING",
    "RefinedTrajectory",
    "RefinementProblem",
    "TRAVERSABILITY",
    "base_rotation",
    "check_gradients",
    "endpoint_error",
    "eval_constraints",
    "evaluate",
    "knot_count",
    "knot_state",
    "project_joints",
    "seed_linear",
    "solve",
    "state_variables",
    "tolerances",
    "transcribe",
]
