"""Sampling-based initialization stage."""

from .feasibility import SWING_CLEARANCE, FeasibilityChecker, check_feasibility, contact_changes
from .finalize import PathFinalizer, contact_runs, finalize, with_limb
from .path import PlanPhase, WholeBodyPath
from .plan_io import (
    PLAN_FORMAT_VERSION,
    from_plan_file,
    load_plan,
    read_plan_file,
    save_plan,
    to_plan_file,
)
from .rrt import DETERMINISTIC_ITERATIONS, Connection, InitPlanner, TreeNode, plan, same_pose

__all__ = [
    "Connection",
    "DETERMINISTIC_ITERATIONS",
    "FeasibilityChecker",
    "InitPlanner",
    "PLAN_FORMAT_VERSION",
    "PathFinalizer",
    "PlanPhase",
    "SWING_CLEARANCE",
    "TreeNode",
    "WholeBodyPath",
    "check_feasibility",
    "contact_changes",
    "contact_runs",
    "finalize",
    "from_plan_file",
    "load_plan",
    "plan",
    "read_plan_file",
    "same_pose",
    "save_plan",
    "to_plan_file",
    "with_limb",
]
