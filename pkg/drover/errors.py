"""Exception hierarchy for drover.

Every error raised on purpose by the package derives from ``DroverError`` and
from the builtin exception that best describes it, so callers can catch
either one.
"""


class DroverError(Exception):
    """Base class for all drover errors."""


# Map access

class UnknownLayerError(DroverError, KeyError):
    """Requested layer does not exist in the grid map."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown layer"


class OutOfBoundsError(DroverError, IndexError):
    """Index or query position lies outside the valid footprint."""


class MissingValueError(DroverError, ValueError):
    """An interpolation stencil touched a missing cell."""


class NoTraversableCellError(DroverError, ValueError):
    """The traversability layer holds no traversable cell."""


# Files

class DroverIOError(DroverError, OSError):
    """Base class for file format problems."""


class CorruptedFileError(DroverIOError):
    """File is truncated or its checksum does not match."""


class VersionMismatchError(DroverIOError):
    """File was written by an unsupported format version."""


class ConfigHashMismatchError(DroverIOError):
    """Roadmap was built for a different robot configuration."""


# Terrain

class InsufficientSupportError(DroverError, ValueError):
    """Fewer than three valid cells inside the fitting radius."""


class RankDeficientError(DroverError, ValueError):
    """Plane-fit neighbourhood is collinear."""


# Kinematics

class JointLimitError(DroverError, ValueError):
    """Joint vector outside the limb's joint limits."""


class IKConvergenceError(DroverError, RuntimeError):
    """Inverse kinematics did not converge within the iteration cap."""


# Graphs and planning

class RoadmapBuildError(DroverError, RuntimeError):
    """No valid vertex could be sampled for a limb."""


class NoPathError(DroverError, RuntimeError):
    """No path exists between the requested roadmap vertices."""


class PlanningError(DroverError, RuntimeError):
    """Base class for planner failures (CLI exit code 1)."""


class InfeasibleStartError(PlanningError):
    """The start pose fails the whole-body feasibility check."""


class InfeasibleGoalError(PlanningError):
    """The goal pose fails the whole-body feasibility check."""


class NoSolutionError(PlanningError):
    """The planner exhausted its budget without reaching the goal."""


class ScheduleRepairError(PlanningError):
    """A multi-contact switch could not be split into single-contact steps."""


class ArmDetourError(PlanningError):
    """No arm roadmap detour exists, even from a full-contact state."""


# Refinement

class RefinementError(DroverError, ValueError):
    """Base class for refinement input problems."""


class EmptyPathError(RefinementError):
    """The path to transcribe holds no states."""


class BoundaryProximityError(RefinementError):
    """A terrain query lies too close to the map boundary."""
