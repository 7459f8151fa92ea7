"""Services module for drover.

This module contains the service classes and pipeline stages: map handling,
terrain pre-processing, the robot model, roadmaps, planning, refinement and
the command workflows that tie them together.
"""

from .configuration import ConfigurationService
from .orchestration import EvaluationSweep, PipelineWorkflows
from .progress_service import ProgressService

__all__ = [
    "ConfigurationService",
    "EvaluationSweep",
    "PipelineWorkflows",
    "ProgressService",
]
