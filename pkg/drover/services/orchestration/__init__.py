"""Command workflows and evaluation sweeps."""

from .sweep import (
    RATE_FIELDS,
    RUN_FIELDS,
    SEEDING_FIELDS,
    EvaluationSweep,
    TrialTask,
    run_trial,
    seeding_comparison,
    success_rates,
    trial_key,
    trial_seed,
)
from .workflows import (
    CommandOutcome,
    PipelineWorkflows,
    export_plan_csv,
    manifest_path,
    plan_summary,
    read_sidecar_poses,
    report_path,
    sidecar_path,
)

__all__ = [
    "CommandOutcome",
    "EvaluationSweep",
    "PipelineWorkflows",
    "RATE_FIELDS",
    "RUN_FIELDS",
    "SEEDING_FIELDS",
    "TrialTask",
    "export_plan_csv",
    "manifest_path",
    "plan_summary",
    "read_sidecar_poses",
    "report_path",
    "run_trial",
    "seeding_comparison",
    "sidecar_path",
    "success_rates",
    "trial_key",
    "trial_seed",
]
