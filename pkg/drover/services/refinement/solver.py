"""Quadratic-penalty solver for refinement problems."""

import time
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import structlog

from ...models.config import SolverConfig
from ...models.plan import OuterIterationRecord, RefinementReport
from ..planning import WholeBodyPath
from .constraints import (
    COLLISION,
    CONTACT_HEIGHT,
    JOINT_LIMITS,
    ROLLING,
    TRAVERSABILITY,
    Evaluation,
    evaluate,
)
from .problem import RefinementProblem, project_joints, to_path

logger = structlog.get_logger(__name__)


@dataclass
class RefinedTrajectory:
    x: np.ndarray
    path: WholeBodyPath


def tolerances(config: SolverConfig) -> Dict[str, float]:
    return {
        CONTACT_HEIGHT: config.contact_height_tol,
        TRAVERSABILITY: config.traversability_tol,
        ROLLING: config.rolling_tol,
        COLLISION: config.collision_tol,
        JOINT_LIMITS: config.joint_limit_tol,
    }


class PenaltySolver:
    """Outer loop of growing penalty weights around projected gradient descent.

    Each outer iteration minimizes ``weight * penalty + proximal/2 * |x - x_k|^2``
    from the last accepted iterate ``x_k``. An outer result is accepted only
    if it does not increase the largest constraint violation.
    """

    def __init__(self, config: Optional[SolverConfig] = None, deterministic: bool = False):
        self.config = config or SolverConfig()
        self.deterministic = deterministic
        self.tolerances = tolerances(self.config)

    def satisfied(self, family_max: Dict[str, float]) -> bool:
        return all(family_max.get(name, 0.0) <= tol for name, tol in self.tolerances.items())

    def violated_counts(self, evaluation: Evaluation) -> Dict[str, int]:
        return {
            name: int(np.sum(evaluation.violations[name] > tol))
            for name, tol in self.tolerances.items()
        }

    def _objective(self, problem: RefinementProblem, x: np.ndarray, anchor: np.ndarray, weight: float,
                   gradient: bool) -> Tuple[float, Evaluation]:
        evaluation = evaluate(problem, x, weight, gradient=gradient, clip=self.config.clip_threshold)
        offset = (x - anchor)[problem.free]
        value = evaluation.penalty + 0.5 * self.config.proximal_weight * float(offset @ offset)
        return value, evaluation

    def descend(
        self, problem: RefinementProblem, x: np.ndarray, weight: float, step: float
    ) -> Tuple[np.ndarray, int, float]:
        """Projected gradient descent with Armijo backtracking from ``x``."""
        cfg = self.config
        anchor = x.copy()
        iterations = 0
        for iterations in range(1, cfg.max_inner_iterations + 1):
            value, evaluation = self._objective(problem, x, anchor, weight, gradient=True)
            if self.satisfied(evaluation.family_max()):
                return x, iterations - 1, step
            grad = evaluation.gradient + cfg.proximal_weight * (x - anchor)
            grad[~problem.free] = 0.0
            if float(np.sum(grad * grad)) <= 1e-24:
                break

            alpha = min(2.0 * step, cfg.initial_step * 1e6)
            accepted = False
            while alpha >= cfg.min_step:
                trial = project_joints(problem, x - alpha * grad)
                trial_value, _ = self._objective(problem, trial, anchor, weight, gradient=False)
                if trial_value <= value + cfg.armijo_c * float(np.sum(grad * (trial - x))):
                    accepted = True
                    break
                alpha *= cfg.backtrack
            if not accepted:
                break
            x, step = trial, alpha
        return x, iterations, step

    def solve(self, problem: RefinementProblem, seed_mode: str = "init") -> Tuple[RefinedTrajectory, RefinementReport]:
        """Refine ``problem.x0``; failure is reported, never raised."""
        started = time.perf_counter()
        cfg = self.config
        x = project_joints(problem, problem.x0)
        initial = evaluate(problem, x, gradient=False)
        initial_max = initial.family_max()
        history = []
        outer = inner_total = 0
        feasible_seed = bool(np.isfinite(initial.penalty))
        if not feasible_seed:
            logger.warning("Refinement seed leaves the map footprint", knots=problem.knots)
        success = feasible_seed and self.satisfied(initial_max)
        best_x, best_violation = x, initial.max_violation()
        final = initial

        weight, step = cfg.initial_weight, cfg.initial_step
        while feasible_seed and not success and outer < cfg.max_outer_iterations:
            outer += 1
            candidate, inner, step = self.descend(problem, best_x, weight, step)
            inner_total += inner
            evaluation = evaluate(problem, candidate, gradient=False)
            violation = evaluation.max_violation() if np.isfinite(evaluation.penalty) else np.inf
            accepted = violation <= best_violation
            if accepted:
                best_x, best_violation, final = candidate, violation, evaluation
            history.append(OuterIterationRecord(
                iteration=outer,
                weight=weight,
                accepted=accepted,
                inner_iterations=inner,
                max_violation=float(violation),
                violations=evaluation.family_max(),
                violated_counts=self.violated_counts(evaluation) if np.isfinite(violation) else {},
            ))
            logger.debug("Outer iteration", iteration=outer, weight=weight, accepted=accepted,
                         max_violation=float(violation), inner=inner)
            success = accepted and self.satisfied(final.family_max())
            weight *= cfg.growth_factor

        report = RefinementReport(
            success=success,
            seed_mode=seed_mode,
            knots=problem.knots,
            outer_iterations=outer,
            inner_iterations=inner_total,
            wall_time=None if self.deterministic else time.perf_counter() - started,
            initial_violation=initial_max,
            final_violation=final.family_max(),
            history=history,
        )
        logger.info(
            "Refinement finished",
            success=success,
            seed_mode=seed_mode,
            knots=problem.knots,
            outer=outer,
            inner=inner_total,
            max_violation=round(best_violation, 6),
        )
        return RefinedTrajectory(best_x, to_path(problem, best_x)), report


def solve(
    problem: RefinementProblem,
    config: Optional[SolverConfig] = None,
    seed_mode: str = "init",
    deterministic: bool = False,
) -> Tuple[RefinedTrajectory, RefinementReport]:
    return PenaltySolver(config, deterministic).solve(problem, seed_mode)
