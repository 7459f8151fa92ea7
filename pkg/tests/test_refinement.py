from unittest.mock import patch

import numpy as np
import pytest

from drover.errors import BoundaryProximityError, EmptyPathError, RefinementError
from drover.models.config import SolverConfig, TraversabilityParams
from drover.services.planning import FeasibilityChecker, PlanPhase, WholeBodyPath
from drover.services.reeds_shepp import SE2Pose
from drover.services.refinement import (
    BASE_VARIABLES,
    COLLISION,
    CONTACT_HEIGHT,
    FAMILIES,
    JOINT_LIMITS,
    ROLLING,
    TRAVERSABILITY,
    Evaluation,
    PenaltySolver,
    check_gradients,
    endpoint_error,
    evaluate,
    knot_count,
    project_joints,
    seed_linear,
    to_path,
    transcribe,
)
from drover.services.sampler import PoseLifter


@pytest.fixture(scope="module")
def flat_problem(flat_plan, flat_map, model):
    return transcribe(flat_plan, flat_map, model, dt=0.5)


@pytest.fixture(scope="module")
def rough_problem(flat_plan, rough_map, model):
    return transcribe(flat_plan, rough_map, model, dt=0.5)


@pytest.fixture(scope="module")
def step_path(step_terrain, model, roadmaps):
    """Standing states on the lower and upper level of a step, one phase apart."""
    grid, _ = step_terrain
    lifter = PoseLifter(grid, model, roadmaps)
    checker = FeasibilityChecker(grid, model, roadmaps)
    states = [checker.check(lifter.lift_pose((x, 6.0), 0.0).base_pose) for x in (6.0, 18.0)]
    assert None not in states
    assert states[0].contacts == states[1].contacts
    phase = PlanPhase(12.0, states[0].contacts, states, [0.0, 12.0])
    return WholeBodyPath(start=SE2Pose(6.0, 6.0, 0.0), goal=SE2Pose(18.0, 6.0, 0.0), phases=[phase])


@pytest.mark.parametrize(
    "duration, dt, expected",
    [(4.0, 0.5, 9), (4.1, 0.5, 10), (0.0, 0.5, 2), (1.0, 2.0, 2)],
)
def test_knot_count(duration, dt, expected):
    assert knot_count(duration, dt) == expected


class TestTranscription:
    def test_knots_cover_the_path(self, flat_problem, flat_plan):
        assert flat_problem.knots == knot_count(flat_plan.duration, 0.5)
        assert flat_problem.times[0] == pytest.approx(flat_plan.times()[0])
        assert flat_problem.times[-1] == pytest.approx(flat_plan.times()[-1])
        assert flat_problem.x0.shape[1] == flat_problem.variables_per_knot

    def test_endpoints_are_pinned(self, flat_problem, flat_plan):
        assert not flat_problem.free[0, :BASE_VARIABLES].any()
        assert not flat_problem.free[-1, :BASE_VARIABLES].any()
        assert flat_problem.free[1:-1].all()
        first = flat_plan.states()[0].base_pose.position
        assert np.allclose(flat_problem.x0[0, :3], first)

    def test_invalid_dt(self, flat_plan, flat_map, model):
        with pytest.raises(RefinementError):
            transcribe(flat_plan, flat_map, model, dt=0.0)

    def test_empty_path(self, flat_plan, flat_map, model):
        empty = WholeBodyPath(start=flat_plan.start, goal=flat_plan.goal, phases=[])
        with pytest.raises(EmptyPathError):
            transcribe(empty, flat_map, model, dt=0.5)

    def test_linear_seed_keeps_endpoints(self, flat_problem):
        seeded = seed_linear(flat_problem)
        assert np.array_equal(seeded.x0[0], flat_problem.x0[0])
        assert np.array_equal(seeded.x0[-1], flat_problem.x0[-1])
        middle = seeded.x0[seeded.knots // 2, 0]
        assert flat_problem.x0[0, 0] <= middle <= flat_problem.x0[-1, 0]

    def test_to_path_keeps_the_contact_schedule(self, flat_problem):
        path = to_path(flat_problem, flat_problem.x0)
        assert len(path.states()) == flat_problem.knots
        assert path.max_contact_change() <= 1
        assert path.times() == pytest.approx(flat_problem.times.tolist())

    def test_contacts_keep_the_planner_sdf_margin(self, flat_problem, flat_plan, flat_map, model):
        assert flat_problem.sdf_margin == TraversabilityParams().sdf_margin
        assert "sdf_delta" not in SolverConfig.model_fields
        wider = transcribe(flat_plan, flat_map, model, dt=0.5,
                           traversability=TraversabilityParams(sdf_margin=0.45))
        assert wider.sdf_margin == 0.45

    def test_wider_sdf_margin_raises_traversability_residuals(self, step_path, step_terrain, model):
        grid, _ = step_terrain
        default = transcribe(step_path, grid, model, dt=0.5)
        wide = transcribe(step_path, grid, model, dt=0.5,
                          traversability=TraversabilityParams(sdf_margin=50.0))
        near = evaluate(default, default.x0, gradient=False).family_max()[TRAVERSABILITY]
        far = evaluate(wide, wide.x0, gradient=False).family_max()[TRAVERSABILITY]
        assert far > near


class TestConstraints:
    def test_every_family_is_reported(self, flat_problem):
        evaluation = evaluate(flat_problem, flat_problem.x0)
        assert set(evaluation.violations) == set(FAMILIES)
        assert np.isfinite(evaluation.penalty)
        assert evaluation.gradient.shape == flat_problem.x0.shape

    def test_flat_terrain_has_no_slope(self, flat_problem):
        evaluation = evaluate(flat_problem, flat_problem.x0)
        assert np.allclose(evaluation.terrain_gradients[CONTACT_HEIGHT], 0.0)
        assert np.allclose(evaluation.terrain_gradients[TRAVERSABILITY], 0.0)
        # Unbounded SDF keeps every contact inside the traversable set
        assert evaluation.family_max()[TRAVERSABILITY] == 0.0

    def test_gradient_matches_finite_differences(self, flat_problem):
        x = flat_problem.x0.copy()
        rng = np.random.default_rng(1)
        x[1:-1, :3] += rng.normal(scale=0.02, size=(flat_problem.knots - 2, 3))
        assert check_gradients(flat_problem, x, samples=40) < 1e-2

    def test_gradient_check_refuses_the_map_edge(self, flat_problem):
        x = flat_problem.x0.copy()
        x[:, 0] -= x[0, 0]
        with pytest.raises(BoundaryProximityError):
            check_gradients(flat_problem, x)

    def test_gradient_error_shrinks_with_the_difference_step(self, flat_problem):
        x = flat_problem.x0.copy()
        rng = np.random.default_rng(2)
        x[1:-1, :3] += rng.normal(scale=0.05, size=(flat_problem.knots - 2, 3))
        x[1:-1, 3:5] += rng.normal(scale=0.02, size=(flat_problem.knots - 2, 2))
        errors = [check_gradients(flat_problem, x, step=step, samples=40, zero_tol=1e-3)
                  for step in (1e-2, 1e-4, 1e-6)]
        assert errors[1] < errors[0]
        assert errors[2] < errors[0]
        assert errors[2] <= max(errors[1], 1e-6)
        assert errors[2] < 1e-4

    def test_gradient_check_reports_relative_error_of_small_gradients(self, flat_problem):
        x = flat_problem.x0.copy()
        scale = 1e-3

        def linear_penalty(problem, point, weight=1.0, gradient=True, clip=None, strict=False):
            # Exact slope is ``scale``; the assembled gradient is 10 % high
            penalty = scale * float(np.sum(point - x))
            return Evaluation({}, {}, penalty, np.full(point.shape, 1.1 * scale) if gradient else None)

        with patch("drover.services.refinement.constraints.evaluate", side_effect=linear_penalty):
            error = check_gradients(flat_problem, x, samples=10)
        assert error == pytest.approx(0.1 / 1.1, rel=1e-3)

    def test_gradient_check_skips_vanishing_gradients(self, flat_problem):
        x = flat_problem.x0.copy()

        def tiny_penalty(problem, point, weight=1.0, gradient=True, clip=None, strict=False):
            penalty = 1e-9 * float(np.sum(point - x))
            return Evaluation({}, {}, penalty, np.full(point.shape, 2e-9) if gradient else None)

        with patch("drover.services.refinement.constraints.evaluate", side_effect=tiny_penalty):
            assert check_gradients(flat_problem, x, samples=10) == 0.0

    def test_leaving_the_map_is_infeasible(self, flat_problem):
        x = flat_problem.x0.copy()
        x[:, 1] += 100.0
        assert evaluate(flat_problem, x).penalty == np.inf

    def test_joint_projection(self, flat_problem, model):
        x = flat_problem.x0.copy()
        x[:, BASE_VARIABLES:] = 100.0
        projected = project_joints(flat_problem, x)
        assert np.allclose(projected[:, BASE_VARIABLES:], model.upper_limits())


class TestSolver:
    def test_solve_reports_and_keeps_endpoints(self, flat_problem):
        solver = PenaltySolver(SolverConfig(max_outer_iterations=2, max_inner_iterations=20),
                               deterministic=True)
        refined, report = solver.solve(flat_problem, seed_mode="init")
        assert report.knots == flat_problem.knots
        assert report.outer_iterations <= 2
        assert report.wall_time is None
        assert set(report.final_violation) == set(FAMILIES)
        assert max(endpoint_error(flat_problem, refined.x)) == pytest.approx(0.0, abs=1e-12)
        assert len(refined.path.states()) == flat_problem.knots

    def test_solver_is_deterministic(self, flat_problem):
        config = SolverConfig(max_outer_iterations=2, max_inner_iterations=10)
        first, _ = PenaltySolver(config, deterministic=True).solve(flat_problem)
        second, _ = PenaltySolver(config, deterministic=True).solve(flat_problem)
        assert np.array_equal(first.x, second.x)

    def test_zero_length_problem_succeeds_without_iterations(self, flat_plan, flat_map, model):
        state = flat_plan.states()[0]
        phase = PlanPhase(0.0, state.contacts, [state], [0.0])
        path = WholeBodyPath(start=flat_plan.start, goal=flat_plan.start, phases=[phase])
        problem = transcribe(path, flat_map, model, dt=0.5)
        assert problem.knots == 2
        seed = evaluate(problem, project_joints(problem, problem.x0), gradient=False).family_max()
        defaults = SolverConfig()
        # The planner grounds wheels within its own contact band
        config = SolverConfig(
            contact_height_tol=max(defaults.contact_height_tol, seed[CONTACT_HEIGHT]),
            rolling_tol=max(defaults.rolling_tol, seed[ROLLING]),
            traversability_tol=seed[TRAVERSABILITY],
            collision_tol=seed[COLLISION],
            joint_limit_tol=max(defaults.joint_limit_tol, seed[JOINT_LIMITS]),
        )
        refined, report = PenaltySolver(config, deterministic=True).solve(problem)
        assert report.success
        assert report.outer_iterations == 0
        assert report.history == []
        assert np.array_equal(refined.x, project_joints(problem, problem.x0))

    def test_linear_seed_fails_on_step_terrain(self, step_path, step_terrain, model):
        grid, _ = step_terrain
        problem = seed_linear(transcribe(step_path, grid, model, dt=0.5))
        config = SolverConfig(max_outer_iterations=1, max_inner_iterations=5)
        _, report = PenaltySolver(config, deterministic=True).solve(problem, seed_mode="linear")
        # Straight interpolation floats the wheels above the lower level
        assert report.initial_violation[CONTACT_HEIGHT] > 0.1
        assert not report.success
        assert report.seed_mode == "linear"
        assert report.final_violation[CONTACT_HEIGHT] > config.contact_height_tol

    def test_accepted_outer_iterations_never_increase_the_violation(self, rough_problem):
        config = SolverConfig(max_outer_iterations=3, max_inner_iterations=30)
        _, report = PenaltySolver(config, deterministic=True).solve(rough_problem)
        assert report.history
        best = max(report.initial_violation.values())
        for record in report.history:
            if record.accepted:
                assert record.max_violation <= best
                best = record.max_violation
        assert max(report.final_violation.values()) <= max(report.initial_violation.values())

    def test_gradient_clipping_keeps_the_result(self, rough_problem):
        gradient = evaluate(rough_problem, rough_problem.x0, clip=None).gradient
        norms = np.linalg.norm(gradient, axis=1)
        typical = float(np.median(norms[norms > 0]))
        results = []
        for threshold in (float("inf"), 10.0 * typical):
            config = SolverConfig(max_outer_iterations=2, max_inner_iterations=30, clip_threshold=threshold)
            _, report = PenaltySolver(config, deterministic=True).solve(rough_problem)
            results.append(max(report.final_violation.values()))
        unclipped, clipped = results
        assert clipped == pytest.approx(unclipped, rel=0.1, abs=1e-3)
