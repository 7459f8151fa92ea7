import json
import sys
from unittest.mock import patch

import numpy as np
import pytest

from drover.errors import (
    ArmDetourError,
    ConfigHashMismatchError,
    CorruptedFileError,
    InfeasibleGoalError,
    InfeasibleStartError,
    NoPathError,
    ScheduleRepairError,
    VersionMismatchError,
)
from drover.models.config import PlannerConfig
from drover.services.planning import (
    DETERMINISTIC_ITERATIONS,
    FeasibilityChecker,
    InitPlanner,
    PathFinalizer,
    check_feasibility,
    contact_changes,
    contact_runs,
    load_plan,
    read_plan_file,
    same_pose,
    save_plan,
    with_limb,
)
from drover.services.reeds_shepp import SE2Pose
from drover.services.robot import Pose3, RobotModel
from drover.services.sampler import level_pose

START = SE2Pose(8.0, 6.0, 0.0)
GOAL = SE2Pose(12.0, 6.0, 0.0)


def make_planner(grid, model, roadmaps, **overrides):
    config = PlannerConfig(**{"goal_bias": 1.0, "max_iterations": 5, "seed": 0, **overrides})
    return InitPlanner(grid, model, roadmaps, config, deterministic=True)


def test_contact_changes():
    assert contact_changes((True, True, False), (True, True, False)) == 0
    assert contact_changes((True, False, False), (False, True, False)) == 2


class TestFeasibility:
    def test_flat_standing_pose_grounds_every_leg(self, flat_map, model, roadmaps):
        pose = level_pose((8.0, 6.0, model.h_desired), (0.0, 0.0), 0.0)
        state = check_feasibility(model, flat_map, roadmaps, pose)
        assert state is not None
        assert all(state.contacts[i] for i in model.wheeled)
        for i in model.wheeled:
            assert model.in_contact(flat_map, state.contact_points[i])
        model.validate_state(state)

    def test_tilted_pose_is_rejected(self, flat_map, model, roadmaps):
        pose = Pose3.from_euler([8.0, 6.0, model.h_desired], model.max_roll + 0.1, 0.0, 0.0)
        assert FeasibilityChecker(flat_map, model, roadmaps).check(pose) is None

    def test_floating_pose_is_rejected(self, flat_map, model, roadmaps):
        pose = level_pose((8.0, 6.0, model.h_desired + 3.0), (0.0, 0.0), 0.0)
        assert check_feasibility(model, flat_map, roadmaps, pose) is None


class TestInitPlanner:
    def test_plan_connects_start_and_goal(self, flat_plan):
        states = flat_plan.states()
        assert same_pose(flat_plan.start, START)
        first, last = states[0].base_pose.position, states[-1].base_pose.position
        assert first[:2] == pytest.approx((START.x, START.y), abs=1e-6)
        assert last[:2] == pytest.approx((GOAL.x, GOAL.y), abs=1e-6)
        assert flat_plan.arc_length() >= START.distance_to(GOAL) - 1e-6

    def test_every_state_is_feasible(self, flat_plan, flat_map, model, roadmaps):
        checker = FeasibilityChecker(flat_map, model, roadmaps)
        for state in flat_plan.states():
            model.validate_state(state)
            assert checker.check(state.base_pose) is not None

    def test_contact_schedule_changes_one_limb_at_a_time(self, flat_plan):
        assert flat_plan.max_contact_change() <= 1
        for phase in flat_plan.phases:
            assert all(state.contacts == phase.contacts for state in phase.states)

    def test_timing_is_monotonic(self, flat_plan):
        times = flat_plan.times()
        assert times[0] == pytest.approx(0.0)
        assert all(b >= a for a, b in zip(times, times[1:]))
        assert flat_plan.duration == pytest.approx(sum(p.duration for p in flat_plan.phases))

    def test_metrics(self, flat_plan):
        metrics = flat_plan.metrics
        assert metrics.iterations <= 5
        assert metrics.tree_size >= 2
        assert metrics.final_cost <= metrics.initial_cost
        assert metrics.time_to_first_solution is None

    def test_same_seed_same_plan(self, flat_plan, flat_map, model, roadmaps):
        again = make_planner(flat_map, model, roadmaps).plan(START, GOAL)
        assert len(again.states()) == len(flat_plan.states())
        for a, b in zip(again.states(), flat_plan.states()):
            assert np.array_equal(a.q, b.q)
            assert np.array_equal(a.base_pose.position, b.base_pose.position)

    def test_infeasible_start(self, flat_map, model, roadmaps):
        with pytest.raises(InfeasibleStartError):
            make_planner(flat_map, model, roadmaps).plan(SE2Pose(-5.0, 6.0, 0.0), GOAL)

    def test_infeasible_goal(self, flat_map, model, roadmaps):
        with pytest.raises(InfeasibleGoalError):
            make_planner(flat_map, model, roadmaps).plan(START, SE2Pose(12.0, 40.0, 0.0))

    def test_deterministic_iteration_cap(self, flat_map, model, roadmaps):
        planner = make_planner(flat_map, model, roadmaps, max_iterations=None)
        assert planner._budget_left(DETERMINISTIC_ITERATIONS - 1, 0.0)
        assert not planner._budget_left(DETERMINISTIC_ITERATIONS, 0.0)


def test_contact_runs():
    class Stub:
        def __init__(self, contacts):
            self.contacts = contacts

    states = [Stub((True,)), Stub((True,)), Stub((False,)), Stub((True,))]
    assert contact_runs(states) == [[0, 1], [2], [3]]


class TestPlanFiles:
    def test_round_trip(self, tmp_path, flat_plan, model):
        target = save_plan(flat_plan, model, tmp_path / "flat.plan.json")
        loaded = load_plan(target, model)
        assert len(loaded.phases) == len(flat_plan.phases)
        assert loaded.times() == pytest.approx(flat_plan.times())
        for a, b in zip(loaded.states(), flat_plan.states()):
            assert np.allclose(a.q, b.q)
            assert a.contacts == b.contacts
        assert loaded.metrics.iterations == flat_plan.metrics.iterations

    def test_corrupted_json(self, tmp_path):
        target = tmp_path / "broken.plan.json"
        target.write_text("{not json")
        with pytest.raises(CorruptedFileError):
            read_plan_file(target)

    def test_version_mismatch(self, tmp_path, flat_plan, model):
        target = save_plan(flat_plan, model, tmp_path / "flat.plan.json")
        data = json.loads(target.read_text())
        data["format_version"] = 99
        target.write_text(json.dumps(data))
        with pytest.raises(VersionMismatchError):
            read_plan_file(target)

    def test_other_robot(self, tmp_path, flat_plan, model):
        target = save_plan(flat_plan, model, tmp_path / "flat.plan.json")
        other = RobotModel(model.spec.model_copy(update={"h_desired": 1.0}))
        with pytest.raises(ConfigHashMismatchError):
            read_plan_file(target, other)


@pytest.fixture
def finalizer(flat_map, model, roadmaps):
    return PathFinalizer(flat_map, model, roadmaps, FeasibilityChecker(flat_map, model, roadmaps))


def lift_legs(model, state, legs):
    for leg in legs:
        state = with_limb(model, state, leg, state.q[model.slices[leg]], False, None)
    return state


class TestPathFinalizer:
    def test_single_switch_needs_no_repair(self, finalizer, flat_plan, model):
        standing = flat_plan.states()[0]
        lifted = lift_legs(model, standing, model.wheeled[:1])
        repaired = finalizer.repair_schedule([standing, lifted])
        assert len(repaired) == 2
        assert repaired[1] is lifted

    def test_unrepairable_switch_raises(self, finalizer, flat_plan, model):
        standing = flat_plan.states()[0]
        lifted = lift_legs(model, standing, model.wheeled[:2])
        with patch.object(PathFinalizer, "_chain", return_value=None):
            with pytest.raises(ScheduleRepairError):
                finalizer.repair_schedule([standing, lifted])

    def test_full_contact_grounds_swing_legs(self, finalizer, flat_plan, flat_map, model):
        leg = model.wheeled[0]
        lifted = lift_legs(model, flat_plan.states()[0], [leg])
        full = finalizer.full_contact(lifted, lifted)
        assert full is not None
        assert all(full.contacts[i] for i in model.wheeled)
        assert model.in_contact(flat_map, full.contact_points[leg])

    def test_arm_detour_retries_from_full_contact(self, finalizer, flat_plan, model):
        standing = flat_plan.states()[0]
        leg = model.wheeled[0]
        lifted = lift_legs(model, standing, [leg])
        outcomes = [NoPathError("blocked"), NoPathError("blocked"), [0]]
        with patch.object(sys.modules["drover.services.planning.finalize"], "search_path", side_effect=outcomes) as search:
            detour = finalizer._arm_detour(lifted, standing, 0, 0)
        assert search.call_count == 3
        full, swing = detour
        assert all(full.contacts[i] for i in model.wheeled)
        assert swing.contacts[leg] and not swing.contacts[finalizer.arm]

    def test_arm_detour_failure_is_reported(self, finalizer, flat_plan):
        standing = flat_plan.states()[0]
        with patch.object(sys.modules["drover.services.planning.finalize"], "search_path", side_effect=NoPathError("blocked")):
            with pytest.raises(ArmDetourError):
                finalizer._arm_detour(standing, standing, 0, 0)
