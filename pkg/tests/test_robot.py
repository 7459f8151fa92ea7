import math
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError

from drover.errors import IKConvergenceError, JointLimitError
from drover.models.robot import RobotSpec
from drover.services.robot import (
    CollisionModel,
    Pose3,
    RobotModel,
    WholeBodyState,
    min_pair_distance,
    primitive_distance,
    segment_distance,
    support_margin,
    support_polygon_contains,
)

LEG_DROP = 1.1 * math.cos(1.0)


def default_state(model, pose=None):
    return WholeBodyState(pose or Pose3(np.array([0.0, 0.0, 1.2])), model.default_q(),
                          tuple(False for _ in model.limbs))


class TestPose:
    def test_euler_round_trip(self):
        pose = Pose3.from_euler([1.0, 2.0, 3.0], 0.1, -0.2, 2.5)
        assert pose.euler() == pytest.approx((0.1, -0.2, 2.5))

    def test_transform_inverse(self):
        pose = Pose3.from_euler([1.0, -2.0, 0.5], 0.05, 0.1, -1.0)
        points = np.array([[0.3, 0.2, -0.1], [1.0, 0.0, 0.0]])
        assert np.allclose(pose.inverse_transform(pose.transform(points)), points)

    def test_yaw_rotates_about_gravity(self):
        pose = Pose3.from_euler([0.0, 0.0, 0.0], 0.0, 0.0, math.pi / 2)
        assert np.allclose(pose.transform([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0])


class TestKinematics:
    def test_model_layout(self, model):
        assert model.limb_names == ["LF", "RF", "LH", "RH", "arm"]
        assert model.wheeled == [0, 1, 2, 3]
        assert model.arms == [4]
        assert model.dof == 16
        assert len(model.config_hash) == 64

    def test_default_leg_sits_below_its_mount(self, model):
        base = Pose3(np.array([5.0, 3.0, 1.2]))
        leg = model.limb("LF")
        center = model.fk_limb("LF", leg.default_config, base)
        assert np.allclose(center, base.transform(leg.mount) - [0.0, 0.0, LEG_DROP])
        contact = model.contact_point("LF", leg.default_config, base)
        assert contact[2] == pytest.approx(center[2] - model.wheel_radius)

    def test_fk_rejects_limit_violations(self, model):
        with pytest.raises(JointLimitError):
            model.fk_limb("LF", np.array([0.0, -1.0, 3.0]), Pose3(np.zeros(3)))

    def test_jacobian_matches_finite_differences(self, model):
        limb = model.limb("arm")
        q = limb.default_config
        jac = limb.ee_jacobian(q)[0]
        step = 1e-6
        for j in range(limb.dof):
            dq = np.zeros(limb.dof)
            dq[j] = step
            numeric = (limb.ee_positions(q + dq)[0] - limb.ee_positions(q - dq)[0]) / (2 * step)
            assert np.allclose(jac[:, j], numeric, atol=1e-6)

    def test_ik_reaches_a_feasible_target(self, model):
        limb = model.limb("LF")
        q_target = np.array([0.3, -0.6, 1.4])
        target = limb.ee_positions(q_target)[0]
        q = model.ik_limb("LF", target, limb.default_config)
        assert np.linalg.norm(limb.ee_positions(q)[0] - target) <= 1e-4
        assert limb.within_limits(q).all()

    def test_ik_rejects_unreachable_target(self, model):
        limb = model.limb("LF")
        with pytest.raises(IKConvergenceError):
            model.ik_limb("LF", limb.mount + np.array([0.0, 0.0, -5.0]), limb.default_config)

    def test_whole_body_com_is_frame_consistent(self, model):
        state = default_state(model)
        moved = default_state(model, Pose3.from_euler([4.0, 1.0, 1.2], 0.0, 0.0, 0.7))
        com = model.whole_body_com(state)
        assert np.allclose(model.whole_body_com(moved), moved.base_pose.transform(state.base_pose.inverse_transform(com)))

        limb_coms = [limb.com_positions(q_i)[0] for limb, q_i in zip(model.limbs, model.split(state.q))]
        assert np.allclose(model.com_from_limb_coms(state.base_pose, limb_coms), com)

    def test_validate_state(self, model):
        model.validate_state(default_state(model))
        bad = default_state(model)
        bad.contacts = (True, False, False, False, False)
        with pytest.raises(ValueError):
            model.validate_state(bad)

    def test_in_contact(self, model, flat_map):
        assert model.in_contact(flat_map, np.array([5.0, 5.0, 0.03]))
        assert not model.in_contact(flat_map, np.array([5.0, 5.0, 0.2]))


class TestStability:
    square = [[1.0, 1.0, 0.0], [-1.0, 1.0, 0.0], [-1.0, -1.0, 0.0], [1.0, -1.0, 0.0]]

    def test_margin_inside_and_outside(self):
        assert support_margin(self.square, [0.0, 0.0, 5.0]) == pytest.approx(1.0)
        assert support_margin(self.square, [0.5, 0.0, 0.0]) == pytest.approx(0.5)
        assert support_margin(self.square, [2.0, 0.0, 0.0]) == pytest.approx(-1.0)
        assert support_polygon_contains(self.square, [0.9, 0.0, 0.0], margin=0.05)
        assert not support_polygon_contains(self.square, [0.99, 0.0, 0.0], margin=0.05)

    def test_degenerate_supports(self):
        with pytest.raises(ValueError):
            support_margin(self.square[:2], [0.0, 0.0, 0.0])
        line = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]
        assert support_margin(line, [1.0, 0.0, 0.0]) == -np.inf

    def test_default_stance_is_stable(self, model):
        state = default_state(model)
        joints = model.split(state.q)
        contacts = [model.contact_point(i, joints[i], state.base_pose) for i in model.wheeled]
        assert support_margin(contacts, model.whole_body_com(state)) > model.stability_margin


class TestCollision:
    def test_segment_distance_cases(self):
        # Parallel, offset by 1
        assert segment_distance(np.zeros(3), np.array([1.0, 0, 0]),
                                np.array([0, 1.0, 0]), np.array([1.0, 1.0, 0])) == pytest.approx(1.0)
        # Crossing at right angles, offset in z
        assert segment_distance(np.array([-1.0, 0, 0]), np.array([1.0, 0, 0]),
                                np.array([0, -1.0, 0.5]), np.array([0, 1.0, 0.5])) == pytest.approx(0.5)
        # Degenerate point against a segment end
        assert segment_distance(np.array([3.0, 0, 0]), np.array([3.0, 0, 0]),
                                np.zeros(3), np.array([1.0, 0, 0])) == pytest.approx(2.0)

    def test_segment_distance_is_batched(self):
        p1 = np.zeros((4, 3))
        q1 = np.tile([1.0, 0.0, 0.0], (4, 1))
        p2 = np.column_stack([np.zeros(4), np.arange(4.0), np.zeros(4)])
        q2 = p2 + [1.0, 0.0, 0.0]
        assert np.allclose(segment_distance(p1, q1, p2, q2), np.arange(4.0))

    def test_primitive_distance_is_signed(self):
        a = (np.zeros(3), np.array([1.0, 0, 0]))
        b = (np.array([0, 0.5, 0]), np.array([1.0, 0.5, 0]))
        assert primitive_distance(a, 0.1, b, 0.1) == pytest.approx(0.3)
        assert primitive_distance(a, 0.3, b, 0.3) == pytest.approx(-0.1)

    def test_adjacent_pairs_are_skipped(self, model):
        collision = CollisionModel(model)
        for i, j in collision.pairs:
            first, second = collision.entries[i], collision.entries[j]
            assert first.owner != second.owner
            assert not CollisionModel.adjacent(first, second)

    def test_default_configuration_is_collision_free(self, model):
        distance, pair = CollisionModel(model).min_pair_distance(default_state(model))
        assert distance > 0
        assert pair is not None

    def test_limb_vs_base_is_batched(self, model):
        collision = CollisionModel(model)
        leg = model.limb("LF")
        batch = leg.sample(np.random.default_rng(0), 16)
        clear = collision.limb_vs_base(0, np.vstack([leg.default_config, batch]))
        assert clear.shape == (17,)
        assert clear[0] > 0

    def test_collision_model_is_built_once_per_robot(self, model):
        fresh = RobotModel(model.spec)
        state = default_state(fresh)
        with patch("drover.services.robot.collision.CollisionModel", wraps=CollisionModel) as built:
            results = [min_pair_distance(fresh, state) for _ in range(3)]
        assert built.call_count == 1
        assert fresh.collision is fresh.collision
        assert results[0] == CollisionModel(fresh).min_pair_distance(state)


def test_robot_spec_rejects_bad_default_config(model):
    data = model.spec.model_dump()
    data["limbs"][0]["default_config"] = [0.0, -1.0, 3.0]
    with pytest.raises(ValidationError):
        RobotSpec(**data)


def test_config_hash_tracks_the_description(model):
    changed = RobotModel(model.spec.model_copy(update={"wheel_radius": 0.55}))
    assert changed.config_hash != model.config_hash
