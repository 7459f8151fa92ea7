import math

import numpy as np
import pytest

from drover.services.reeds_shepp import (
    WORDS,
    Direction,
    SE2Pose,
    all_paths,
    discretize,
    interpolate,
    shortest_path,
    truncate,
    wrap_angle,
)

RADIUS = 4.0


def random_pairs(count=60, seed=1):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        start = SE2Pose(*rng.uniform(-10, 10, 2), rng.uniform(-math.pi, math.pi))
        goal = SE2Pose(*rng.uniform(-10, 10, 2), rng.uniform(-math.pi, math.pi))
        yield start, goal


def assert_same_pose(a: SE2Pose, b: SE2Pose, tol=1e-6):
    assert a.x == pytest.approx(b.x, abs=tol)
    assert a.y == pytest.approx(b.y, abs=tol)
    assert abs(wrap_angle(a.yaw - b.yaw)) <= tol


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert SE2Pose(0.0, 0.0, 7.0).yaw == pytest.approx(7.0 - 2 * math.pi)


def test_straight_line():
    path = shortest_path(SE2Pose(0, 0, 0), SE2Pose(5, 0, 0), RADIUS)
    assert path.total_length == pytest.approx(5.0)
    assert path.word_letters == "S"
    assert path.segments[0].direction == Direction.FORWARD


def test_pure_reverse():
    path = shortest_path(SE2Pose(0, 0, 0), SE2Pose(-3, 0, 0), RADIUS)
    assert path.total_length == pytest.approx(3.0)
    assert all(segment.direction == Direction.REVERSE for segment in path.segments)


@pytest.mark.parametrize("start, goal", list(random_pairs()))
def test_shortest_path_reaches_the_goal(start, goal):
    path = shortest_path(start, goal, RADIUS)
    assert_same_pose(interpolate(path, start, path.total_length), goal)
    assert path.total_length >= start.distance_to(goal) - 1e-9
    assert len(path.segments) <= 5


@pytest.mark.parametrize("start, goal", list(random_pairs(count=15, seed=2)))
def test_every_candidate_reaches_the_goal(start, goal):
    paths = all_paths(start, goal, RADIUS)
    assert paths
    shortest = shortest_path(start, goal, RADIUS)
    assert shortest.total_length <= min(p.total_length for p in paths) + 1e-9
    for path in paths:
        assert 0 <= path.word < len(WORDS)
        assert_same_pose(interpolate(path, start, path.total_length), goal, tol=1e-5)


def test_same_pose_gives_empty_path():
    pose = SE2Pose(1.0, 2.0, 0.3)
    path = shortest_path(pose, pose, RADIUS)
    assert path.total_length == pytest.approx(0.0, abs=1e-9)
    assert discretize(path, pose, 0.2) == [pose]


def test_discretize_spacing_and_endpoints():
    start, goal = SE2Pose(0, 0, 0), SE2Pose(6, 3, math.pi / 2)
    path = shortest_path(start, goal, RADIUS)
    poses = discretize(path, start, 0.2)
    assert poses[0] == start
    assert_same_pose(poses[-1], goal)
    steps = [a.distance_to(b) for a, b in zip(poses, poses[1:])]
    assert max(steps) <= 0.2 + 1e-9
    assert len(poses) == math.ceil(path.total_length / 0.2 - 1e-9) + 1


def test_interpolate_rejects_out_of_range():
    start = SE2Pose(0, 0, 0)
    path = shortest_path(start, SE2Pose(5, 0, 0), RADIUS)
    with pytest.raises(ValueError):
        interpolate(path, start, 6.0)


def test_truncate_is_a_prefix():
    start, goal = SE2Pose(0, 0, 0), SE2Pose(8, 6, -1.0)
    path = shortest_path(start, goal, RADIUS)
    prefix = truncate(path, 0.5 * path.total_length)
    assert prefix.total_length == pytest.approx(0.5 * path.total_length)
    assert_same_pose(interpolate(prefix, start, prefix.total_length),
                     interpolate(path, start, 0.5 * path.total_length))


def test_invalid_radius():
    with pytest.raises(ValueError):
        shortest_path(SE2Pose(0, 0, 0), SE2Pose(1, 0, 0), 0.0)
