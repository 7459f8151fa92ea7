import numpy as np
import pytest

from drover.errors import NoTraversableCellError, OutOfBoundsError
from drover.services.gridmap import TRAVERSABILITY, GridMap
from drover.services.sampler import CandidateSource, PoseLifter, level_pose, nearest_traversable
from drover.services.terrain import slope_to_normal


@pytest.fixture(scope="module")
def flat_lifter(flat_map, model, roadmaps):
    return PoseLifter(flat_map, model, roadmaps)


def test_level_pose_keeps_heading_and_follows_normal():
    pose = level_pose((1.0, 2.0, 3.0), (0.2, -0.1), 0.8)
    assert pose.euler()[2] == pytest.approx(0.8)
    z_axis = pose.rotation[:, 2]
    assert np.allclose(z_axis, slope_to_normal(np.array([0.2, -0.1])))


def test_level_pose_on_flat_ground():
    pose = level_pose((0.0, 0.0, 1.0), (0.0, 0.0), -2.0)
    roll, pitch, yaw = pose.euler()
    assert (roll, pitch) == pytest.approx((0.0, 0.0))
    assert yaw == pytest.approx(-2.0)


class TestNearestTraversable:
    def test_own_cell_wins(self, flat_map):
        center = nearest_traversable(flat_map, (5.02, 3.01))
        assert center == pytest.approx((5.0, 3.0))

    def test_skips_untraversable_cells(self, gap_terrain):
        grid, labels = gap_terrain
        x_mid = 0.5 * (labels.geometry["x_min"] + labels.geometry["x_max"])
        center = nearest_traversable(grid, (x_mid, labels.start[1]))
        cell = grid.index_of(center)
        assert grid.layer(TRAVERSABILITY)[cell.row, cell.col] == 1.0
        assert abs(center[0] - x_mid) >= 0.5 * (labels.geometry["x_max"] - labels.geometry["x_min"])

    def test_blocked_map(self):
        grid = GridMap(0.1, (0.0, 0.0), 5, 5, {TRAVERSABILITY: np.zeros((5, 5))})
        with pytest.raises(NoTraversableCellError):
            nearest_traversable(grid, (0.2, 0.2))


class TestPoseLifter:
    def test_chooses_the_cheapest_candidate(self, flat_lifter):
        candidates = flat_lifter.candidates((8.0, 6.0), 0.3)
        assert candidates
        lifted = flat_lifter.lift_pose((8.0, 6.0), 0.3)
        assert lifted.chosen.cost == min(c.cost for c, _ in candidates)
        # First minimum in enumeration order
        first = next(c for c, _ in candidates if c.cost == lifted.chosen.cost)
        assert lifted.chosen == first

    def test_flat_pose_stands_at_nominal_height(self, flat_lifter, model, flat_map):
        lifted = flat_lifter.lift_pose((8.0, 6.0), 0.0)
        ground = flat_map.value_at("elevation", (8.0, 6.0))
        assert lifted.base_pose.position[2] == pytest.approx(ground + model.h_desired)
        assert lifted.chosen.height_source == CandidateSource.RAW
        assert flat_lifter.grounded_legs(lifted.base_pose) == [True] * len(model.wheeled)
        assert lifted.chosen.cost == pytest.approx(0.0)

    def test_gap_center_uses_another_height_source(self, gap_terrain, model, roadmaps):
        grid, labels = gap_terrain
        x_mid = 0.5 * (labels.geometry["x_min"] + labels.geometry["x_max"])
        lifted = PoseLifter(grid, model, roadmaps).lift_pose((x_mid, labels.start[1]), 0.0)
        assert lifted.chosen.height_source != CandidateSource.RAW
        assert np.isfinite(lifted.chosen.height)

    def test_outside_the_map(self, flat_lifter):
        with pytest.raises(OutOfBoundsError):
            flat_lifter.lift_pose((-3.0, 1.0), 0.0)
