import networkx as nx
import numpy as np
import pytest

from drover.errors import ConfigHashMismatchError, NoPathError
from drover.services.robot import CollisionModel, Pose3, RobotModel, WholeBodyState
from drover.services.roadmap import (
    ROADMAP_SUFFIX,
    RoadmapSet,
    build_roadmap,
    edge_configurations,
    grounded_candidates,
    interpolation_steps,
    invalidate,
    load_roadmap,
    path_length,
    save_roadmap,
    search_path,
)


@pytest.fixture(scope="module")
def leg_roadmap(model):
    return build_roadmap(model, "LF", n_vertices=40, k_neighbors=8, d_max=0.4, seed=3)


def standing_state(model, x=6.0, y=6.0):
    pose = Pose3(np.array([x, y, model.h_desired]))
    return WholeBodyState(pose, model.default_q(), tuple(False for _ in model.limbs))


def test_vertex_zero_is_the_default_configuration(model, leg_roadmap):
    assert np.array_equal(leg_roadmap.q[0], model.limb("LF").default_config)
    assert leg_roadmap.vertex_count == 40
    assert leg_roadmap.config_hash == model.config_hash


def test_vertices_respect_limits_and_clear_the_base(model, leg_roadmap):
    limb = model.limb("LF")
    assert limb.within_limits(leg_roadmap.q).all()
    assert (CollisionModel(model).limb_vs_base(0, leg_roadmap.q) > 0).all()


def test_edges_are_short_and_unique(leg_roadmap):
    edges = leg_roadmap.edges
    assert (edges[:, 0] < edges[:, 1]).all()
    assert len({tuple(e) for e in edges.tolist()}) == len(edges)
    assert (leg_roadmap.lengths <= leg_roadmap.d_max + 1e-12).all()
    assert leg_roadmap.graph.number_of_edges() == leg_roadmap.edge_count


def test_build_is_deterministic(model, leg_roadmap):
    again = build_roadmap(model, "LF", n_vertices=40, k_neighbors=8, d_max=0.4, seed=3)
    assert again.equals(leg_roadmap)
    other = build_roadmap(model, "LF", n_vertices=40, k_neighbors=8, d_max=0.4, seed=4)
    assert not other.equals(leg_roadmap)


def test_too_few_vertices(model):
    with pytest.raises(ValueError):
        build_roadmap(model, "LF", n_vertices=5)


def test_edge_interpolation():
    q_a, q_b = np.zeros(3), np.array([0.12, -0.04, 0.0])
    assert interpolation_steps(q_a, q_b, 0.05) == 3
    samples = edge_configurations(q_a, q_b, 0.05)
    assert np.array_equal(samples[0], q_a)
    assert np.allclose(samples[-1], q_b)
    assert np.abs(np.diff(samples, axis=0)).max() <= 0.05 + 1e-12


def test_save_load_round_trip(tmp_path, model, leg_roadmap):
    path = save_roadmap(leg_roadmap, tmp_path / f"LF{ROADMAP_SUFFIX}")
    loaded = load_roadmap(path, model.config_hash)
    assert loaded.equals(leg_roadmap)
    assert loaded.nearest_vertex(leg_roadmap.p_ee[7]) == 7


def test_load_rejects_other_robot(tmp_path, model, leg_roadmap):
    path = save_roadmap(leg_roadmap, tmp_path / f"LF{ROADMAP_SUFFIX}")
    other = RobotModel(model.spec.model_copy(update={"h_desired": 1.0}))
    with pytest.raises(ConfigHashMismatchError):
        load_roadmap(path, other.config_hash)


def test_roadmap_set_save_and_load(tmp_path, model, roadmaps, roadmap_config):
    files = roadmaps.save(tmp_path)
    assert set(files) == set(model.limb_names)
    loaded = RoadmapSet.load(tmp_path, model)
    assert len(loaded) == len(model.limbs)
    for original in roadmaps:
        assert loaded[original.limb_name].equals(original)
    assert roadmaps["arm"].vertex_count == roadmap_config.arm_vertices
    assert roadmaps[0].limb_name == "LF"


def test_default_vertex_is_grounded_on_flat_terrain(model, leg_roadmap, flat_map):
    state = standing_state(model)
    grounded = grounded_candidates(leg_roadmap, model, state.base_pose, flat_map)
    assert 0 in grounded


def test_nothing_is_grounded_outside_the_map(model, leg_roadmap, flat_map):
    pose = Pose3(np.array([-50.0, -50.0, model.h_desired]))
    assert len(grounded_candidates(leg_roadmap, model, pose, flat_map)) == 0


def test_invalidate_and_search(model, leg_roadmap, flat_map):
    view = invalidate(leg_roadmap, model, standing_state(model), flat_map)
    assert 0 in view.vertex_ids()
    assert view.valid[0]
    assert view.edge_count() <= leg_roadmap.edge_count

    assert search_path(view, 0, 0) == [0]
    reachable = sorted(nx.node_connected_component(view.graph, 0) - {0})
    if not reachable:
        pytest.skip("default vertex has no valid neighbour in this sample")
    target = reachable[-1]
    path = search_path(view, 0, target)
    assert path[0] == 0 and path[-1] == target
    straight = np.linalg.norm(leg_roadmap.p_ee[0] - leg_roadmap.p_ee[target])
    assert path_length(leg_roadmap, path) >= straight - 1e-12


def test_search_rejects_invalid_endpoints(model, leg_roadmap, flat_map):
    view = invalidate(leg_roadmap, model, standing_state(model), flat_map)
    view.valid = view.valid.copy()
    view.valid[1] = False
    with pytest.raises(NoPathError):
        search_path(view, 0, 1)
