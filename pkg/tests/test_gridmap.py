import numpy as np
import pytest

from drover.errors import (
    CorruptedFileError,
    MissingValueError,
    OutOfBoundsError,
    UnknownLayerError,
)
from drover.models.enums import InterpolationMethod
from drover.services.gridmap import CellIndex, GridMap, export_csv, load_map, map_summary, save_map


def polynomial_map(fn, rows=12, cols=16, resolution=0.5, origin=(-2.0, 1.0)):
    grid = GridMap(resolution, origin, rows, cols)
    x, y = grid.cell_centers()
    grid.add_layer("h", fn(x, y))
    return grid


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def test_rejects_degenerate_geometry():
    with pytest.raises(ValueError):
        GridMap(0.0, (0.0, 0.0), 8, 8)
    with pytest.raises(ValueError):
        GridMap(0.1, (0.0, 0.0), 3, 8)


def test_cell_geometry():
    grid = GridMap(0.25, (1.0, -2.0), 8, 10)
    assert np.allclose(grid.position_of(CellIndex(2, 3)), [1.75, -1.5])
    assert grid.index_of((1.75, -1.5)) == CellIndex(2, 3)
    # Nearest center wins
    assert grid.index_of((1.8, -1.45)) == CellIndex(2, 3)
    with pytest.raises(OutOfBoundsError):
        grid.index_of((-5.0, 0.0))


def test_layers_are_read_only_and_named():
    grid = GridMap(0.1, (0.0, 0.0), 4, 5)
    grid.add_layer("a", np.ones((4, 5)))
    assert grid.has_layer("a")
    assert "a" in grid.layer_names
    with pytest.raises(ValueError):
        grid.layer("a")[0, 0] = 2.0
    with pytest.raises(UnknownLayerError):
        grid.layer("missing")
    with pytest.raises(ValueError):
        grid.add_layer("bad", np.ones((5, 4)))


@pytest.mark.parametrize(
    "method, fn",
    [
        (InterpolationMethod.LINEAR, lambda x, y: 0.3 * x - 1.2 * y + 0.7 * x * y + 2.0),
        (InterpolationMethod.BICUBIC, lambda x, y: x ** 3 - 2.0 * x * y ** 2 + 0.5 * y ** 3 + x * x * y),
        (InterpolationMethod.BICUBIC_CONVOLUTION, lambda x, y: 0.4 * x * x - 0.3 * x * y + y * y - x),
    ],
)
def test_interpolation_reproduces_polynomials(method, fn, rng):
    grid = polynomial_map(fn)
    # Stay inside the widest (bicubic) footprint
    low = grid.origin + 1.0 * grid.resolution
    high = grid.origin + np.array([grid.cols - 2, grid.rows - 2]) * grid.resolution
    points = rng.uniform(low, high, size=(50, 2))
    values = grid.values_at("h", points, method)
    assert np.allclose(values, fn(points[:, 0], points[:, 1]), atol=1e-9)


def test_value_at_matches_stored_cells():
    grid = polynomial_map(lambda x, y: np.sin(x) + np.cos(y))
    idx = CellIndex(5, 7)
    xy = grid.position_of(idx)
    for method in InterpolationMethod:
        assert grid.value_at("h", xy, method) == pytest.approx(grid.at_index("h", idx), abs=1e-12)


def test_footprints_per_method():
    grid = polynomial_map(lambda x, y: x + y, rows=8, cols=8, resolution=1.0, origin=(0.0, 0.0))
    # Half a cell outside the first center only nearest can serve
    assert grid.contains((-0.4, 3.0), InterpolationMethod.NEAREST)
    assert not grid.contains((-0.4, 3.0), InterpolationMethod.LINEAR)
    # The first cell center is outside the bicubic footprint
    assert grid.contains((0.0, 3.0), InterpolationMethod.LINEAR)
    assert not grid.contains((0.0, 3.0), InterpolationMethod.BICUBIC)
    assert grid.contains((1.0, 3.0), InterpolationMethod.BICUBIC)
    assert grid.contains((6.0, 6.0), InterpolationMethod.BICUBIC_CONVOLUTION)
    assert not grid.contains((6.1, 6.0), InterpolationMethod.BICUBIC_CONVOLUTION)

    with pytest.raises(OutOfBoundsError):
        grid.value_at("h", (0.5, 3.0), InterpolationMethod.BICUBIC)
    assert np.isnan(grid.values_at("h", np.array([[0.5, 3.0]]), InterpolationMethod.BICUBIC)[0])


def test_missing_cells_in_the_stencil():
    data = np.zeros((8, 8))
    data[4, 4] = np.nan
    grid = GridMap(1.0, (0.0, 0.0), 8, 8, {"h": data})
    with pytest.raises(MissingValueError):
        grid.value_at("h", (4.2, 3.6), InterpolationMethod.LINEAR)
    # The bicubic stencil reaches one cell further
    with pytest.raises(MissingValueError):
        grid.value_at("h", (2.5, 2.5), InterpolationMethod.BICUBIC)
    assert grid.value_at("h", (1.5, 1.5), InterpolationMethod.BICUBIC) == 0.0


def test_infinite_stencil_falls_back_to_nearest_cell():
    data = np.full((8, 8), 5.0)
    data[0, :] = np.inf
    grid = GridMap(1.0, (0.0, 0.0), 8, 8, {"sdf": data})
    assert grid.value_at("sdf", (3.2, 1.2), InterpolationMethod.BICUBIC) == 5.0


def test_gradient_of_a_plane():
    grid = polynomial_map(lambda x, y: 0.2 * x - 0.1 * y + 1.5)
    gradient = grid.gradient_at("h", (1.0, 3.0), InterpolationMethod.BICUBIC)
    assert np.allclose(gradient, [0.2, -0.1])
    gradients = grid.gradients_at("h", np.array([[1.0, 3.0], [100.0, 100.0]]))
    assert np.allclose(gradients[0], [0.2, -0.1])
    assert np.isnan(gradients[1]).all()


def test_cubic_convolution_slope_is_continuous_across_cells(rng):
    grid = GridMap(1.0, (0.0, 0.0), 8, 8, {"h": rng.normal(size=(8, 8))})
    step = 1e-6

    def value(x):
        return grid.value_at("h", (x, 3.3), InterpolationMethod.BICUBIC_CONVOLUTION)

    # Stencils switch at cell centers; x = 4 is the center of column 4
    right = (value(4.0 + 2 * step) - value(4.0 + step)) / step
    left = (value(4.0 - step) - value(4.0 - 2 * step)) / step
    assert right == pytest.approx(left, abs=1e-3)


def test_save_load_round_trip_is_bit_exact(tmp_path):
    data = np.arange(48, dtype=float).reshape(6, 8) * 0.1
    data[2, 3] = np.nan
    data[0, 0] = np.inf
    grid = GridMap(0.1, (0.1, -3.3), 6, 8, {"elevation": data, "sdf": -data})
    path = save_map(grid, tmp_path / "grid.dmap")
    loaded = load_map(path)
    assert loaded == grid
    assert loaded.layer_names == grid.layer_names
    assert map_summary(loaded)["rows"] == 6


def test_corrupted_map_file_is_rejected(tmp_path):
    grid = GridMap(0.1, (0.0, 0.0), 4, 4, {"elevation": np.zeros((4, 4))})
    path = save_map(grid, tmp_path / "grid.dmap")
    blob = bytearray(path.read_bytes())
    blob[40] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(CorruptedFileError):
        load_map(path)


def test_export_csv_writes_one_file_per_layer(tmp_path):
    data = np.array([[0.0, 1.5, np.nan, 2.0]] * 4)
    grid = GridMap(0.5, (0.0, 0.0), 4, 4, {"elevation": data, "traversability": np.ones((4, 4))})
    files = export_csv(grid, tmp_path / "csv")
    assert sorted(f.name for f in files) == ["elevation.csv", "traversability.csv"]
    first_row = (tmp_path / "csv" / "elevation.csv").read_text().splitlines()[0]
    assert first_row == "0,1.5,nan,2"
