"""Layered 2.5D grid map with continuous-coordinate access."""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ...errors import MissingValueError, OutOfBoundsError, UnknownLayerError
from ...models.enums import InterpolationMethod
from .interpolation import sample

MISSING = np.nan

# Layer ids shared between modules
ELEVATION = "elevation"
ELEVATION_FILLED = "elevation_filled"
ELEVATION_SMOOTH_S = "elevation_smooth_s"
ELEVATION_SMOOTH_L = "elevation_smooth_l"
NORMAL_X_S = "normal_x_s"
NORMAL_Y_S = "normal_y_s"
NORMAL_X_L = "normal_x_l"
NORMAL_Y_L = "normal_y_l"
TRAVERSABILITY = "traversability"
SDF = "sdf"


@dataclass(frozen=True)
class CellIndex:
    """Row/column address of a cell."""

    row: int
    col: int


class GridMap:
    """Multilayer raster sharing one geometry across layers.

    Cell ``(r, c)`` is centered at ``origin + (c * resolution, r * resolution)``.
    Missing cells hold NaN. Layers are added during a single-writer
    pre-processing phase; afterwards the map is treated as immutable.
    """

    def __init__(
        self,
        resolution: float,
        origin: Sequence[float],
        rows: int,
        cols: int,
        layers: Optional[Mapping[str, np.ndarray]] = None,
    ) -> None:
        if not resolution > 0:
            raise ValueError("resolution must be positive")
        if rows < 4 or cols < 4:
            raise ValueError("A grid map needs at least 4 rows and 4 columns")
        self.resolution = float(resolution)
        self.origin = np.array([float(origin[0]), float(origin[1])])
        self.rows = int(rows)
        self.cols = int(cols)
        self._layers: Dict[str, np.ndarray] = {}
        for name, data in (layers or {}).items():
            self.add_layer(name, data)

    # Layers

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def layer_names(self) -> Tuple[str, ...]:
        return tuple(self._layers)

    def has_layer(self, name: str) -> bool:
        return name in self._layers

    def add_layer(self, name: str, data: np.ndarray) -> None:
        """Insert or replace a layer (stored as a read-only float64 copy)."""
        array = np.array(data, dtype=np.float64, copy=True)
        if array.shape != self.shape:
            raise ValueError(f"Layer {name} has shape {array.shape}, expected {self.shape}")
        array.setflags(write=False)
        self._layers[name] = array

    def layer(self, name: str) -> np.ndarray:
        """Read-only view of a layer."""
        try:
            return self._layers[name]
        except KeyError:
            raise UnknownLayerError(f"Unknown layer: {name}") from None

    def copy_with_layers(self, layers: Mapping[str, np.ndarray]) -> "GridMap":
        """New map with the same geometry, existing layers plus ``layers``."""
        result = GridMap(self.resolution, self.origin, self.rows, self.cols, self._layers)
        for name, data in layers.items():
            result.add_layer(name, data)
        return result

    # Geometry

    def position_of(self, idx: CellIndex) -> np.ndarray:
        """Center of a cell."""
        return self.origin + self.resolution * np.array([idx.col, idx.row], dtype=float)

    def index_of(self, xy: Sequence[float]) -> CellIndex:
        """Cell whose center is closest to ``xy``."""
        fr, fc = self.continuous_index(np.asarray(xy, dtype=float))
        row, col = int(np.floor(fr + 0.5)), int(np.floor(fc + 0.5))
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise OutOfBoundsError(f"Position {tuple(xy)} is outside the map")
        return CellIndex(row, col)

    def continuous_index(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Continuous (row, col) indices of points ``(..., 2)``."""
        points = np.asarray(points, dtype=float)
        fc = (points[..., 0] - self.origin[0]) / self.resolution
        fr = (points[..., 1] - self.origin[1]) / self.resolution
        return fr, fc

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays of all cell centers."""
        xs = self.origin[0] + self.resolution * np.arange(self.cols)
        ys = self.origin[1] + self.resolution * np.arange(self.rows)
        return np.meshgrid(xs, ys)

    def contains(self, xy: Sequence[float], method: InterpolationMethod = InterpolationMethod.NEAREST) -> bool:
        """Whether ``method`` can serve a query at ``xy``."""
        _, valid, _ = sample(
            np.zeros(self.shape), *self.continuous_index(np.asarray(xy, float)[None, :]), method
        )
        return bool(valid[0])

    # Access

    def at_index(self, layer: str, idx: CellIndex) -> float:
        """Stored value of a cell (may be the missing sentinel)."""
        data = self.layer(layer)
        if not (0 <= idx.row < self.rows and 0 <= idx.col < self.cols):
            raise OutOfBoundsError(f"Index ({idx.row}, {idx.col}) is outside {self.shape}")
        return float(data[idx.row, idx.col])

    def values_at(
        self,
        layer: str,
        points: np.ndarray,
        method: InterpolationMethod = InterpolationMethod.BICUBIC,
    ) -> np.ndarray:
        """Interpolated values at ``(N, 2)`` points; NaN where not available."""
        fr, fc = self.continuous_index(points)
        values, _, _ = sample(self.layer(layer), fr, fc, method)
        return values

    def value_at(
        self,
        layer: str,
        xy: Sequence[float],
        method: InterpolationMethod = InterpolationMethod.BICUBIC,
    ) -> float:
        """Interpolated value at one position.

        Raises:
            UnknownLayerError: If the layer does not exist.
            OutOfBoundsError: If ``xy`` lies outside the method's footprint.
            MissingValueError: If the stencil holds a missing cell.
        """
        data = self.layer(layer)
        fr, fc = self.continuous_index(np.asarray(xy, dtype=float)[None, :])
        values, valid, missing = sample(data, fr, fc, method)
        if not valid[0]:
            raise OutOfBoundsError(
                f"Position {tuple(np.asarray(xy).tolist())} is outside the {method.value} footprint"
            )
        if missing[0]:
            raise MissingValueError(f"Stencil at {tuple(np.asarray(xy).tolist())} holds missing cells")
        return float(values[0])

    def gradient_at(
        self,
        layer: str,
        xy: Sequence[float],
        method: InterpolationMethod = InterpolationMethod.BICUBIC,
        step: float = 0.05,
    ) -> np.ndarray:
        """Central finite-difference gradient of ``value_at``."""
        x, y = float(xy[0]), float(xy[1])
        fx_p = self.value_at(layer, (x + step, y), method)
        fx_m = self.value_at(layer, (x - step, y), method)
        fy_p = self.value_at(layer, (x, y + step), method)
        fy_m = self.value_at(layer, (x, y - step), method)
        return _central_difference(fx_p, fx_m, fy_p, fy_m, step)

    def gradients_at(
        self,
        layer: str,
        points: np.ndarray,
        method: InterpolationMethod = InterpolationMethod.BICUBIC,
        step: float = 0.05,
    ) -> np.ndarray:
        """Vectorized ``gradient_at``; rows are NaN where unavailable."""
        points = np.asarray(points, dtype=float)
        dx = np.array([step, 0.0])
        dy = np.array([0.0, step])
        fx_p = self.values_at(layer, points + dx, method)
        fx_m = self.values_at(layer, points - dx, method)
        fy_p = self.values_at(layer, points + dy, method)
        fy_m = self.values_at(layer, points - dy, method)
        return _central_difference(fx_p, fx_m, fy_p, fy_m, step)

    # Comparison

    def equals(self, other: "GridMap") -> bool:
        """Bit-exact comparison of geometry and every layer."""
        if not isinstance(other, GridMap):
            return False
        if (self.resolution, self.rows, self.cols) != (other.resolution, other.rows, other.cols):
            return False
        if self.origin.tobytes() != other.origin.tobytes():
            return False
        if self.layer_names != other.layer_names:
            return False
        return all(
            self._layers[name].tobytes() == other._layers[name].tobytes() for name in self.layer_names
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GridMap) and self.equals(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"GridMap(resolution={self.resolution}, origin={tuple(self.origin)}, "
            f"shape={self.shape}, layers={list(self._layers)})"
        )


def _central_difference(fx_p, fx_m, fy_p, fy_m, step: float) -> np.ndarray:
    """Central differences; infinite plateaus (all-traversable SDF) have zero slope."""
    with np.errstate(invalid="ignore"):
        gx = (np.asarray(fx_p) - np.asarray(fx_m)) / (2.0 * step)
        gy = (np.asarray(fy_p) - np.asarray(fy_m)) / (2.0 * step)
    plateau_x = np.isinf(fx_p) & np.isinf(fx_m)
    plateau_y = np.isinf(fy_p) & np.isinf(fy_m)
    gx = np.where(plateau_x, 0.0, gx)
    gy = np.where(plateau_y, 0.0, gy)
    return np.stack([gx, gy], axis=-1)

