"""Procedural benchmark terrains.

Every family places its feature across the map center, perpendicular to x,
so a request from ``start`` to ``goal`` has to cross it. Difficulty maps
linearly onto the family's physical parameter.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Tuple, Union

import numpy as np
import structlog
from scipy.interpolate import RectBivariateSpline

from ...models.config import TerrainSpec
from ...models.enums import TerrainFamily
from ..gridmap import ELEVATION, GridMap
from ..storage import write_json

logger = structlog.get_logger(__name__)

ROUGH_AMPLITUDE = (0.25, 2.0)
GAP_WIDTH = (1.0, 3.5)
STEP_HEIGHT = (0.5, 1.5)
RAMP_HEIGHT = (0.5, 2.0)
WALL_HEIGHT = (0.2, 0.8)

HOLE_LENGTH = 2.5
HOLE_SPAN_FRACTION = 0.6
HOLE_BRIDGE_WIDTH = 1.0
HOLE_MIN_EXTENT = 36.0
RAMP_LENGTH = 6.0
WALL_THICKNESS = 0.5
NOISE_SPACINGS = (4.0, 2.0, 1.0)

REQUEST_LENGTH = 15.0
HOLE_REQUEST_LENGTH = 30.0


def _lerp(bounds: Tuple[float, float], difficulty: float) -> float:
    low, high = bounds
    return low + (high - low) * difficulty


@dataclass
class TerrainLabels:
    """Ground truth written next to a generated map."""

    family: str
    difficulty: float
    seed: int
    parameter: str
    value: float
    geometry: Dict[str, float] = field(default_factory=dict)
    measured: Dict[str, float] = field(default_factory=dict)
    start: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    goal: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class TerrainGenerator:
    """Builds elevation maps for one ``TerrainSpec``."""

    def __init__(self, spec: TerrainSpec):
        self.spec = spec
        extent_x, extent_y = spec.extent
        if spec.family == TerrainFamily.HOLE:
            extent_x = max(extent_x, HOLE_MIN_EXTENT)
        self.resolution = spec.resolution
        self.cols = max(int(round(extent_x / spec.resolution)), 4)
        self.rows = max(int(round(extent_y / spec.resolution)), 4)
        self.grid = GridMap(spec.resolution, (0.0, 0.0), self.rows, self.cols)
        self.x, self.y = self.grid.cell_centers()
        self.cx = float(self.x[0, -1]) / 2.0
        self.cy = float(self.y[-1, 0]) / 2.0

        self._builders: Dict[TerrainFamily, Callable[[], Tuple[np.ndarray, TerrainLabels]]] = {
            TerrainFamily.FLAT: self._flat,
            TerrainFamily.ROUGH: self._rough,
            TerrainFamily.GAP: self._gap,
            TerrainFamily.STEP: self._step,
            TerrainFamily.HOLE: self._hole,
            TerrainFamily.RAMP: self._ramp,
            TerrainFamily.WALL: self._wall,
        }

    def build(self) -> Tuple[GridMap, TerrainLabels]:
        elevation, labels = self._builders[self.spec.family]()
        grid = self.grid.copy_with_layers({ELEVATION: elevation})
        logger.info(
            "Generated terrain",
            family=self.spec.family.value,
            difficulty=self.spec.difficulty,
            parameter=labels.parameter,
            value=labels.value,
            shape=grid.shape,
        )
        return grid, labels

    # Families

    def _labels(self, parameter: str, value: float, length: float = REQUEST_LENGTH) -> TerrainLabels:
        return TerrainLabels(
            family=self.spec.family.value,
            difficulty=self.spec.difficulty,
            seed=self.spec.seed,
            parameter=parameter,
            value=value,
            start=(self.cx - length / 2.0, self.cy, 0.0),
            goal=(self.cx + length / 2.0, self.cy, 0.0),
        )

    def _flat(self):
        return np.zeros(self.grid.shape), self._labels("none", 0.0)

    def _rough(self):
        amplitude = _lerp(ROUGH_AMPLITUDE, self.spec.difficulty)
        rng = np.random.default_rng(self.spec.seed)
        xs, ys = self.x[0, :], self.y[:, 0]
        heights = np.zeros(self.grid.shape)
        weight = 1.0
        for spacing in NOISE_SPACINGS:
            lattice_x = np.arange(max(int(np.ceil(xs[-1] / spacing)) + 1, 4)) * spacing
            lattice_y = np.arange(max(int(np.ceil(ys[-1] / spacing)) + 1, 4)) * spacing
            values = rng.uniform(-1.0, 1.0, size=(len(lattice_y), len(lattice_x)))
            spline = RectBivariateSpline(lattice_y, lattice_x, values, kx=3, ky=3)
            heights += weight * spline(ys, xs)
            weight *= 0.5
        peak = np.max(np.abs(heights))
        if peak > 0:
            heights *= amplitude / peak
        labels = self._labels("roughness", amplitude)
        labels.measured = {"min": float(heights.min()), "max": float(heights.max())}
        return heights, labels

    def _gap(self):
        width = _lerp(GAP_WIDTH, self.spec.difficulty)
        heights = np.zeros(self.grid.shape)
        inside = np.abs(self.x - self.cx) < width / 2.0
        heights[inside] = np.nan
        labels = self._labels("gap_width", width)
        labels.geometry = {"x_min": self.cx - width / 2.0, "x_max": self.cx + width / 2.0}
        labels.measured = {"width": float(inside[self.rows // 2].sum() * self.resolution)}
        return heights, labels

    def _step(self):
        height = _lerp(STEP_HEIGHT, self.spec.difficulty)
        heights = np.where(self.x >= self.cx, height, 0.0)
        labels = self._labels("step_height", height)
        labels.geometry = {"x_edge": self.cx}
        labels.measured = {"height": float(heights.max() - heights.min())}
        return heights, labels

    def _hole(self):
        heights = np.zeros(self.grid.shape)
        half_span = HOLE_SPAN_FRACTION * self.cy
        inside = (np.abs(self.x - self.cx) <= HOLE_LENGTH / 2.0) & (np.abs(self.y - self.cy) <= half_span)
        bridge = np.abs(self.y - self.cy) <= HOLE_BRIDGE_WIDTH / 2.0
        heights[inside & ~bridge] = np.nan
        labels = self._labels("bridge_width", HOLE_BRIDGE_WIDTH, HOLE_REQUEST_LENGTH)
        labels.geometry = {
            "x_min": self.cx - HOLE_LENGTH / 2.0,
            "x_max": self.cx + HOLE_LENGTH / 2.0,
            "y_min": self.cy - half_span,
            "y_max": self.cy + half_span,
            "bridge_y_min": self.cy - HOLE_BRIDGE_WIDTH / 2.0,
            "bridge_y_max": self.cy + HOLE_BRIDGE_WIDTH / 2.0,
        }
        return heights, labels

    def _ramp(self):
        height = _lerp(RAMP_HEIGHT, self.spec.difficulty)
        x0 = self.cx - RAMP_LENGTH / 2.0
        heights = height * np.clip((self.x - x0) / RAMP_LENGTH, 0.0, 1.0)
        labels = self._labels("ramp_height", height)
        labels.geometry = {"x_min": x0, "x_max": x0 + RAMP_LENGTH}
        return heights, labels

    def _wall(self):
        height = _lerp(WALL_HEIGHT, self.spec.difficulty)
        heights = np.where(np.abs(self.x - self.cx) <= WALL_THICKNESS / 2.0, height, 0.0)
        labels = self._labels("wall_height", height)
        labels.geometry = {"x_min": self.cx - WALL_THICKNESS / 2.0, "x_max": self.cx + WALL_THICKNESS / 2.0}
        return heights, labels


def generate(spec: TerrainSpec) -> GridMap:
    """Deterministic elevation map for ``spec``."""
    grid, _ = TerrainGenerator(spec).build()
    return grid


def generate_with_labels(spec: TerrainSpec) -> Tuple[GridMap, TerrainLabels]:
    return TerrainGenerator(spec).build()


def write_sidecar(labels: TerrainLabels, path: Union[str, Path]) -> Path:
    """Write the ground-truth labels as JSON."""
    path = Path(path)
    write_json(labels.to_dict(), path)
    return path
