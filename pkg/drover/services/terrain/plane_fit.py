"""Least-squares tangent planes over circular neighbourhoods."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ...errors import InsufficientSupportError, RankDeficientError
from ..gridmap import GridMap

# Cells whose center lies on the circle are included
_RADIUS_TOL = 1e-9


@dataclass(frozen=True)
class PlaneFit:
    """Local plane ``h(x, y) = height + nx * (x - px) + ny * (y - py)``.

    ``normal_xy`` holds the slope pair; the upward unit normal is
    ``(-nx, -ny, 1) / norm``.
    """

    normal_xy: Tuple[float, float]
    height: float
    support_count: int

    @property
    def tilt(self) -> float:
        """Inclination of the plane in radians."""
        return float(np.arctan(np.hypot(*self.normal_xy)))

    @property
    def unit_normal(self) -> np.ndarray:
        return slope_to_normal(np.asarray(self.normal_xy))


def slope_to_normal(slope: np.ndarray) -> np.ndarray:
    """Upward unit normals for slope pairs ``(..., 2)``."""
    slope = np.asarray(slope, dtype=float)
    n = np.concatenate([-slope, np.ones(slope.shape[:-1] + (1,))], axis=-1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def disk_offsets(radius: float, resolution: float) -> np.ndarray:
    """Integer (dr, dc) offsets of cells whose center lies within ``radius``."""
    reach = int(np.floor(radius / resolution + _RADIUS_TOL))
    dr, dc = np.mgrid[-reach:reach + 1, -reach:reach + 1]
    inside = np.hypot(dr, dc) * resolution <= radius + _RADIUS_TOL
    return np.stack([dr[inside], dc[inside]], axis=-1)


def fit_plane(grid: GridMap, layer: str, p: Sequence[float], radius: float) -> PlaneFit:
    """Fit a plane to the non-missing cells within ``radius`` of ``p``.

    Raises:
        InsufficientSupportError: Fewer than three usable cells.
        RankDeficientError: The usable cells are collinear.
    """
    data = grid.layer(layer)
    p = np.asarray(p, dtype=float)
    fr, fc = grid.continuous_index(p)
    reach = radius / grid.resolution + 1
    r_lo = max(int(np.floor(fr - reach)), 0)
    r_hi = min(int(np.ceil(fr + reach)), grid.rows - 1)
    c_lo = max(int(np.floor(fc - reach)), 0)
    c_hi = min(int(np.ceil(fc + reach)), grid.cols - 1)

    rows, cols = np.mgrid[r_lo:r_hi + 1, c_lo:c_hi + 1]
    dx = grid.origin[0] + cols * grid.resolution - p[0]
    dy = grid.origin[1] + rows * grid.resolution - p[1]
    heights = data[rows, cols]
    use = (np.hypot(dx, dy) <= radius + _RADIUS_TOL) & ~np.isnan(heights)

    count = int(use.sum())
    if count < 3:
        raise InsufficientSupportError(
            f"Only {count} cells within {radius} m of {tuple(p.tolist())}")

    design = np.column_stack([dx[use], dy[use], np.ones(count)])
    if np.linalg.matrix_rank(design) < 3:
        raise RankDeficientError(f"Collinear neighbourhood at {tuple(p.tolist())}")

    theta = np.linalg.solve(design.T @ design, design.T @ heights[use])
    return PlaneFit(normal_xy=(float(theta[0]), float(theta[1])),
                    height=float(theta[2]), support_count=count)
