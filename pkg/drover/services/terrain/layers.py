"""Pre-processing layers derived from raw elevation."""

from typing import Dict

import numpy as np
import structlog
from scipy import ndimage

from ...errors import InsufficientSupportError, MissingValueError, UnknownLayerError
from ...models.config import TraversabilityParams
from ..gridmap import (
    ELEVATION,
    ELEVATION_FILLED,
    ELEVATION_SMOOTH_L,
    ELEVATION_SMOOTH_S,
    NORMAL_X_L,
    NORMAL_X_S,
    NORMAL_Y_L,
    NORMAL_Y_S,
    TRAVERSABILITY,
    GridMap,
)
from .plane_fit import disk_offsets

logger = structlog.get_logger(__name__)

# Condition number above which a neighbourhood counts as collinear
_MAX_CONDITION = 1e12

TRAVERSABLE = 1.0
UNTRAVERSABLE = 0.0


def _require(grid: GridMap, *names: str) -> None:
    for name in names:
        if not grid.has_layer(name):
            raise UnknownLayerError(f"Missing prerequisite layer: {name}")


def smooth_elevation(grid: GridMap, radius: float, layer: str = ELEVATION) -> Dict[str, np.ndarray]:
    """Plane fits centred on every cell.

    Accumulates the normal equations of every neighbourhood with one
    correlation per moment, then solves all 3x3 systems in one batch.
    Cells with fewer than three usable neighbours, or collinear ones, are
    left missing.

    Returns:
        Dict with ``height``, ``slope_x`` and ``slope_y`` arrays.
    """
    offsets = disk_offsets(radius, grid.resolution)
    if len(offsets) < 3:
        raise InsufficientSupportError(
            f"Radius {radius} m covers fewer than three cells at {grid.resolution} m")

    reach = int(np.abs(offsets).max())
    size = 2 * reach + 1
    mask = np.zeros((size, size))
    mask[offsets[:, 0] + reach, offsets[:, 1] + reach] = 1.0
    dr, dc = np.mgrid[-reach:reach + 1, -reach:reach + 1]
    dx = dc * grid.resolution * mask
    dy = dr * grid.resolution * mask

    heights = grid.layer(layer)
    valid = (~np.isnan(heights)).astype(float)
    h0 = np.where(np.isnan(heights), 0.0, heights)

    def corr(data: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return ndimage.correlate(data, weights, mode="constant", cval=0.0)

    s1 = corr(valid, mask)
    sx, sy = corr(valid, dx), corr(valid, dy)
    sxx, sxy, syy = corr(valid, dx * dx), corr(valid, dx * dy), corr(valid, dy * dy)
    sh, sxh, syh = corr(h0, mask), corr(h0, dx), corr(h0, dy)

    normal = np.stack([
        np.stack([sxx, sxy, sx], axis=-1),
        np.stack([sxy, syy, sy], axis=-1),
        np.stack([sx, sy, s1], axis=-1),
    ], axis=-2)
    rhs = np.stack([sxh, syh, sh], axis=-1)

    solvable = s1 >= 3
    if solvable.any():
        cond = np.full(s1.shape, np.inf)
        cond[solvable] = np.linalg.cond(normal[solvable])
        solvable &= cond < _MAX_CONDITION

    theta = np.full(rhs.shape, np.nan)
    if solvable.any():
        theta[solvable] = np.linalg.solve(normal[solvable], rhs[solvable][..., None])[..., 0]
    return {"slope_x": theta[..., 0], "slope_y": theta[..., 1], "height": theta[..., 2]}


def derive_layers(grid: GridMap, r_small: float = 0.3, r_large: float = 2.5) -> GridMap:
    """Add two-scale smoothed elevation and normal layers.

    Normal layers hold the fitted slope pair (dh/dx, dh/dy).
    """
    _require(grid, ELEVATION)
    small = smooth_elevation(grid, r_small)
    large = smooth_elevation(grid, r_large)
    logger.info("Derived smoothed layers", r_small=r_small, r_large=r_large, shape=grid.shape)
    return grid.copy_with_layers({
        ELEVATION_SMOOTH_S: small["height"],
        NORMAL_X_S: small["slope_x"],
        NORMAL_Y_S: small["slope_y"],
        ELEVATION_SMOOTH_L: large["height"],
        NORMAL_X_L: large["slope_x"],
        NORMAL_Y_L: large["slope_y"],
    })


def classify_traversability(grid: GridMap, params: TraversabilityParams) -> GridMap:
    """Add the binary traversability layer (1 traversable, 0 not).

    A cell is untraversable when its small-radius plane is steeper than
    ``max_slope``, when raw and smoothed elevation differ by more than
    ``height_diff_threshold``, when its elevation or fit is missing, or
    when it lies within ``missing_margin`` of missing elevation.
    """
    _require(grid, ELEVATION, ELEVATION_SMOOTH_S, NORMAL_X_S, NORMAL_Y_S)
    elevation = grid.layer(ELEVATION)
    smooth = grid.layer(ELEVATION_SMOOTH_S)
    slope = np.hypot(grid.layer(NORMAL_X_S), grid.layer(NORMAL_Y_S))

    missing = np.isnan(elevation) | np.isnan(smooth) | np.isnan(slope)
    with np.errstate(invalid="ignore"):
        steep = np.arctan(slope) > params.max_slope
        jump = np.abs(elevation - smooth) > params.height_diff_threshold
    rim = _near_missing(np.isnan(elevation), grid.resolution, params.missing_margin)

    blocked = missing | steep | jump | rim
    traversability = np.where(blocked, UNTRAVERSABLE, TRAVERSABLE)
    logger.info(
        "Classified traversability",
        traversable=int((~blocked).sum()),
        untraversable=int(blocked.sum()),
        max_slope=params.max_slope,
    )
    return grid.copy_with_layers({TRAVERSABILITY: traversability})


def _near_missing(missing: np.ndarray, resolution: float, margin: float) -> np.ndarray:
    if margin <= 0 or not missing.any():
        return np.zeros(missing.shape, dtype=bool)
    if missing.all():
        return np.ones(missing.shape, dtype=bool)
    distance = ndimage.distance_transform_edt(~missing) * resolution
    return distance <= margin + 1e-9


def fill_missing(grid: GridMap, source: str = ELEVATION, target: str = ELEVATION_FILLED) -> GridMap:
    """Copy ``source`` into ``target`` with missing cells set to their nearest known value."""
    _require(grid, source)
    data = grid.layer(source)
    missing = np.isnan(data)
    if missing.all():
        raise MissingValueError(f"Layer {source} has no known cells")
    if not missing.any():
        return grid.copy_with_layers({target: data})
    indices = ndimage.distance_transform_edt(missing, return_distances=False, return_indices=True)
    filled = data[indices[0], indices[1]]
    logger.debug("Filled missing cells", layer=source, filled=int(missing.sum()))
    return grid.copy_with_layers({target: filled})
