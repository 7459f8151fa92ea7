"""Exact Euclidean distance transform and the signed distance layer.

The 1D pass computes the lower envelope of the parabolas rooted at every
sample; running it along columns and then rows yields the exact squared
Euclidean distance on the grid.
"""

import math

import numpy as np
import structlog

from ...errors import UnknownLayerError
from ..gridmap import SDF, TRAVERSABILITY, GridMap

logger = structlog.get_logger(__name__)

# Stand-in for "no seed" in the squared-distance input
_FAR = 1e20


def edt_1d(f: np.ndarray) -> np.ndarray:
    """Squared distance transform of a sampled function ``f`` along one line."""
    n = len(f)
    d = np.empty(n)
    v = [0] * n
    z = [0.0] * (n + 1)
    k = 0
    z[0], z[1] = -math.inf, math.inf
    values = f.tolist()
    for q in range(1, n):
        fq = values[q] + q * q
        p = v[k]
        s = (fq - (values[p] + p * p)) / (2.0 * (q - p))
        while s <= z[k]:
            k -= 1
            p = v[k]
            s = (fq - (values[p] + p * p)) / (2.0 * (q - p))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = math.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d[q] = (q - p) ** 2 + values[p]
    return d


def squared_edt(seeds: np.ndarray) -> np.ndarray:
    """Squared distance (in cells) from every cell to the nearest seed cell."""
    f = np.where(seeds, 0.0, _FAR)
    columns = np.column_stack([edt_1d(f[:, c]) for c in range(f.shape[1])])
    return np.vstack([edt_1d(columns[r, :]) for r in range(f.shape[0])])


def signed_distance(traversable: np.ndarray, resolution: float) -> np.ndarray:
    """Signed distance in meters, positive on traversable cells.

    A traversable cell holds the distance to the nearest untraversable cell
    center; an untraversable cell holds minus the distance to the nearest
    traversable one. Without any untraversable cell every value is +inf.
    """
    traversable = np.asarray(traversable, dtype=bool)
    if traversable.all():
        return np.full(traversable.shape, np.inf)
    if not traversable.any():
        return np.full(traversable.shape, -np.inf)
    outside = np.sqrt(squared_edt(~traversable))
    inside = np.sqrt(squared_edt(traversable))
    return np.where(traversable, outside, -inside) * resolution


def compute_sdf(grid: GridMap) -> GridMap:
    """Add the ``sdf`` layer computed from ``traversability``."""
    if not grid.has_layer(TRAVERSABILITY):
        raise UnknownLayerError(f"Missing prerequisite layer: {TRAVERSABILITY}")
    traversable = grid.layer(TRAVERSABILITY) > 0.5
    sdf = signed_distance(traversable, grid.resolution)
    if traversable.all():
        logger.warning("Map is fully traversable, sdf is +inf everywhere")
    logger.info("Computed signed distance field", shape=grid.shape)
    return grid.copy_with_layers({SDF: sdf})
