"""Static stability against the support polygon."""

from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError


def support_margin(contact_points: Sequence[Sequence[float]], com: Sequence[float]) -> float:
    """Signed distance from the projected CoM to the support polygon boundary.

    Positive inside. Degenerate (collinear) supports return ``-inf``.

    Raises:
        ValueError: Fewer than three contact points.
    """
    points = np.asarray(contact_points, dtype=float)
    if points.ndim != 2 or len(points) < 3:
        raise ValueError("At least 3 contact points are required")
    planar = points[:, :2]
    try:
        hull = ConvexHull(planar)
    except QhullError:
        return -np.inf
    # Qhull facet equations are unit outward normals with offsets
    normals, offsets = hull.equations[:, :2], hull.equations[:, 2]
    distances = -(normals @ np.asarray(com, dtype=float)[:2] + offsets)
    return float(distances.min())


def support_polygon_contains(
    contact_points: Sequence[Sequence[float]], com: Sequence[float], margin: float = 0.0
) -> bool:
    """Whether the gravity projection of ``com`` lies inside the hull shrunk by ``margin``."""
    return support_margin(contact_points, com) >= margin
