"""Layered 2.5D grid maps."""

from .grid_map import (
    ELEVATION,
    ELEVATION_FILLED,
    ELEVATION_SMOOTH_L,
    ELEVATION_SMOOTH_S,
    MISSING,
    NORMAL_X_L,
    NORMAL_X_S,
    NORMAL_Y_L,
    NORMAL_Y_S,
    SDF,
    TRAVERSABILITY,
    CellIndex,
    GridMap,
)
from .interpolation import KEYS_A
from .map_io import export_csv, load_map, map_summary, save_map

__all__ = [
    "CellIndex",
    "ELEVATION",
    "ELEVATION_FILLED",
    "ELEVATION_SMOOTH_L",
    "ELEVATION_SMOOTH_S",
    "GridMap",
    "KEYS_A",
    "MISSING",
    "NORMAL_X_L",
    "NORMAL_X_S",
    "NORMAL_Y_L",
    "NORMAL_Y_S",
    "SDF",
    "TRAVERSABILITY",
    "export_csv",
    "load_map",
    "map_summary",
    "save_map",
]
