"""Terrain pre-processing and procedural terrains."""

from .distance_transform import compute_sdf, edt_1d, signed_distance, squared_edt
from .generator import TerrainGenerator, TerrainLabels, generate, generate_with_labels, write_sidecar
from .layers import (
    TRAVERSABLE,
    UNTRAVERSABLE,
    classify_traversability,
    derive_layers,
    fill_missing,
    smooth_elevation,
)
from .pipeline import preprocess
from .plane_fit import PlaneFit, disk_offsets, fit_plane, slope_to_normal

__all__ = [
    "PlaneFit",
    "TRAVERSABLE",
    "TerrainGenerator",
    "TerrainLabels",
    "UNTRAVERSABLE",
    "classify_traversability",
    "compute_sdf",
    "derive_layers",
    "disk_offsets",
    "edt_1d",
    "fill_missing",
    "fit_plane",
    "generate",
    "generate_with_labels",
    "preprocess",
    "signed_distance",
    "slope_to_normal",
    "smooth_elevation",
    "squared_edt",
    "write_sidecar",
]
