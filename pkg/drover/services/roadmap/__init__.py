"""Per-limb configuration roadmaps."""

from .limb_roadmap import LimbRoadmap, build_roadmap, edge_configurations, interpolation_steps
from .roadmap_io import ROADMAP_SUFFIX, RoadmapSet, load_roadmap, save_roadmap
from .views import (
    RoadmapView,
    contact_points_world,
    grounded_candidates,
    invalidate,
    path_length,
    search_path,
)

__all__ = [
    "LimbRoadmap",
    "ROADMAP_SUFFIX",
    "RoadmapSet",
    "RoadmapView",
    "build_roadmap",
    "contact_points_world",
    "edge_configurations",
    "grounded_candidates",
    "interpolation_steps",
    "invalidate",
    "load_roadmap",
    "path_length",
    "save_roadmap",
    "search_path",
]
