"""Full pre-processing chain applied before planning."""

import structlog

from ...models.config import PreprocessingConfig
from ..gridmap import GridMap
from .distance_transform import compute_sdf
from .layers import classify_traversability, derive_layers, fill_missing

logger = structlog.get_logger(__name__)


def preprocess(grid: GridMap, config: PreprocessingConfig) -> GridMap:
    """Derive smoothed, traversability and sdf layers (plus the filled elevation)."""
    result = derive_layers(grid, config.r_small, config.r_large)
    result = classify_traversability(result, config.traversability)
    result = compute_sdf(result)
    if config.fill_missing:
        result = fill_missing(result)
    logger.info("Pre-processing complete", layers=list(result.layer_names))
    return result
