"""Binary and CSV persistence for grid maps."""

from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import structlog

from ..storage import FileWriter, read_container, write_container
from .grid_map import GridMap

logger = structlog.get_logger(__name__)

MAP_MAGIC = b"DRVRMAP\x00"
MAP_FORMAT_VERSION = 1


def save_map(grid: GridMap, path: Union[str, Path]) -> Path:
    """Write ``grid`` to a checksummed binary map file."""
    path = Path(path)
    metadata = {
        "resolution": grid.resolution.hex(),
        "origin": [float(v).hex() for v in grid.origin],
        "rows": grid.rows,
        "cols": grid.cols,
        "layers": list(grid.layer_names),
    }
    arrays = {name: grid.layer(name) for name in grid.layer_names}
    write_container(path, MAP_MAGIC, MAP_FORMAT_VERSION, metadata, arrays)
    logger.info("Map saved", path=str(path), shape=grid.shape, layers=len(arrays))
    return path


def load_map(path: Union[str, Path]) -> GridMap:
    """Read a map file written by ``save_map``."""
    path = Path(path)
    metadata, arrays = read_container(path, MAP_MAGIC, MAP_FORMAT_VERSION)
    grid = GridMap(
        resolution=float.fromhex(metadata["resolution"]),
        origin=[float.fromhex(v) for v in metadata["origin"]],
        rows=metadata["rows"],
        cols=metadata["cols"],
    )
    for name in metadata["layers"]:
        grid.add_layer(name, arrays[name])
    logger.debug("Map loaded", path=str(path), shape=grid.shape, layers=len(arrays))
    return grid


def export_csv(grid: GridMap, directory: Union[str, Path]) -> List[Path]:
    """Write one ``<layer>.csv`` per layer (row-major, missing cells as ``nan``)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    writer = FileWriter()
    written: List[Path] = []
    for name in grid.layer_names:
        target = directory / f"{name}.csv"
        writer.write_text_atomic(_format_layer(grid.layer(name)), target)
        written.append(target)
    logger.info("Map exported as CSV", directory=str(directory), files=len(written))
    return written


def _format_layer(data: np.ndarray) -> str:
    lines = [",".join(f"{v:.17g}" for v in row) for row in data]
    return "\n".join(lines) + "\n"


def map_summary(grid: GridMap) -> Dict[str, object]:
    """Small JSON-friendly description of a map."""
    return {
        "resolution": grid.resolution,
        "origin": grid.origin.tolist(),
        "rows": grid.rows,
        "cols": grid.cols,
        "layers": list(grid.layer_names),
    }
