"""Roadmap files and per-robot roadmap sets."""

from pathlib import Path
from typing import Callable, Dict, Iterator, Optional, Union

import structlog

from ...errors import ConfigHashMismatchError
from ...models.config import RoadmapConfig
from ..robot import RobotModel
from ..storage import read_container, write_container
from .limb_roadmap import LimbRoadmap, build_roadmap

logger = structlog.get_logger(__name__)

ROADMAP_MAGIC = b"DRVRRMAP"
ROADMAP_FORMAT_VERSION = 1
ROADMAP_SUFFIX = ".rmap"


def save_roadmap(roadmap: LimbRoadmap, path: Union[str, Path]) -> Path:
    path = Path(path)
    metadata = {
        "limb_name": roadmap.limb_name,
        "limb_index": roadmap.limb_index,
        "d_max": roadmap.d_max.hex(),
        "k_neighbors": roadmap.k_neighbors,
        "edge_step": roadmap.edge_step.hex(),
        "seed": roadmap.seed,
        "config_hash": roadmap.config_hash,
    }
    arrays = {
        "q": roadmap.q,
        "p_ee": roadmap.p_ee,
        "p_com": roadmap.p_com,
        "edges": roadmap.edges,
        "lengths": roadmap.lengths,
    }
    write_container(path, ROADMAP_MAGIC, ROADMAP_FORMAT_VERSION, metadata, arrays)
    logger.info("Roadmap saved", limb=roadmap.limb_name, path=str(path))
    return path


def load_roadmap(path: Union[str, Path], expected_hash: Optional[str] = None) -> LimbRoadmap:
    """Read a roadmap file.

    Raises:
        ConfigHashMismatchError: The roadmap was built for another robot description.
    """
    path = Path(path)
    metadata, arrays = read_container(path, ROADMAP_MAGIC, ROADMAP_FORMAT_VERSION)
    if expected_hash is not None and metadata["config_hash"] != expected_hash:
        raise ConfigHashMismatchError(
            f"Roadmap {path} was built for robot config {metadata['config_hash'][:12]}, "
            f"current is {expected_hash[:12]}"
        )
    return LimbRoadmap(
        limb_name=metadata["limb_name"],
        limb_index=metadata["limb_index"],
        q=arrays["q"],
        p_ee=arrays["p_ee"],
        p_com=arrays["p_com"],
        edges=arrays["edges"],
        lengths=arrays["lengths"],
        d_max=float.fromhex(metadata["d_max"]),
        k_neighbors=metadata["k_neighbors"],
        edge_step=float.fromhex(metadata["edge_step"]),
        seed=metadata["seed"],
        config_hash=metadata["config_hash"],
    )


class RoadmapSet:
    """One roadmap per limb of a robot."""

    def __init__(self, roadmaps: Dict[str, LimbRoadmap]):
        self.roadmaps = dict(roadmaps)

    def __getitem__(self, key) -> LimbRoadmap:
        if isinstance(key, int):
            return next(rm for rm in self.roadmaps.values() if rm.limb_index == key)
        return self.roadmaps[key]

    def __iter__(self) -> Iterator[LimbRoadmap]:
        return iter(sorted(self.roadmaps.values(), key=lambda rm: rm.limb_index))

    def __len__(self) -> int:
        return len(self.roadmaps)

    @classmethod
    def build(
        cls,
        model: RobotModel,
        config: RoadmapConfig,
        on_progress: Optional[Callable[[int], None]] = None,
    ) -> "RoadmapSet":
        """Build every limb's roadmap with per-limb derived seeds."""
        collision = model.collision
        roadmaps = {}
        for index, limb in enumerate(model.limbs):
            roadmaps[limb.name] = build_roadmap(
                model,
                index,
                n_vertices=config.leg_vertices if limb.wheeled else config.arm_vertices,
                k_neighbors=config.k_neighbors,
                d_max=config.leg_d_max if limb.wheeled else config.arm_d_max,
                seed=config.seed * 1000 + index,
                edge_step=config.edge_step,
                collision=collision,
                on_progress=on_progress,
            )
        return cls(roadmaps)

    def save(self, directory: Union[str, Path]) -> Dict[str, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        return {rm.limb_name: save_roadmap(rm, directory / f"{rm.limb_name}{ROADMAP_SUFFIX}") for rm in self}

    @classmethod
    def load(cls, directory: Union[str, Path], model: RobotModel) -> "RoadmapSet":
        """Load one file per limb, rejecting roadmaps built for another robot."""
        directory = Path(directory)
        roadmaps = {}
        for name in model.limb_names:
            roadmaps[name] = load_roadmap(directory / f"{name}{ROADMAP_SUFFIX}", model.config_hash)
        logger.info("Roadmaps loaded", directory=str(directory), limbs=len(roadmaps))
        return cls(roadmaps)
