"""Drover - two-stage motion planning for legged-wheeled robots.

A modular Python toolkit that plans whole-body motions for legged robots with
wheels on 2.5D elevation maps. Planning happens in two stages:

- Initialization: a terrain-aware RRT over SE(2) with Reeds-Shepp steering,
  per-limb roadmaps and whole-body feasibility and static-stability checks
- Refinement: a penalty-based trajectory optimizer enforcing contact,
  traversability, rolling and collision constraints on interpolated terrain

The package is organized into services that handle specific aspects:
- Configuration: Loading and validating settings
- Gridmap / Terrain: Layered elevation maps and their pre-processing
- Robot / Roadmap: Kinematics, stability, collision and limb roadmaps
- Planning / Refinement: The two planning stages
- Orchestration: Command workflows and evaluation sweeps
"""

# Package version
__version__ = "0.3.0"
