"""Shortest Reeds-Shepp paths between planar poses."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

from .words import WORDS, candidates

# Segments shorter than this (in turning radii) are dropped
_MIN_SEGMENT = 1e-9
_ARC_TOL = 1e-9


def wrap_angle(angle: float) -> float:
    """Wrap into (-pi, pi]."""
    r = math.fmod(angle + math.pi, 2.0 * math.pi)
    if r <= 0.0:
        r += 2.0 * math.pi
    return r - math.pi


class Steer(str, Enum):
    LEFT = "L"
    STRAIGHT = "S"
    RIGHT = "R"


class Direction(str, Enum):
    FORWARD = "fwd"
    REVERSE = "rev"


@dataclass(frozen=True)
class SE2Pose:
    """Planar pose; yaw is kept in (-pi, pi]."""

    x: float
    y: float
    yaw: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.x, self.y, self.yaw

    def distance_to(self, other: "SE2Pose") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class RSSegment:
    steer: Steer
    direction: Direction
    length: float  # meters, non-negative


@dataclass(frozen=True)
class RSPath:
    """Sequence of at most five arcs and straights."""

    segments: Tuple[RSSegment, ...]
    turning_radius: float
    word: int = -1

    @property
    def total_length(self) -> float:
        return float(sum(segment.length for segment in self.segments))

    @property
    def word_letters(self) -> str:
        return "".join(segment.steer.value for segment in self.segments)

    def signed_values(self) -> List[float]:
        """Normalized signed segment values (negative for reverse)."""
        return [
            (segment.length if segment.direction == Direction.FORWARD else -segment.length)
            / self.turning_radius
            for segment in self.segments
        ]


def _build(word: int, values: Sequence[float], radius: float) -> RSPath:
    segments = []
    for letter, value in zip(WORDS[word], values):
        if abs(value) <= _MIN_SEGMENT:
            continue
        segments.append(RSSegment(
            steer=Steer(letter),
            direction=Direction.FORWARD if value > 0 else Direction.REVERSE,
            length=abs(value) * radius,
        ))
    return RSPath(tuple(segments), radius, word)


def _normalized_goal(start: SE2Pose, goal: SE2Pose, radius: float) -> Tuple[float, float, float]:
    dx, dy = goal.x - start.x, goal.y - start.y
    c, s = math.cos(start.yaw), math.sin(start.yaw)
    return (c * dx + s * dy) / radius, (-s * dx + c * dy) / radius, goal.yaw - start.yaw


def all_paths(start: SE2Pose, goal: SE2Pose, radius: float) -> List[RSPath]:
    """Every valid word between two poses, in family order."""
    if radius <= 0:
        raise ValueError("turning radius must be positive")
    x, y, phi = _normalized_goal(start, goal, radius)
    return [_build(word, values, radius) for word, values in candidates(x, y, phi)]


def shortest_path(start: SE2Pose, goal: SE2Pose, radius: float) -> RSPath:
    """Minimal-length Reeds-Shepp path; ties keep the earliest word."""
    if radius <= 0:
        raise ValueError("turning radius must be positive")
    x, y, phi = _normalized_goal(start, goal, radius)
    best_word, best_values, best_length = -1, (), math.inf
    for word, values in candidates(x, y, phi):
        length = sum(abs(v) for v in values)
        if length < best_length:
            best_word, best_values, best_length = word, values, length
    return _build(best_word, best_values, radius)


def _advance(x: float, y: float, phi: float, steer: Steer, v: float) -> Tuple[float, float, float]:
    """Move ``v`` normalized units along one segment."""
    if steer == Steer.LEFT:
        return x + math.sin(phi + v) - math.sin(phi), y - math.cos(phi + v) + math.cos(phi), phi + v
    if steer == Steer.RIGHT:
        return x - math.sin(phi - v) + math.sin(phi), y + math.cos(phi - v) - math.cos(phi), phi - v
    return x + v * math.cos(phi), y + v * math.sin(phi), phi


def interpolate(path: RSPath, start: SE2Pose, s: float) -> SE2Pose:
    """Pose after ``s`` meters along ``path``.

    Raises:
        ValueError: ``s`` outside [0, total_length].
    """
    total = path.total_length
    if s < -_ARC_TOL or s > total + _ARC_TOL:
        raise ValueError(f"Arc length {s} outside [0, {total}]")
    remaining = min(max(s, 0.0), total) / path.turning_radius
    x, y, phi = 0.0, 0.0, start.yaw
    for segment, value in zip(path.segments, path.signed_values()):
        if remaining <= 0.0:
            break
        step = min(abs(value), remaining)
        remaining -= step
        x, y, phi = _advance(x, y, phi, segment.steer, math.copysign(step, value))
    r = path.turning_radius
    return SE2Pose(start.x + r * x, start.y + r * y, phi)


def discretize(path: RSPath, start: SE2Pose, max_step: float) -> List[SE2Pose]:
    """Evenly spaced poses including both endpoints, no gap above ``max_step``."""
    if max_step <= 0:
        raise ValueError("max_step must be positive")
    total = path.total_length
    if total <= 0.0:
        return [start]
    count = int(math.ceil(total / max_step - 1e-9)) + 1
    return [interpolate(path, start, total * i / (count - 1)) for i in range(count)]


def truncate(path: RSPath, s: float) -> RSPath:
    """Prefix of ``path`` covering its first ``s`` meters."""
    remaining = max(s, 0.0)
    segments = []
    for segment in path.segments:
        if remaining <= 0.0:
            break
        length = min(segment.length, remaining)
        remaining -= length
        segments.append(RSSegment(segment.steer, segment.direction, length))
    return RSPath(tuple(segments), path.turning_radius, path.word)
