"""Whole-body paths: phases of constant contact configuration."""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ...models.plan import PlannerMetrics
from ..reeds_shepp import SE2Pose
from ..robot import WholeBodyState


@dataclass
class PlanPhase:
    """Run of states sharing one contact configuration."""

    duration: float
    contacts: Tuple[bool, ...]
    states: List[WholeBodyState]
    times: List[float]

    @property
    def start(self) -> WholeBodyState:
        return self.states[0]

    @property
    def end(self) -> WholeBodyState:
        return self.states[-1]


@dataclass
class WholeBodyPath:
    start: SE2Pose
    goal: SE2Pose
    phases: List[PlanPhase]
    metrics: PlannerMetrics = field(default_factory=PlannerMetrics)

    def states(self) -> List[WholeBodyState]:
        return [state for phase in self.phases for state in phase.states]

    def times(self) -> List[float]:
        return [t for phase in self.phases for t in phase.times]

    @property
    def duration(self) -> float:
        return float(sum(phase.duration for phase in self.phases))

    def contact_breaks(self) -> int:
        """Limbs lifting off between consecutive phases, summed."""
        breaks = 0
        for before, after in zip(self.phases, self.phases[1:]):
            breaks += sum(1 for a, b in zip(before.contacts, after.contacts) if a and not b)
        return breaks

    def max_contact_change(self) -> int:
        """Largest number of flags changing between consecutive phases."""
        changes = [
            sum(1 for a, b in zip(before.contacts, after.contacts) if a != b)
            for before, after in zip(self.phases, self.phases[1:])
        ]
        return max(changes, default=0)

    def arc_length(self) -> float:
        positions = np.array([state.base_pose.position[:2] for state in self.states()])
        if len(positions) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(positions, axis=0), axis=1).sum())
