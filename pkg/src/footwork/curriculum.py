"""Progressive attenuation of external assistive forces for recovery training.

Early training props the robot up with an external wrench (upward force plus
a righting torque); the schedule steps the force down as training progresses,
either at fixed step counts or once a windowed mean episode reward clears a
threshold, and always ends at exactly zero.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import rotation

# Righting torque per radian of tilt per newton of assist.
DEFAULT_RIGHTING_GAIN = 0.5


class TriggerKind(enum.Enum):
    STEPS = "steps"  # fires once cumulative env steps reach the threshold
    MEAN_REWARD = "mean_reward"  # fires once windowed mean episode reward clears it


@dataclass(frozen=True)
class StageTrigger:
    kind: TriggerKind
    threshold: float

    def fires(self, steps_elapsed: int, mean_reward: float | None) -> bool:
        if self.kind is TriggerKind.STEPS:
            return steps_elapsed >= self.threshold
        return mean_reward is not None and mean_reward >= self.threshold


@dataclass(frozen=True)
class Stage:
    trigger: StageTrigger
    assist_magnitude: float  # newtons

    def __post_init__(self) -> None:
        if self.assist_magnitude < 0.0:
            raise ValueError("assist_magnitude must be >= 0")


@dataclass(frozen=True)
class CurriculumSchedule:
    """Ordered stages with non-increasing assist ending at exactly zero."""

    stages: tuple[Stage, ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise ValueError("schedule needs at least one stage")
        mags = [s.assist_magnitude for s in self.stages]
        if any(b > a for a, b in zip(mags, mags[1:])):
            raise ValueError("assist magnitudes must be non-increasing")
        if mags[-1] != 0.0:
            raise ValueError("final stage magnitude must be exactly 0")
        step_thresholds = [
            s.trigger.threshold for s in self.stages if s.trigger.kind is TriggerKind.STEPS
        ]
        if any(b <= a for a, b in zip(step_thresholds, step_thresholds[1:])):
            raise ValueError("step triggers must strictly increase")

    @classmethod
    def default(cls, total_steps: int, initial_force: float) -> "CurriculumSchedule":
        """Four stages stepping down at 25%, 37.5%, and 62.5% of the budget."""
        fractions = (0.25, 0.375, 0.625, 1.0)
        magnitudes = (initial_force, 0.6 * initial_force, 0.3 * initial_force, 0.0)
        stages = tuple(
            Stage(
                trigger=StageTrigger(TriggerKind.STEPS, round(f * total_steps)),
                assist_magnitude=m,
            )
            for f, m in zip(fractions, magnitudes)
        )
        return cls(stages=stages)

    @classmethod
    def disabled(cls) -> "CurriculumSchedule":
        return cls(stages=(Stage(StageTrigger(TriggerKind.STEPS, 0), 0.0),))


@dataclass
class AssistState:
    """Training progress the schedule reacts to. The stage index only advances."""

    stage: int = 0
    steps_elapsed: int = 0
    reward_window: deque = field(default_factory=lambda: deque(maxlen=20))

    @property
    def mean_reward(self) -> float | None:
        if not self.reward_window:
            return None
        return math.fsum(self.reward_window) / len(self.reward_window)

    def record_steps(self, n: int) -> None:
        self.steps_elapsed += n

    def record_episode_reward(self, reward: float) -> None:
        self.reward_window.append(reward)


def assist_magnitude(schedule: CurriculumSchedule, state: AssistState) -> float:
    """Current assist force in newtons, advancing stages whose trigger fired.

    Progress may fire several triggers at once (e.g. after a large step jump);
    all of them advance before the magnitude is read. Transitions append to
    the returned state's stage index only, never regress.
    """
    while state.stage < len(schedule.stages) - 1:
        trigger = schedule.stages[state.stage].trigger
        if not trigger.fires(state.steps_elapsed, state.mean_reward):
            break
        state.stage += 1
    return schedule.stages[state.stage].assist_magnitude


@dataclass(frozen=True)
class Wrench:
    """External force and torque applied at the torso center of mass."""

    force: np.ndarray
    torque: np.ndarray

    @classmethod
    def zero(cls) -> "Wrench":
        return cls(force=np.zeros(3), torque=np.zeros(3))


def apply_assist(
    torso_orientation: np.ndarray,
    magnitude: float,
    righting_gain: float = DEFAULT_RIGHTING_GAIN,
) -> Wrench:
    """Assist wrench for the current torso pose.

    Upward force of the given magnitude plus a torque about the tilt-error
    axis proportional to the tilt angle; a pure lifting force cannot reorient
    a lying body, so the torque does the righting.
    """
    if magnitude < 0.0:
        raise ValueError("assist magnitude must be >= 0")
    if magnitude == 0.0:
        return Wrench.zero()
    up = rotation.up_axis(torso_orientation)
    axis, angle = rotation.tilt_error_axis(up)
    force = magnitude * rotation.WORLD_UP
    torque = righting_gain * magnitude * angle * axis
    return Wrench(force=force, torque=torque)
