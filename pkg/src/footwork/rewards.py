"""Per-step reward breakdowns for the two task networks.

The recovery reward pays the torso-up dot product and a constant penalty
while fallen (switching to a small action-magnitude penalty once upright).
The soccer reward combines forward progress, goal approach, a posture
penalty, and an action-magnitude penalty. Components are kept separate so
curves can be reconstructed per term from logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# The actuation penalty flips from the constant fallen branch to the
# action-magnitude branch at this up-dot value.
UPRIGHT_DOT_CUTOFF = 0.7
FALLEN_ACTION_PENALTY = -2.0
UPRIGHT_ACTION_COEF = 0.3


@dataclass(frozen=True)
class RewardBreakdown:
    """Named component values; ``total`` is always their exact sum."""

    components: dict[str, float]
    total: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "total", math.fsum(self.components.values()))

    def __getitem__(self, key: str) -> float:
        return self.components[key]


@dataclass(frozen=True)
class FrnRewardInputs:
    """Torso-up dot product with world vertical and the filtered joint actions."""

    up_dot: float
    actions: np.ndarray

    def __post_init__(self) -> None:
        if not (-1.0 <= self.up_dot <= 1.0):
            raise ValueError(f"up_dot must lie in [-1, 1], got {self.up_dot}")
        actions = np.asarray(self.actions, dtype=float)
        if not np.all(np.isfinite(actions)):
            raise ValueError("actions must be finite")
        object.__setattr__(self, "actions", actions)


@dataclass(frozen=True)
class BsknRewardInputs:
    """Kinematic quantities feeding the soccer task reward."""

    forward_speed: float
    goal_distance: float
    goal_distance_max: float
    pitch_deg: float
    roll_deg: float
    actions: np.ndarray

    def __post_init__(self) -> None:
        if self.goal_distance < 0.0:
            raise ValueError("goal_distance must be >= 0")
        if self.goal_distance_max <= 0.0:
            raise ValueError("goal_distance_max must be > 0")
        values = (self.forward_speed, self.goal_distance, self.pitch_deg, self.roll_deg)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("reward inputs must be finite")
        actions = np.asarray(self.actions, dtype=float)
        if not np.all(np.isfinite(actions)):
            raise ValueError("actions must be finite")
        object.__setattr__(self, "actions", actions)


@dataclass(frozen=True)
class RewardCoefficients:
    forward_coef: float = 1.0
    approach_coef: float = 2.0
    stability_coef: float = 0.01  # per degree of |pitch| + |roll|
    efficiency_coef: float = 0.05

    def __post_init__(self) -> None:
        for name in ("forward_coef", "approach_coef", "stability_coef", "efficiency_coef"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


def frn_reward(inputs: FrnRewardInputs) -> RewardBreakdown:
    """Upright reward plus the actuation penalty.

    The penalty is a flat -2 while the up-dot is below the cutoff, otherwise
    linear in total action magnitude, so recovery dominates until upright and
    smoothness takes over afterwards.
    """
    if inputs.up_dot < UPRIGHT_DOT_CUTOFF:
        act = FALLEN_ACTION_PENALTY
    else:
        act = -UPRIGHT_ACTION_COEF * float(np.sum(np.abs(inputs.actions)))
    return RewardBreakdown({"up": inputs.up_dot, "act": act})


def bskn_reward(
    inputs: BsknRewardInputs, coeffs: RewardCoefficients
) -> RewardBreakdown:
    """Progress, approach, stability, and efficiency terms.

    The approach term is deliberately unclamped: beyond ``goal_distance_max``
    it goes negative, preserving the gradient direction far from the goal.
    """
    progress = inputs.forward_speed * coeffs.forward_coef
    approach = coeffs.approach_coef * (1.0 - inputs.goal_distance / inputs.goal_distance_max)
    stability = -coeffs.stability_coef * (abs(inputs.pitch_deg) + abs(inputs.roll_deg))
    efficiency = -coeffs.efficiency_coef * float(np.sum(np.abs(inputs.actions)))
    return RewardBreakdown(
        {
            "progress": progress,
            "approach": approach,
            "stability": stability,
            "efficiency": efficiency,
        }
    )
