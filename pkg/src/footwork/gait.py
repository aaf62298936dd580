"""Open-loop gait generation: phase clock, alternating swing signals, and
residual superposition onto the feedforward joint trajectory.

The oscillator is time-driven and ignores all sensory feedback. Each joint is
assigned one of two half-cycle swing signals; the left and right legs carry
opposite assignments so the nominal gait alternates. A learned residual is
scaled per joint and added on top of the feedforward target before clamping
to joint limits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

NUM_JOINTS = 10

# Per-leg joint order; left leg occupies indices 0..4, right leg 5..9.
JOINT_NAMES = (
    "l_hip_yaw", "l_hip_roll", "l_hip_pitch", "l_knee", "l_ankle",
    "r_hip_yaw", "r_hip_roll", "r_hip_pitch", "r_knee", "r_ankle",
)

LEFT = slice(0, 5)
RIGHT = slice(5, 10)

DEFAULT_HALF_PERIOD = 30  # steps; 0.3 s half-cycle at 100 Hz
DEFAULT_JOINT_LIMIT = 1.57  # rad, symmetric


class PhaseSignal(enum.Enum):
    """Which of the two alternating swing signals drives a joint."""

    A = "A"
    B = "B"


@dataclass(frozen=True)
class PhaseClock:
    """Integer step position within the gait cycle.

    ``tick`` lives in (0, 2*half_period]; the cycle spans 2*half_period
    simulation steps and ``advance`` wraps past the upper bound back to 1.
    ``half_period`` is fixed for the lifetime of an episode.
    """

    tick: int
    half_period: int = DEFAULT_HALF_PERIOD

    def __post_init__(self) -> None:
        if self.half_period <= 0:
            raise ValueError(f"half_period must be positive, got {self.half_period}")
        if not (0 < self.tick <= 2 * self.half_period):
            raise ValueError(
                f"tick must lie in (0, {2 * self.half_period}], got {self.tick}"
            )

    @classmethod
    def initial(cls, half_period: int = DEFAULT_HALF_PERIOD) -> "PhaseClock":
        """Fresh clock at the cycle boundary (phase encoding [0, 1])."""
        return cls(tick=2 * half_period, half_period=half_period)


def advance(clock: PhaseClock) -> PhaseClock:
    """Step the clock forward by one simulation step, wrapping at cycle end."""
    tick = clock.tick + 1
    if tick > 2 * clock.half_period:
        tick = 1
    return PhaseClock(tick=tick, half_period=clock.half_period)


def oscillator_signal(clock: PhaseClock, which: PhaseSignal) -> float:
    """Normalized swing signal in [0, 1] for the given phase assignment.

    Signal A is a raised-cosine bump over the first half-cycle and zero over
    the second; signal B is the same shape shifted by half_period, so exactly
    one of the two is nonzero away from the half-cycle boundaries.
    """
    t = clock.tick
    t1 = clock.half_period
    if which is PhaseSignal.B:
        # Shift by one half-period, re-wrapped into (0, 2*t1].
        t = t - t1 if t > t1 else t + t1
    if t <= t1:
        return (1.0 - math.cos(2.0 * math.pi * t / t1)) / 2.0
    return 0.0


def phase_encoding(clock: PhaseClock) -> np.ndarray:
    """Continuous harmonic encoding [sin(pi*t/T1), cos(pi*t/T1)] of the clock.

    Has unit norm everywhere and is continuous across the wrap point, so the
    policy sees no temporal discontinuity at cycle boundaries.
    """
    angle = math.pi * clock.tick / clock.half_period
    return np.array([math.sin(angle), math.cos(angle)])


def _default_phase_assignment() -> tuple[PhaseSignal, ...]:
    return (PhaseSignal.A,) * 5 + (PhaseSignal.B,) * 5


@dataclass
class GaitProfile:
    """Per-joint feedforward parameters and residual gains.

    ``base_offset`` is the static posture, ``swing_amplitude`` scales the
    oscillator signal (zero for joints not driven by the rhythm), and
    ``residual_gain`` scales the policy residual. Left/right joints of the
    same kind must carry opposite phase assignments.
    """

    base_offset: np.ndarray
    swing_amplitude: np.ndarray
    residual_gain: np.ndarray
    phase_assignment: tuple[PhaseSignal, ...] = field(
        default_factory=_default_phase_assignment
    )
    joint_limit: float = DEFAULT_JOINT_LIMIT

    def __post_init__(self) -> None:
        self.base_offset = np.asarray(self.base_offset, dtype=float)
        self.swing_amplitude = np.asarray(self.swing_amplitude, dtype=float)
        self.residual_gain = np.asarray(self.residual_gain, dtype=float)
        for name in ("base_offset", "swing_amplitude", "residual_gain"):
            arr = getattr(self, name)
            if arr.shape != (NUM_JOINTS,):
                raise ValueError(f"{name} must have shape ({NUM_JOINTS},), got {arr.shape}")
        if len(self.phase_assignment) != NUM_JOINTS:
            raise ValueError("phase_assignment must label all joints")
        if np.any(self.residual_gain < 0.0):
            raise ValueError("residual_gain must be non-negative")
        for i in range(5):
            if self.phase_assignment[i] is self.phase_assignment[i + 5]:
                raise ValueError(
                    f"left/right {JOINT_NAMES[i][2:]} must have opposite phase labels"
                )

    @classmethod
    def default(cls) -> "GaitProfile":
        """Minimal stepping rhythm: hip pitch and knee oscillate, the rest are
        posture plus residual only."""
        base = np.zeros(NUM_JOINTS)
        swing = np.zeros(NUM_JOINTS)
        gain = np.zeros(NUM_JOINTS)
        for leg in (LEFT, RIGHT):
            yaw, roll, hip, knee, ankle = range(leg.start, leg.stop)
            base[hip], base[knee], base[ankle] = -0.10, 0.20, -0.10
            swing[hip], swing[knee] = 0.25, 0.30
            gain[yaw], gain[roll] = 0.6, 0.8
            gain[hip], gain[knee] = 1.2, 1.2
            gain[ankle] = 0.8
        return cls(base_offset=base, swing_amplitude=swing, residual_gain=gain)


@dataclass(frozen=True)
class JointTargets:
    """Clamped per-joint target angles handed to the joint servos."""

    angles: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.angles, dtype=float)
        if arr.shape != (NUM_JOINTS,):
            raise ValueError(f"expected {NUM_JOINTS} joint targets, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("joint targets must be finite")
        object.__setattr__(self, "angles", arr)


def feedforward_targets(profile: GaitProfile, clock: PhaseClock) -> np.ndarray:
    """Pure oscillator trajectory: swing_amplitude * signal + base_offset."""
    signal_a = oscillator_signal(clock, PhaseSignal.A)
    signal_b = oscillator_signal(clock, PhaseSignal.B)
    signals = np.array(
        [signal_a if p is PhaseSignal.A else signal_b for p in profile.phase_assignment]
    )
    return profile.swing_amplitude * signals + profile.base_offset


def superpose(
    profile: GaitProfile, clock: PhaseClock, residual: np.ndarray
) -> JointTargets:
    """Add the scaled residual to the feedforward trajectory and clamp.

    The residual is expected pre-squashed to [-1, 1] by the caller; any finite
    values are accepted, non-finite values are rejected.
    """
    residual = np.asarray(residual, dtype=float)
    if residual.shape != (NUM_JOINTS,):
        raise ValueError(f"residual must have shape ({NUM_JOINTS},), got {residual.shape}")
    if not np.all(np.isfinite(residual)):
        raise ValueError("residual contains non-finite values")
    raw = feedforward_targets(profile, clock) + profile.residual_gain * residual
    clamped = np.clip(raw, -profile.joint_limit, profile.joint_limit)
    return JointTargets(angles=clamped)
