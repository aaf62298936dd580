"""Posture classification and debounced dual-network switching.

A 2D posture feature (torso tilt, torso height) classifies each frame as
standing or fallen. The arbiter runs at the control rate and flips the
active network only after the raw classification has disagreed with it for
``debounce_frames`` consecutive frames; each switch starts a short linear
blend between the outgoing and incoming networks' joint commands. The
recovery network additionally sees a zero-padded exteroceptive block.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import observation
from .gait import NUM_JOINTS


class Posture(enum.Enum):
    STANDING = "standing"
    FALLEN = "fallen"


class Network(enum.Enum):
    """The two task policies multiplexed by the arbiter."""

    BSKN = "bskn"  # ball seeking and kicking
    FRN = "frn"  # fall recovery

    @property
    def other(self) -> "Network":
        return Network.FRN if self is Network.BSKN else Network.BSKN


def network_for(posture: Posture) -> Network:
    return Network.FRN if posture is Posture.FALLEN else Network.BSKN


@dataclass(frozen=True)
class PostureFeatures:
    """Tilt of the torso up-axis from world vertical (degrees, [0, 180]) and
    torso height along the world vertical axis (meters)."""

    tilt_deg: float
    height_m: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tilt_deg) and math.isfinite(self.height_m)):
            raise ValueError("posture features must be finite")
        if not (0.0 <= self.tilt_deg <= 180.0):
            raise ValueError(f"tilt_deg must lie in [0, 180], got {self.tilt_deg}")


def features_from_up_axis(up_world: np.ndarray, height_m: float) -> PostureFeatures:
    """Tilt from the torso up-axis expressed in world coordinates."""
    up = np.asarray(up_world, dtype=float)
    cos_tilt = float(np.clip(up[2] / max(np.linalg.norm(up), 1e-12), -1.0, 1.0))
    return PostureFeatures(tilt_deg=math.degrees(math.acos(cos_tilt)), height_m=height_m)


@dataclass(frozen=True)
class ArbiterConfig:
    """Thresholds and timing for the switching state machine.

    ``height_threshold_m`` defaults to the legacy parity value expressed in a
    y-up frame with the field plane well above the origin; environments with
    the ground plane at z=0 should use :meth:`for_standing_height`.
    """

    tilt_threshold_deg: float = 25.0
    height_threshold_m: float = -0.505
    debounce_frames: int = 3
    blend_frames: int = 10

    def __post_init__(self) -> None:
        if not (0.0 < self.tilt_threshold_deg < 90.0):
            raise ValueError("tilt_threshold_deg must lie in (0, 90)")
        if self.debounce_frames < 1:
            raise ValueError("debounce_frames must be >= 1")
        if self.blend_frames < 1:
            raise ValueError("blend_frames must be >= 1")

    @classmethod
    def for_standing_height(cls, standing_height_m: float, **kwargs) -> "ArbiterConfig":
        """Config for a ground-plane-at-zero frame: fallen below 55% of the
        nominal standing torso height."""
        return cls(height_threshold_m=0.55 * standing_height_m, **kwargs)


def classify(features: PostureFeatures, config: ArbiterConfig) -> Posture:
    """Fallen iff tilt exceeds the threshold or height drops below it.

    Both inequalities are strict, so boundary values classify as standing.
    """
    if features.tilt_deg > config.tilt_threshold_deg:
        return Posture.FALLEN
    if features.height_m < config.height_threshold_m:
        return Posture.FALLEN
    return Posture.STANDING


@dataclass(frozen=True)
class ArbiterState:
    """Debounce counter, blend progress, and the currently active network."""

    active: Network = Network.BSKN
    candidate: Network | None = None
    consecutive_count: int = 0
    blend_progress: float = 1.0
    last_outgoing_action: np.ndarray = field(
        default_factory=lambda: np.zeros(NUM_JOINTS)
    )

    @property
    def blending(self) -> bool:
        return self.blend_progress < 1.0


def update(
    state: ArbiterState, raw: Posture, config: ArbiterConfig
) -> tuple[ArbiterState, Network]:
    """Advance the state machine by one control frame.

    Frames where the raw classification agrees with the active network reset
    the disagreement counter; ``debounce_frames`` consecutive disagreements
    flip the active network and restart the command blend at progress 0.
    """
    implied = network_for(raw)
    # Any in-flight blend advances first; a switch this frame restarts it.
    progress = min(1.0, state.blend_progress + 1.0 / config.blend_frames)
    if implied is state.active:
        new = replace(state, candidate=None, consecutive_count=0, blend_progress=progress)
        return new, new.active
    count = state.consecutive_count + 1
    if count >= config.debounce_frames:
        new = replace(
            state,
            active=implied,
            candidate=None,
            consecutive_count=0,
            blend_progress=0.0,
        )
    else:
        new = replace(
            state, candidate=implied, consecutive_count=count, blend_progress=progress
        )
    return new, new.active


def blend_actions(
    outgoing: np.ndarray, incoming: np.ndarray, blend_progress: float
) -> np.ndarray:
    """Linear interpolation from the outgoing to the incoming command."""
    if not (0.0 <= blend_progress <= 1.0):
        raise ValueError(f"blend_progress must lie in [0, 1], got {blend_progress}")
    outgoing = np.asarray(outgoing, dtype=float)
    incoming = np.asarray(incoming, dtype=float)
    return (1.0 - blend_progress) * outgoing + blend_progress * incoming


def mask_observation(obs: np.ndarray, network: Network) -> np.ndarray:
    """Zero the exteroceptive block for the recovery network.

    The ball-seeking network receives the observation unchanged. Always
    returns a copy.
    """
    obs = observation.check_dim(obs)
    masked = obs.copy()
    if network is Network.FRN:
        masked[observation.EXTEROCEPTIVE] = 0.0
    return masked
