"""Minimal quaternion and rotation helpers (w, x, y, z convention, z-up world)."""

from __future__ import annotations

import math

import numpy as np

WORLD_UP = np.array([0.0, 0.0, 1.0])

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = float(np.linalg.norm(q))
    if n <= 1e-12:
        return IDENTITY.copy()
    return q / n


def multiply(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = float(np.linalg.norm(axis))
    if n <= 1e-12 or angle == 0.0:
        return IDENTITY.copy()
    half = 0.5 * angle
    return np.concatenate(([math.cos(half)], math.sin(half) * axis / n))


def to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix mapping body coordinates to world coordinates."""
    w, x, y, z = normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    return to_matrix(q) @ np.asarray(v, dtype=float)


def up_axis(q: np.ndarray) -> np.ndarray:
    """Torso up-axis (body +z) in world coordinates."""
    return to_matrix(q)[:, 2]


def integrate_angular_velocity(q: np.ndarray, omega_world: np.ndarray, dt: float) -> np.ndarray:
    """Advance orientation by a world-frame angular velocity over dt."""
    w = np.asarray(omega_world, dtype=float)
    angle = float(np.linalg.norm(w)) * dt
    if angle < 1e-12:
        return normalize(q)
    dq = from_axis_angle(w, angle)
    return normalize(multiply(dq, q))


def yaw(q: np.ndarray) -> float:
    """Heading of the body x-axis projected onto the ground plane."""
    fwd = to_matrix(q)[:, 0]
    return math.atan2(fwd[1], fwd[0])


def pitch_roll(q: np.ndarray) -> tuple[float, float]:
    """Intrinsic x-y-z roll and pitch in radians, returned as (pitch, roll)."""
    r = to_matrix(q)
    roll = math.atan2(r[2, 1], r[2, 2])
    pitch = math.atan2(-r[2, 0], math.sqrt(max(1e-12, r[2, 1] ** 2 + r[2, 2] ** 2)))
    return pitch, roll


def yaw_aligned_inverse(q: np.ndarray) -> np.ndarray:
    """Matrix taking world vectors into the torso's yaw-aligned frame.

    The frame shares the torso heading but stays gravity-aligned, so relative
    observations are invariant to pitch and roll.
    """
    h = yaw(q)
    c, s = math.cos(h), math.sin(h)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def tilt_error_axis(up_world: np.ndarray) -> tuple[np.ndarray, float]:
    """Rotation axis and angle bringing the torso up-axis back to vertical.

    Rotating the body about the returned (unit) axis by the returned angle
    restores upright. Degenerates to the world x-axis when the torso points
    straight down.
    """
    up = np.asarray(up_world, dtype=float)
    up = up / max(float(np.linalg.norm(up)), 1e-12)
    axis = np.cross(up, WORLD_UP)
    sin_a = float(np.linalg.norm(axis))
    cos_a = float(np.clip(np.dot(up, WORLD_UP), -1.0, 1.0))
    angle = math.atan2(sin_a, cos_a)
    if sin_a < 1e-9:
        if cos_a > 0.0:
            return np.array([1.0, 0.0, 0.0]), 0.0
        return np.array([1.0, 0.0, 0.0]), math.pi
    return axis / sin_a, angle
