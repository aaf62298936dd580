"""Fixed 58-slot observation layout shared by both task networks.

Slots 0..41 are proprioceptive (joint state, previous residuals, torso
kinematics, gait phase); slots 42..57 are exteroceptive (ball, goal,
opponent) and are zero-padded for the recovery network so both networks can
share identical tensor shapes. Relative vectors are expressed in the torso's
yaw-aligned frame.
"""

from __future__ import annotations

import numpy as np

OBS_DIM = 58

JOINT_ANGLES = slice(0, 10)
JOINT_VELOCITIES = slice(10, 20)
PREV_RESIDUAL = slice(20, 30)
TORSO_UP = slice(30, 33)
TORSO_ANG_VEL = slice(33, 36)
TORSO_LIN_VEL = slice(36, 39)
TORSO_HEIGHT = 39
PHASE = slice(40, 42)
BALL_POS = slice(42, 45)
BALL_VEL = slice(45, 48)
GOAL_POS = slice(48, 51)
OPPONENT_POS = slice(51, 54)
BALL_TO_GOAL = slice(54, 57)
GOAL_DISTANCE = 57

# Everything the recovery network must not see.
EXTEROCEPTIVE = slice(42, 58)


def check_dim(obs: np.ndarray) -> np.ndarray:
    obs = np.asarray(obs, dtype=float)
    if obs.shape != (OBS_DIM,):
        raise ValueError(f"observation must have shape ({OBS_DIM},), got {obs.shape}")
    return obs
