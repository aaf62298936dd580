"""Bipedal soccer control stack: feedforward gait, residual policies,
posture-driven dual-network switching, curriculum-assisted recovery
training, and a reduced-order physics playground."""

__version__ = "0.1.0"
