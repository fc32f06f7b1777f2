"""Vehicle ground truth and state evolution."""

from dfrc_tracker.motion.kinematics import (
    ProcessNoise,
    TruthPose,
    VehicleState,
    evolve_state,
    pose_from_polar,
    pose_to_state,
    truth_step,
)

__all__ = [
    "ProcessNoise",
    "TruthPose",
    "VehicleState",
    "evolve_state",
    "pose_from_polar",
    "pose_to_state",
    "truth_step",
]
