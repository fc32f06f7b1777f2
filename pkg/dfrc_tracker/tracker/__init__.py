"""Extended Kalman filter for beam prediction and tracking."""

from dfrc_tracker.tracker.ekf import (
    BeamTracker,
    EkfBelief,
    UpdateResult,
    gating_distance,
    kalman_gain,
    predict,
    update,
)
from dfrc_tracker.tracker.models import (
    DfrcMeasurementModel,
    FeedbackMeasurementModel,
    KinematicTransition,
    LinearMeasurementModel,
    LinearTransition,
    MeasurementModel,
    TransitionModel,
    dfrc_measurement_model,
    feedback_measurement_model,
    jacobian_g,
    jacobian_h_dfrc,
)

__all__ = [
    # Filter
    "BeamTracker",
    "EkfBelief",
    "UpdateResult",
    "gating_distance",
    "kalman_gain",
    "predict",
    "update",
    # Models
    "TransitionModel",
    "KinematicTransition",
    "LinearTransition",
    "MeasurementModel",
    "LinearMeasurementModel",
    "DfrcMeasurementModel",
    "FeedbackMeasurementModel",
    "dfrc_measurement_model",
    "feedback_measurement_model",
    "jacobian_g",
    "jacobian_h_dfrc",
]
