"""Radar measurement synthesis and downlink link evaluation."""

from dfrc_tracker.propagation.link import (
    comm_snr,
    los_channel,
    rate,
    rate_upper_bound,
)
from dfrc_tracker.propagation.radar import (
    TRACK_LOSS_CEILING,
    TRACK_LOSS_DELTA,
    LinkBudget,
    NoiseProfile,
    PilotMeasurement,
    RadarMeasurement,
    noise_variances,
    reflection_coeff,
    synth_pilot_measurement,
    synth_radar_measurement,
)

__all__ = [
    # Radar
    "LinkBudget",
    "NoiseProfile",
    "RadarMeasurement",
    "PilotMeasurement",
    "TRACK_LOSS_CEILING",
    "TRACK_LOSS_DELTA",
    "reflection_coeff",
    "noise_variances",
    "synth_radar_measurement",
    "synth_pilot_measurement",
    # Link
    "los_channel",
    "comm_snr",
    "rate",
    "rate_upper_bound",
]
