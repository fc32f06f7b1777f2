"""Uniform linear array responses and gains."""

from dfrc_tracker.array.ula import (
    ArrayGeometry,
    array_gain,
    beam_gain,
    beam_gain_derivative,
    steering,
    steering_derivative,
)

__all__ = [
    "ArrayGeometry",
    "array_gain",
    "beam_gain",
    "beam_gain_derivative",
    "steering",
    "steering_derivative",
]
