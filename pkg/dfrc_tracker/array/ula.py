"""Half-wavelength uniform linear array (ULA) model."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ArrayGeometry:
    """
    A half-wavelength ULA.

    Angles are measured from the array axis, in (0, pi).
    """

    n_elements: int

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError(f"Array needs at least one element, got {self.n_elements}")

    def steering(self, theta: float) -> np.ndarray:
        """Steering vector of this array towards `theta`."""
        return steering(self.n_elements, theta)


def _check_count(n: int) -> None:
    if n < 1:
        raise ValueError(f"Element count must be >= 1, got {n}")


def steering(n: int, theta: float) -> np.ndarray:
    """
    Unit-norm steering vector, element k = exp(-j*pi*k*cos(theta)) / sqrt(n).

    Args:
        n: Number of elements.
        theta: Angle from the array axis in radians.

    Returns:
        Complex vector of length n.

    Raises:
        ValueError: If n < 1.
    """
    _check_count(n)
    k = np.arange(n)
    return np.exp(-1j * math.pi * k * math.cos(theta)) / math.sqrt(n)


def steering_derivative(n: int, theta: float) -> np.ndarray:
    """Derivative of `steering` with respect to theta."""
    k = np.arange(n)
    return steering(n, theta) * (1j * math.pi * k * math.sin(theta))


def beam_gain(theta_true: float, theta_beam: float, n: int) -> complex:
    """
    Beamforming gain a^H(theta_true) a(theta_beam).

    The modulus is 1 when cos(theta_true) == cos(theta_beam) and below 1 otherwise.
    """
    _check_count(n)
    k = np.arange(n)
    phase = math.pi * (math.cos(theta_true) - math.cos(theta_beam))
    return complex(np.exp(1j * phase * k).sum() / n)


def beam_gain_derivative(theta_true: float, theta_beam: float, n: int) -> complex:
    """Derivative of `beam_gain` with respect to theta_true."""
    _check_count(n)
    k = np.arange(n)
    phase = math.pi * (math.cos(theta_true) - math.cos(theta_beam))
    terms = (-1j * math.pi * k * math.sin(theta_true)) * np.exp(1j * phase * k)
    return complex(terms.sum() / n)


def array_gain(n_tx: int, n_rx: int) -> float:
    """Array gain factor sqrt(n_tx * n_rx)."""
    if n_tx < 1 or n_rx < 1:
        raise ValueError(f"Element counts must be >= 1, got ({n_tx}, {n_rx})")
    return math.sqrt(n_tx * n_rx)
