"""Downlink LoS channel, receive SNR and achievable rate."""

import cmath
import math
from typing import TYPE_CHECKING

import numpy as np

from dfrc_tracker.array import array_gain, steering
from dfrc_tracker.propagation.radar import LinkBudget

if TYPE_CHECKING:
    from dfrc_tracker.motion import VehicleState


def los_channel(alpha_ref: float, d: float, fc: float, c: float = 3e8) -> complex:
    """
    LoS channel coefficient alpha = (alpha_ref / d) exp(j 2 pi fc d / c).

    Raises:
        ValueError: If d <= 0.
    """
    if d <= 0:
        raise ValueError(f"Distance must be positive, got {d}")
    return (alpha_ref / d) * cmath.exp(1j * 2.0 * math.pi * fc * d / c)


def comm_snr(
    state: "VehicleState",
    f_beam: np.ndarray,
    w_beam: np.ndarray,
    alpha: complex,
    budget: LinkBudget,
    vehicle_elems: int,
) -> float:
    """
    Receive SNR at the vehicle: p |kappa_c alpha w^H u(theta) a^H(theta) f|^2 / sigma_c^2.

    kappa_c = sqrt(Nt M), with Nt taken from the transmit beam length.
    """
    f_beam = np.asarray(f_beam, dtype=complex)
    w_beam = np.asarray(w_beam, dtype=complex)
    if w_beam.size != vehicle_elems:
        raise ValueError(
            f"Receive beam has {w_beam.size} elements, vehicle array has {vehicle_elems}"
        )
    kappa_c = array_gain(f_beam.size, vehicle_elems)
    rx_gain = np.vdot(w_beam, steering(vehicle_elems, state.theta))
    tx_gain = np.vdot(steering(f_beam.size, state.theta), f_beam)
    amplitude = kappa_c * alpha * rx_gain * tx_gain
    return float(budget.p * abs(amplitude) ** 2 / budget.sigma_c_sq)


def rate(snr: float) -> float:
    """Achievable rate log2(1 + snr) in bit/s/Hz."""
    if snr < 0:
        raise ValueError(f"SNR must be non-negative, got {snr}")
    return math.log2(1.0 + snr)


def rate_upper_bound(budget: LinkBudget, alpha: complex, n_tx: int, vehicle_elems: int) -> float:
    """Rate under perfect beam alignment on both ends."""
    return rate(budget.p * n_tx * vehicle_elems * abs(alpha) ** 2 / budget.sigma_c_sq)
