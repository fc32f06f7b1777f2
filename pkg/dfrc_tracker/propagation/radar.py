"""Post-matched-filter radar and pilot measurement synthesis."""

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from dfrc_tracker.array import array_gain, steering

if TYPE_CHECKING:
    from dfrc_tracker.motion import VehicleState

logger = logging.getLogger(__name__)

# Below this |delta| the beam has lost the vehicle.
TRACK_LOSS_DELTA = 1e-6
# Delay/Doppler variances are capped at this multiple of their aligned-beam value.
TRACK_LOSS_CEILING = 1e6


@dataclass(frozen=True)
class LinkBudget:
    """Power, noise and calibration constants of one link."""

    p: float
    sigma_sq: float = 1.0
    sigma_c_sq: float = 1.0
    g_mf: float = 10.0
    a1: float = 1.0
    a2: float = 6.7e-7
    a3: float = 2e4
    fc: float = 30e9
    c: float = 3e8

    def __post_init__(self):
        for name in ("p", "sigma_sq", "sigma_c_sq", "g_mf", "fc", "c"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"LinkBudget.{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class NoiseProfile:
    """
    Measurement noise variances.

    sigma1_sq is the variance of one complex echo sample (sigma1_sq / 2 per
    real component); sigma2_sq is in s^2 and sigma3_sq in Hz^2.
    """

    sigma1_sq: float
    sigma2_sq: float
    sigma3_sq: float
    track_lost: bool = False

    def __post_init__(self):
        for name in ("sigma1_sq", "sigma2_sq", "sigma3_sq"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"NoiseProfile.{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class RadarMeasurement:
    """Normalized echo vector, round-trip delay (s) and Doppler shift (Hz)."""

    r_tilde: np.ndarray
    tau: float
    mu: float
    noise: NoiseProfile | None = None


@dataclass(frozen=True)
class PilotMeasurement:
    """Matched-filtered downlink pilot used by the feedback baseline."""

    pilot: complex
    tau: float
    mu: float
    noise: NoiseProfile | None = None


def reflection_coeff(epsilon: complex, d: float) -> complex:
    """Reflection coefficient beta = epsilon / (2 d)."""
    if d <= 0:
        raise ValueError(f"Distance must be positive, got {d}")
    return complex(epsilon) / (2.0 * d)


def noise_variances(
    budget: LinkBudget,
    beta: complex,
    delta: complex,
    kappa: float,
    clamp_track_loss: bool = True,
) -> NoiseProfile:
    """
    Measurement variances, inversely proportional to the receive SNR.

    sigma1^2 = a1^2 sigma^2 / (G p)
    sigma_i^2 = a_i^2 sigma^2 / (G kappa^2 |beta|^2 |delta|^2 p),  i = 2, 3

    Args:
        budget: Link constants.
        beta: Reflection (or channel) coefficient.
        delta: Beamforming gain.
        kappa: Array gain factor.
        clamp_track_loss: Flag track loss when |delta| falls below
            TRACK_LOSS_DELTA instead of raising. Delay/Doppler variances never
            exceed TRACK_LOSS_CEILING times their aligned-beam value.

    Raises:
        ValueError: If beta is zero, or delta is zero and clamping is disabled.
    """
    if abs(beta) == 0:
        raise ValueError("Reflection coefficient is zero; echo carries no information")

    base = budget.sigma_sq / (budget.g_mf * budget.p)
    sigma1_sq = budget.a1**2 * base
    aligned = base / (kappa**2 * abs(beta) ** 2)

    track_lost = abs(delta) < TRACK_LOSS_DELTA
    if track_lost and not clamp_track_loss:
        raise ValueError(f"Beamforming gain {abs(delta):.3e} is zero; track lost")
    # Monotone in |delta| up to the ceiling.
    gain_sq = max(abs(delta) ** 2, 1.0 / TRACK_LOSS_CEILING)
    return NoiseProfile(
        sigma1_sq=sigma1_sq,
        sigma2_sq=budget.a2**2 * aligned / gain_sq,
        sigma3_sq=budget.a3**2 * aligned / gain_sq,
        track_lost=track_lost,
    )


def _complex_noise(rng: np.random.Generator, variance: float, size: int) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def synth_radar_measurement(
    state: "VehicleState",
    f_beam: np.ndarray,
    budget: LinkBudget,
    n_rx: int,
    rng: np.random.Generator | None = None,
) -> RadarMeasurement:
    """
    Synthesize the echo statistics seen by the RSU.

    r = kappa beta b(theta) a^H(theta) f + z_theta
    tau = 2 d / c + z_tau
    mu = 2 v cos(theta) fc / c + z_f

    Noise variances follow `noise_variances` with delta taken from the true
    angle and the transmit beam. When `rng` is None the noise-free mean is
    returned.
    """
    theta, d, v, beta = state.theta, state.d, state.v, state.beta
    f_beam = np.asarray(f_beam, dtype=complex)
    n_tx = f_beam.size
    kappa = array_gain(n_tx, n_rx)
    delta = complex(np.vdot(steering(n_tx, theta), f_beam))

    profile = noise_variances(budget, beta, delta, kappa)
    if profile.track_lost:
        logger.debug("Radar beam lost the vehicle (|delta|=%.3e)", abs(delta))

    r_tilde = kappa * beta * delta * steering(n_rx, theta)
    tau = 2.0 * d / budget.c
    mu = 2.0 * v * math.cos(theta) * budget.fc / budget.c

    if rng is not None:
        r_tilde = r_tilde + _complex_noise(rng, profile.sigma1_sq, n_rx)
        tau += math.sqrt(profile.sigma2_sq) * rng.standard_normal()
        mu += math.sqrt(profile.sigma3_sq) * rng.standard_normal()

    return RadarMeasurement(r_tilde=r_tilde, tau=tau, mu=mu, noise=profile)


def synth_pilot_measurement(
    state: "VehicleState",
    alpha: complex,
    f_beam: np.ndarray,
    w_beam: np.ndarray,
    budget: LinkBudget,
    rng: np.random.Generator | None = None,
) -> PilotMeasurement:
    """
    Synthesize the matched-filtered pilot of the feedback baseline.

    pilot = kappa_c alpha w^H u(theta) a^H(theta) f + z, with kappa_c = sqrt(Nt M).
    Delay and Doppler follow the radar model. `budget` should carry the pilot's
    matched-filter gain and the communication noise variance as sigma_sq.
    """
    theta, d, v = state.theta, state.d, state.v
    f_beam = np.asarray(f_beam, dtype=complex)
    w_beam = np.asarray(w_beam, dtype=complex)
    kappa_c = array_gain(f_beam.size, w_beam.size)
    gain = complex(
        np.vdot(w_beam, steering(w_beam.size, theta))
        * np.vdot(steering(f_beam.size, theta), f_beam)
    )

    profile = noise_variances(budget, alpha, gain, kappa_c)
    pilot = kappa_c * alpha * gain
    tau = 2.0 * d / budget.c
    mu = 2.0 * v * math.cos(theta) * budget.fc / budget.c

    if rng is not None:
        pilot = pilot + complex(_complex_noise(rng, profile.sigma1_sq, 1)[0])
        tau += math.sqrt(profile.sigma2_sq) * rng.standard_normal()
        mu += math.sqrt(profile.sigma3_sq) * rng.standard_normal()

    return PilotMeasurement(pilot=complex(pilot), tau=tau, mu=mu, noise=profile)

