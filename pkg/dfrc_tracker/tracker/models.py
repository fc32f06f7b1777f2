"""
State transition and measurement models for the beam tracker.

All models work on real vectors. Complex quantities (beta, echo samples,
pilots) are carried in the interleaved real layout of
`dfrc_tracker.numerics.real_augment_vec`.
"""

import math
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

from dfrc_tracker.array import array_gain, beam_gain, beam_gain_derivative, steering, steering_derivative
from dfrc_tracker.motion import VehicleState, evolve_state
from dfrc_tracker.numerics import real_augment_vec
from dfrc_tracker.propagation import LinkBudget, noise_variances

if TYPE_CHECKING:
    from dfrc_tracker.config import ScenarioConfig


class TransitionModel(ABC):
    """x_n = g(x_{n-1}) + w."""

    state_dim: int

    @abstractmethod
    def g(self, x: np.ndarray, dt: float) -> np.ndarray:
        """Propagate a state vector by dt."""

    @abstractmethod
    def jacobian(self, x: np.ndarray, dt: float) -> np.ndarray:
        """Jacobian of g at x."""


class KinematicTransition(TransitionModel):
    """
    Approximate polar evolution of the vehicle.

    Args:
        with_beta: Track [theta, d, v, Re beta, Im beta] when True,
            [theta, d, v] otherwise.
    """

    def __init__(self, with_beta: bool = True):
        self.with_beta = with_beta
        self.state_dim = 5 if with_beta else 3

    def g(self, x: np.ndarray, dt: float) -> np.ndarray:
        state = VehicleState.from_real(x)
        return evolve_state(state, dt).as_real(self.with_beta)

    def jacobian(self, x: np.ndarray, dt: float) -> np.ndarray:
        return jacobian_g(x, dt)


class LinearTransition(TransitionModel):
    """x_n = F x_{n-1}; dt is ignored."""

    def __init__(self, F: np.ndarray):
        self.F = np.asarray(F, dtype=float)
        self.state_dim = self.F.shape[0]

    def g(self, x: np.ndarray, dt: float) -> np.ndarray:
        return self.F @ x

    def jacobian(self, x: np.ndarray, dt: float) -> np.ndarray:
        return self.F.copy()


def jacobian_g(x: np.ndarray, dt: float) -> np.ndarray:
    """
    Jacobian of the approximate evolution model in the real layout.

    A 5-vector [theta, d, v, Re beta, Im beta] gives a 5x5 matrix; a 3-vector
    [theta, d, v] gives the upper-left 3x3 block.

    Raises:
        ValueError: If d <= 0.
    """
    x = np.asarray(x, dtype=float)
    theta, d, v = x[0], x[1], x[2]
    if d <= 0:
        raise ValueError(f"Distance must be positive, got {d}")

    s, c = math.sin(theta), math.cos(theta)
    scale = 1.0 + v * dt * c / d

    jac = np.eye(x.size)
    jac[0, 0] = scale
    jac[0, 1] = -v * dt * s / d**2
    jac[0, 2] = dt * s / d
    jac[1, 0] = v * dt * s
    jac[1, 2] = -dt * c

    if x.size == 5:
        for row, part in ((3, x[3]), (4, x[4])):
            jac[row, 0] = -part * v * dt * s / d
            jac[row, 1] = -part * v * dt * c / d**2
            jac[row, 2] = part * dt * c / d
            jac[row, row] = scale
    return jac


class MeasurementModel(ABC):
    """y = h(x) + z, z ~ N(0, Q_m(x))."""

    dim: int
    # Rows screened by an innovation gate before the update.
    gated_rows: tuple[int, ...] = ()
    gate: float | None = None

    @abstractmethod
    def h(self, x: np.ndarray) -> np.ndarray:
        """Measurement mean at state x."""

    @abstractmethod
    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Jacobian of h at x."""

    @abstractmethod
    def noise_covariance(self, x: np.ndarray) -> np.ndarray:
        """Measurement noise covariance Q_m evaluated at x."""

    @property
    def track_lost(self) -> bool:
        """Whether the last noise_covariance call hit the track-loss clamp."""
        return False


class LinearMeasurementModel(MeasurementModel):
    """y = H x + z with constant covariance R."""

    def __init__(self, H: np.ndarray, R: np.ndarray):
        self.H = np.asarray(H, dtype=float)
        self.R = np.asarray(R, dtype=float)
        self.dim = self.H.shape[0]

    def h(self, x: np.ndarray) -> np.ndarray:
        return self.H @ x

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return self.H.copy()

    def noise_covariance(self, x: np.ndarray) -> np.ndarray:
        return self.R.copy()


class DfrcMeasurementModel(MeasurementModel):
    """
    Echo-based measurement of the DFRC scheme.

    h(x) = [augment(kappa beta b(theta) a^H(theta) a(theta_beam)), 2 d / c, 2 v cos(theta) fc / c]

    Args:
        n_tx: RSU transmit elements.
        n_rx: RSU receive elements.
        budget: Radar link budget.
        theta_beam: Direction of the transmit beam.
    """

    def __init__(self, n_tx: int, n_rx: int, budget: LinkBudget, theta_beam: float):
        self.n_tx = n_tx
        self.n_rx = n_rx
        self.budget = budget
        self.theta_beam = theta_beam
        self.kappa = array_gain(n_tx, n_rx)
        self.dim = 2 * n_rx + 2
        self._track_lost = False

    def eta(self, theta: float, beta: complex) -> np.ndarray:
        """Noise-free echo vector."""
        delta = beam_gain(theta, self.theta_beam, self.n_tx)
        return self.kappa * beta * delta * steering(self.n_rx, theta)

    def h(self, x: np.ndarray) -> np.ndarray:
        theta, d, v = x[0], x[1], x[2]
        beta = complex(x[3], x[4])
        out = np.empty(self.dim)
        out[:-2] = real_augment_vec(self.eta(theta, beta))
        out[-2] = 2.0 * d / self.budget.c
        out[-1] = 2.0 * v * math.cos(theta) * self.budget.fc / self.budget.c
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return jacobian_h_dfrc(x, self.theta_beam, self.n_tx, self.n_rx, self.budget)

    def noise_covariance(self, x: np.ndarray) -> np.ndarray:
        theta = x[0]
        beta = complex(x[3], x[4])
        delta = beam_gain(theta, self.theta_beam, self.n_tx)
        profile = noise_variances(self.budget, beta, delta, self.kappa)
        self._track_lost = profile.track_lost
        diag = np.full(self.dim, profile.sigma1_sq / 2.0)
        diag[-2] = profile.sigma2_sq
        diag[-1] = profile.sigma3_sq
        return np.diag(diag)

    @property
    def track_lost(self) -> bool:
        return self._track_lost


def jacobian_h_dfrc(
    x: np.ndarray,
    theta_beam: float,
    n_tx: int,
    n_rx: int,
    budget: LinkBudget,
) -> np.ndarray:
    """
    Jacobian of the DFRC measurement mean, (2 n_rx + 2) x 5.

    Echo rows hold interleaved Re/Im parts of d(eta)/d(theta),
    d(eta)/d(Re beta) = eta / beta and d(eta)/d(Im beta) = j eta / beta.
    """
    theta, d, v = x[0], x[1], x[2]
    if d <= 0:
        raise ValueError(f"Distance must be positive, got {d}")
    beta = complex(x[3], x[4])
    kappa = array_gain(n_tx, n_rx)

    delta = beam_gain(theta, theta_beam, n_tx)
    d_delta = beam_gain_derivative(theta, theta_beam, n_tx)
    b = steering(n_rx, theta)
    d_b = steering_derivative(n_rx, theta)

    per_beta = kappa * delta * b
    d_theta = kappa * beta * (d_b * delta + b * d_delta)

    jac = np.zeros((2 * n_rx + 2, 5))
    jac[:-2, 0] = real_augment_vec(d_theta)
    jac[:-2, 3] = real_augment_vec(per_beta)
    jac[:-2, 4] = real_augment_vec(1j * per_beta)
    jac[-2, 1] = 2.0 / budget.c
    jac[-1, 0] = -2.0 * v * math.sin(theta) * budget.fc / budget.c
    jac[-1, 2] = 2.0 * budget.fc * math.cos(theta) / budget.c
    return jac


class FeedbackMeasurementModel(MeasurementModel):
    """
    Pilot-based measurement of the communication-only feedback baseline.

    State is [theta, d, v]. The pilot mean is
    kappa_c alpha w^H u(theta) a^H(theta) a(theta_tx), with w = u(theta_rx).

    Args:
        n_tx: RSU transmit elements.
        m_vehicle: Vehicle array elements.
        budget: Pilot link budget (pilot matched-filter gain, comm noise).
        theta_tx_beam: RSU transmit beam direction.
        theta_rx_beam: Vehicle receive beam direction.
        alpha_ref: Reference channel gain, used when `alpha` is None.
        alpha: Known channel coefficient. When None, the pilot is taken as
            carrier-phase synchronized and alpha = alpha_ref / d is evaluated
            from the state's distance.
        measured_pilot: Received pilot of this epoch. When given, the noise
            covariance uses the beam gain implied by its magnitude instead of
            the gain predicted at the state.
        gate: Chi-square threshold on the pilot rows' innovation; None
            disables gating.
    """

    gated_rows = (0, 1)

    def __init__(
        self,
        n_tx: int,
        m_vehicle: int,
        budget: LinkBudget,
        theta_tx_beam: float,
        theta_rx_beam: float,
        alpha_ref: float,
        alpha: complex | None = None,
        measured_pilot: complex | None = None,
        gate: float | None = None,
    ):
        self.n_tx = n_tx
        self.m_vehicle = m_vehicle
        self.budget = budget
        self.theta_tx_beam = theta_tx_beam
        self.theta_rx_beam = theta_rx_beam
        self.alpha_ref = alpha_ref
        self.alpha = alpha
        self.measured_pilot = measured_pilot
        self.gate = gate
        self.kappa_c = array_gain(n_tx, m_vehicle)
        self.dim = 4
        self._track_lost = False

    def _alpha(self, d: float) -> complex:
        if self.alpha is not None:
            return self.alpha
        if d <= 0:
            raise ValueError(f"Distance must be positive, got {d}")
        return complex(self.alpha_ref / d)

    def _gain(self, theta: float) -> complex:
        rx = beam_gain(theta, self.theta_rx_beam, self.m_vehicle).conjugate()
        tx = beam_gain(theta, self.theta_tx_beam, self.n_tx)
        return rx * tx

    def h(self, x: np.ndarray) -> np.ndarray:
        theta, d, v = x[0], x[1], x[2]
        pilot = self.kappa_c * self._alpha(d) * self._gain(theta)
        return np.array(
            [
                pilot.real,
                pilot.imag,
                2.0 * d / self.budget.c,
                2.0 * v * math.cos(theta) * self.budget.fc / self.budget.c,
            ]
        )

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        theta, d, v = x[0], x[1], x[2]
        if d <= 0:
            raise ValueError(f"Distance must be positive, got {d}")
        alpha = self._alpha(d)

        rx = beam_gain(theta, self.theta_rx_beam, self.m_vehicle).conjugate()
        d_rx = beam_gain_derivative(theta, self.theta_rx_beam, self.m_vehicle).conjugate()
        tx = beam_gain(theta, self.theta_tx_beam, self.n_tx)
        d_tx = beam_gain_derivative(theta, self.theta_tx_beam, self.n_tx)

        d_pilot_theta = self.kappa_c * alpha * (d_rx * tx + rx * d_tx)
        if self.alpha is None:
            d_pilot_d = -self.kappa_c * alpha * rx * tx / d
        else:
            d_pilot_d = 0j

        jac = np.zeros((4, 3))
        jac[0:2, 0] = [d_pilot_theta.real, d_pilot_theta.imag]
        jac[0:2, 1] = [d_pilot_d.real, d_pilot_d.imag]
        jac[2, 1] = 2.0 / self.budget.c
        jac[3, 0] = -2.0 * v * math.sin(theta) * self.budget.fc / self.budget.c
        jac[3, 2] = 2.0 * self.budget.fc * math.cos(theta) / self.budget.c
        return jac

    def beam_gain_at(self, x: np.ndarray) -> complex:
        """Two-sided beam gain used for the noise law at state x."""
        alpha = self._alpha(x[1])
        if self.measured_pilot is not None:
            return complex(abs(self.measured_pilot) / (self.kappa_c * abs(alpha)))
        return self._gain(x[0])

    def noise_covariance(self, x: np.ndarray) -> np.ndarray:
        profile = noise_variances(self.budget, self._alpha(x[1]), self.beam_gain_at(x), self.kappa_c)
        self._track_lost = profile.track_lost
        return np.diag(
            [profile.sigma1_sq / 2.0, profile.sigma1_sq / 2.0, profile.sigma2_sq, profile.sigma3_sq]
        )

    @property
    def track_lost(self) -> bool:
        return self._track_lost


def dfrc_measurement_model(cfg: "ScenarioConfig", theta_beam: float) -> DfrcMeasurementModel:
    """Build the DFRC measurement model for a beam steered to theta_beam."""
    return DfrcMeasurementModel(cfg.n_tx, cfg.n_rx, cfg.radar_budget, theta_beam)


def feedback_measurement_model(
    cfg: "ScenarioConfig",
    theta_tx_beam: float,
    theta_rx_beam: float,
    alpha: complex | None = None,
    measured_pilot: complex | None = None,
) -> FeedbackMeasurementModel:
    """Build the feedback-baseline measurement model for the given beam pair."""
    return FeedbackMeasurementModel(
        cfg.n_tx,
        cfg.m_vehicle,
        cfg.feedback_budget,
        theta_tx_beam,
        theta_rx_beam,
        cfg.alpha_ref,
        alpha=alpha,
        measured_pilot=measured_pilot,
        gate=cfg.pilot_gate,
    )
