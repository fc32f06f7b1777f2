"""Extended Kalman filter recursion and the per-trial beam tracker."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from dfrc_tracker.errors import FilterDivergence, SingularMatrixError
from dfrc_tracker.numerics import DEFAULT_COND_CAP, invert, symmetrize
from dfrc_tracker.tracker.models import KinematicTransition, MeasurementModel, TransitionModel

logger = logging.getLogger(__name__)

THETA_MIN = 1e-3
THETA_MAX = math.pi - 1e-3
# Floor of the distance estimate, metres.
D_MIN = 1.0


@dataclass
class EkfBelief:
    """State estimate and its MSE matrix."""

    x_hat: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        self.x_hat = np.asarray(self.x_hat, dtype=float)
        self.M = np.asarray(self.M, dtype=float)
        n = self.x_hat.size
        if self.M.shape != (n, n):
            raise ValueError(f"MSE matrix shape {self.M.shape} does not match state dim {n}")

    @property
    def theta(self) -> float:
        return float(self.x_hat[0])


def predict(
    belief: EkfBelief,
    dt: float,
    Q_s: np.ndarray,
    transition: TransitionModel | None = None,
) -> tuple[EkfBelief, np.ndarray]:
    """
    One- and two-step prediction.

    Returns:
        Tuple of (one-step belief with M = G M G^T + Q_s, two-step state).
        The two-step prediction carries no covariance.
    """
    if transition is None:
        transition = KinematicTransition(with_beta=belief.x_hat.size == 5)
    G = transition.jacobian(belief.x_hat, dt)
    x_one = transition.g(belief.x_hat, dt)
    M_one = symmetrize(G @ belief.M @ G.T + Q_s)
    x_two = transition.g(x_one, dt)
    return EkfBelief(x_one, M_one), x_two


def kalman_gain(
    M_pred: np.ndarray,
    H: np.ndarray,
    Q_m: np.ndarray,
    cond_cap: float = DEFAULT_COND_CAP,
) -> np.ndarray:
    """
    K = M H^T (Q_m + H M H^T)^-1.

    The innovation covariance is scaled to unit measurement-noise variance
    before inversion and unscaled afterwards.

    Raises:
        SingularMatrixError: If the scaled innovation covariance is ill-conditioned.
    """
    S = Q_m + H @ M_pred @ H.T
    noise_diag = np.diag(Q_m)
    if np.any(noise_diag <= 0):
        scale = np.ones_like(noise_diag)
    else:
        scale = 1.0 / np.sqrt(noise_diag)
    S_scaled = scale[:, None] * S * scale[None, :]
    S_inv = scale[:, None] * invert(S_scaled, cond_cap) * scale[None, :]
    return M_pred @ H.T @ S_inv


def gating_distance(
    belief_pred: EkfBelief,
    y: np.ndarray,
    model: MeasurementModel,
    rows: Sequence[int],
    cond_cap: float = DEFAULT_COND_CAP,
) -> float:
    """
    Squared Mahalanobis distance of the innovation restricted to `rows`.

    Chi-square distributed with len(rows) degrees of freedom when the model
    is consistent.
    """
    rows = list(rows)
    x_pred = belief_pred.x_hat
    H = model.jacobian(x_pred)[rows]
    Q_m = model.noise_covariance(x_pred)[np.ix_(rows, rows)]
    nu = (np.asarray(y, dtype=float) - model.h(x_pred))[rows]
    S = symmetrize(H @ belief_pred.M @ H.T + Q_m)
    return float(nu @ invert(S, cond_cap) @ nu)


def update(
    belief_pred: EkfBelief,
    y: np.ndarray,
    model: MeasurementModel,
    cond_cap: float = DEFAULT_COND_CAP,
    rows: Sequence[int] | None = None,
) -> EkfBelief:
    """
    Measurement update.

    x = x_pred + K (y - h(x_pred)),  M = sym((I - K H) M_pred)

    When `rows` is given only those measurement entries are used.

    Raises:
        ValueError: If y does not match the model dimension.
        SingularMatrixError: If the innovation covariance cannot be inverted.
    """
    y = np.asarray(y, dtype=float)
    if y.size != model.dim:
        raise ValueError(f"Measurement has {y.size} entries, model expects {model.dim}")

    x_pred = belief_pred.x_hat
    H = model.jacobian(x_pred)
    Q_m = model.noise_covariance(x_pred)
    nu = y - model.h(x_pred)
    if rows is not None:
        rows = list(rows)
        H, Q_m, nu = H[rows], Q_m[np.ix_(rows, rows)], nu[rows]
    K = kalman_gain(belief_pred.M, H, Q_m, cond_cap)

    x_hat = x_pred + K @ nu
    M = symmetrize((np.eye(x_pred.size) - K @ H) @ belief_pred.M)
    return EkfBelief(x_hat, M)


@dataclass
class UpdateResult:
    """Flags raised by one tracker update."""

    clamped: bool
    track_lost: bool
    gated: bool = False


class BeamTracker:
    """
    One filter instance for one trial.

    Keeps the current belief and the latest predictions. Not thread-safe;
    use one instance per trial. Angle and distance estimates that leave the
    modelled domain are clamped and flagged; only a non-finite state or a
    singular update counts as divergence.

    Args:
        belief: Initial belief.
        Q_s: Real-augmented process noise covariance.
        dt: Block duration in seconds.
        cond_cap: Condition cap for the innovation covariance.
        transition: State transition model, kinematic by default.
    """

    def __init__(
        self,
        belief: EkfBelief,
        Q_s: np.ndarray,
        dt: float,
        cond_cap: float = DEFAULT_COND_CAP,
        transition: TransitionModel | None = None,
    ):
        self.belief = belief
        self.Q_s = np.asarray(Q_s, dtype=float)
        self.dt = dt
        self.cond_cap = cond_cap
        self.transition = transition or KinematicTransition(with_beta=belief.x_hat.size == 5)
        self._predicted: EkfBelief | None = None
        self._two_step: np.ndarray | None = None

    def predict(self) -> tuple[float, float]:
        """
        Run one- and two-step prediction from the current belief.

        Returns:
            Tuple of (one-step angle, two-step angle) in radians.
        """
        try:
            self._predicted, self._two_step = predict(
                self.belief, self.dt, self.Q_s, self.transition
            )
        except ValueError as e:
            raise FilterDivergence(f"Prediction failed: {e}") from e
        self._check_finite(self._predicted.x_hat, "prediction")
        return self._predicted.theta, float(self._two_step[0])

    def update(self, y: np.ndarray, model: MeasurementModel) -> UpdateResult:
        """Refine the last prediction with measurement y."""
        if self._predicted is None:
            raise RuntimeError("update() called before predict()")
        try:
            rows, gated = self._gate(y, model)
            belief = update(self._predicted, y, model, self.cond_cap, rows)
        except (ValueError, SingularMatrixError) as e:
            raise FilterDivergence(f"Update failed: {e}") from e
        self._check_finite(belief.x_hat, "update")

        clamped = False
        theta = belief.x_hat[0]
        if not THETA_MIN <= theta <= THETA_MAX:
            belief.x_hat[0] = min(max(theta, THETA_MIN), THETA_MAX)
            clamped = True
            logger.debug("Clamped angle estimate %.6f rad", theta)
        d = belief.x_hat[1]
        if d < D_MIN:
            belief.x_hat[1] = D_MIN
            clamped = True
            logger.debug("Clamped distance estimate %.3f m", d)

        self.belief = belief
        self._predicted = None
        return UpdateResult(clamped=clamped, track_lost=model.track_lost, gated=gated)

    def _gate(self, y: np.ndarray, model: MeasurementModel) -> tuple[list[int] | None, bool]:
        if model.gate is None or not model.gated_rows:
            return None, False
        distance = gating_distance(self._predicted, y, model, model.gated_rows, self.cond_cap)
        if distance <= model.gate:
            return None, False
        logger.debug("Gated rows %s (distance %.2f > %.2f)", model.gated_rows, distance, model.gate)
        return [i for i in range(model.dim) if i not in model.gated_rows], True

    @staticmethod
    def _check_finite(x: np.ndarray, stage: str) -> None:
        if not np.all(np.isfinite(x)):
            raise FilterDivergence(f"Non-finite state after {stage}")
