"""Single-trial epoch loop: predict, beamform, measure, track."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from dfrc_tracker.array import steering
from dfrc_tracker.config import ScenarioConfig
from dfrc_tracker.errors import FilterDivergence
from dfrc_tracker.motion import evolve_state, pose_from_polar, pose_to_state, truth_step
from dfrc_tracker.numerics import min_eigenvalue_ok, real_augment_vec
from dfrc_tracker.propagation import (
    comm_snr,
    los_channel,
    rate,
    rate_upper_bound,
    synth_pilot_measurement,
    synth_radar_measurement,
)
from dfrc_tracker.tracker import (
    BeamTracker,
    EkfBelief,
    dfrc_measurement_model,
    feedback_measurement_model,
)

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    """
    One epoch of one trial for one scheme.

    theta_pred2_deg is the two-step prediction the vehicle's receive beam
    uses at this epoch (made one epoch earlier). abs_delta is the transmit
    beamforming gain |a^H(theta) f| against the true angle.
    """

    epoch: int
    t_s: float
    scheme: str
    trial: int
    theta_true_deg: float
    theta_pred1_deg: float
    theta_pred2_deg: float
    theta_est_deg: float
    d_true_m: float
    d_est_m: float
    v_true_mps: float
    v_est_mps: float
    abs_delta: float
    rate_bpshz: float
    clamped: bool = False
    track_lost: bool = False

    @property
    def abs_error_deg(self) -> float:
        return abs(self.theta_est_deg - self.theta_true_deg)


@dataclass
class TrialResult:
    """Records of one trial plus its health flags."""

    scheme: str
    trial: int
    seed: int
    records: list[EpochRecord] = field(default_factory=list)
    diverged: bool = False
    covariance_ok: bool = True
    rate_bound_ok: bool = True
    # Updates whose pilot rows were rejected by the innovation gate.
    gated_updates: int = 0


class _Truth:
    """Ground-truth vehicle under the configured truth model."""

    def __init__(self, cfg: ScenarioConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.epsilon = cfg.epsilon
        if cfg.truth_model == "exact":
            self.pose = pose_from_polar(cfg.theta0, cfg.d0, cfg.v0)
            self.state = pose_to_state(self.pose, self.epsilon)
        else:
            self.pose = None
            self.state = cfg.initial_state()

    def advance(self) -> None:
        if self.pose is not None:
            self.pose = truth_step(self.pose, self.cfg.dt)
            self.state = pose_to_state(self.pose, self.epsilon)
            return
        noise = self.cfg.process_noise.draw(self.rng) if self.cfg.truth_process_noise else None
        self.state = evolve_state(self.state, self.cfg.dt, noise)


def run_trial(cfg: ScenarioConfig, scheme: str, trial_seed: int, trial_index: int = 0) -> TrialResult:
    """
    Run one trial of one scheme.

    Epoch 0 is the initialization epoch: the belief is the configured initial
    state and both beams point at it. From epoch 1 on, each epoch predicts,
    steers the RSU beam to the one-step angle and the vehicle beam to the
    two-step angle from the previous epoch, measures, updates and evaluates
    the achievable rate on the true channel.

    Deterministic given (cfg, scheme, trial_seed). A diverged filter ends the
    trial early; the records produced so far are kept.

    Args:
        cfg: Scenario configuration.
        scheme: "dfrc" or "feedback".
        trial_seed: Seed of this trial's random stream.
        trial_index: Trial number written to the records.
    """
    if scheme not in ("dfrc", "feedback"):
        raise ValueError(f"Unknown scheme: {scheme}")

    rng = np.random.default_rng(trial_seed)
    meas_rng = rng if cfg.measurement_noise else None
    with_beta = scheme == "dfrc"

    truth = _Truth(cfg, rng)
    tracker = BeamTracker(
        EkfBelief(cfg.initial_state().as_real(with_beta), cfg.m0(with_beta)),
        cfg.process_noise.covariance(with_beta),
        cfg.dt,
        cond_cap=cfg.cond_cap,
    )
    result = TrialResult(scheme=scheme, trial=trial_index, seed=trial_seed)
    radar_budget = cfg.radar_budget
    feedback_budget = cfg.feedback_budget

    theta_one = tracker.belief.theta
    theta_rx = cfg.theta0
    pending_two_step = cfg.theta0

    for epoch in range(cfg.epochs):
        state = truth.state
        clamped = track_lost = False

        if epoch > 0:
            try:
                theta_one, theta_two = tracker.predict()
                theta_rx, pending_two_step = pending_two_step, theta_two
            except FilterDivergence as e:
                logger.warning("%s trial %d diverged at epoch %d: %s", scheme, trial_index, epoch, e)
                result.diverged = True
                break

        f_beam = steering(cfg.n_tx, theta_one)
        w_beam = steering(cfg.m_vehicle, theta_rx)
        alpha = los_channel(cfg.alpha_ref, state.d, cfg.fc, cfg.c)

        if epoch > 0:
            if scheme == "dfrc":
                meas = synth_radar_measurement(state, f_beam, radar_budget, cfg.n_rx, meas_rng)
                y = np.concatenate([real_augment_vec(meas.r_tilde), [meas.tau, meas.mu]])
                model = dfrc_measurement_model(cfg, theta_one)
            else:
                known = cfg.feedback_alpha == "known"
                # Without a known channel the vehicle strips the carrier phase.
                pilot_alpha = alpha if known else complex(abs(alpha))
                meas = synth_pilot_measurement(state, pilot_alpha, f_beam, w_beam, feedback_budget, meas_rng)
                y = np.concatenate([real_augment_vec([meas.pilot]), [meas.tau, meas.mu]])
                model = feedback_measurement_model(
                    cfg, theta_one, theta_rx, pilot_alpha if known else None, measured_pilot=meas.pilot
                )
            try:
                flags = tracker.update(y, model)
            except FilterDivergence as e:
                logger.warning("%s trial %d diverged at epoch %d: %s", scheme, trial_index, epoch, e)
                result.diverged = True
                break
            clamped = flags.clamped
            track_lost = flags.track_lost or meas.noise.track_lost
            result.gated_updates += flags.gated
            if not min_eigenvalue_ok(tracker.belief.M):
                result.covariance_ok = False

        snr = comm_snr(state, f_beam, w_beam, alpha, radar_budget, cfg.m_vehicle)
        epoch_rate = rate(snr)
        if epoch_rate > rate_upper_bound(radar_budget, alpha, cfg.n_tx, cfg.m_vehicle) + 1e-9:
            result.rate_bound_ok = False
            logger.error("Rate %.6f exceeds the aligned-beam bound at epoch %d", epoch_rate, epoch)

        estimate = tracker.belief.x_hat
        result.records.append(
            EpochRecord(
                epoch=epoch,
                t_s=epoch * cfg.dt,
                scheme=scheme,
                trial=trial_index,
                theta_true_deg=math.degrees(state.theta),
                theta_pred1_deg=math.degrees(theta_one),
                theta_pred2_deg=math.degrees(theta_rx),
                theta_est_deg=math.degrees(estimate[0]),
                d_true_m=state.d,
                d_est_m=float(estimate[1]),
                v_true_mps=state.v,
                v_est_mps=float(estimate[2]),
                abs_delta=float(abs(np.vdot(steering(cfg.n_tx, state.theta), f_beam))),
                rate_bpshz=epoch_rate,
                clamped=clamped,
                track_lost=track_lost,
            )
        )

        truth.advance()
        if not truth.state.is_valid():
            logger.info("Vehicle left the modelled domain after epoch %d", epoch)
            break

    return result
