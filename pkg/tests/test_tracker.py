import math

import numpy as np
import pytest

from dfrc_tracker.errors import FilterDivergence, SingularMatrixError
from dfrc_tracker.numerics import invert, is_symmetric, min_eigenvalue_ok
from dfrc_tracker.propagation import LinkBudget, los_channel
from dfrc_tracker.tracker import (
    BeamTracker,
    DfrcMeasurementModel,
    EkfBelief,
    FeedbackMeasurementModel,
    KinematicTransition,
    LinearMeasurementModel,
    LinearTransition,
    dfrc_measurement_model,
    feedback_measurement_model,
    gating_distance,
    jacobian_g,
    jacobian_h_dfrc,
    kalman_gain,
    predict,
    update,
)
from dfrc_tracker.tracker.ekf import D_MIN, THETA_MIN

DT = 0.02
BUDGET = LinkBudget(p=10.0)


def central_difference(fn, x, steps):
    """Jacobian of fn at x by central differences, one step size per coordinate."""
    x = np.asarray(x, dtype=float)
    columns = []
    for i, h in enumerate(steps):
        e = np.zeros_like(x)
        e[i] = h
        columns.append((fn(x + e) - fn(x - e)) / (2 * h))
    return np.stack(columns, axis=1)


def assert_jacobian_close(analytic, numeric, rtol=1e-5):
    # Per-row absolute floor: rows differ by many orders of magnitude.
    floor = 1e-7 * np.abs(numeric).max(axis=1, keepdims=True)
    assert np.all(np.abs(analytic - numeric) <= floor + rtol * np.abs(numeric))


def random_states(rng, n=100):
    theta = rng.uniform(0.1, math.pi - 0.1, n)
    d = rng.uniform(5.0, 80.0, n)
    v = rng.uniform(0.0, 30.0, n)
    beta = rng.uniform(-1.0, 1.0, (n, 2))
    return np.column_stack([theta, d, v, beta])


class TestTransitionJacobian:
    def test_finite_difference(self, rng):
        transition = KinematicTransition()
        for x in random_states(rng):
            steps = 1e-6 * np.maximum(1.0, np.abs(x))
            numeric = central_difference(lambda s: transition.g(s, DT), x, steps)
            assert_jacobian_close(jacobian_g(x, DT), numeric)

    def test_standing_vehicle(self):
        theta, d = 0.6, 20.0
        jac = jacobian_g(np.array([theta, d, 0.0, 0.3, -0.2]), DT)
        np.testing.assert_allclose(np.diag(jac), np.ones(5))
        assert jac[0, 2] == pytest.approx(DT * math.sin(theta) / d)
        assert jac[1, 2] == pytest.approx(-DT * math.cos(theta))

    def test_reference_entry(self):
        x = np.array([math.radians(9.2), 25.0, 18.0, math.sqrt(2) / 2, math.sqrt(2) / 2])
        assert jacobian_g(x, DT)[0, 0] == pytest.approx(1.0142148, abs=1e-7)

    def test_feedback_state_block(self):
        x5 = np.array([0.8, 30.0, 12.0, 0.5, 0.5])
        np.testing.assert_array_equal(jacobian_g(x5[:3], DT), jacobian_g(x5, DT)[:3, :3])

    def test_non_positive_distance(self):
        with pytest.raises(ValueError):
            jacobian_g(np.array([0.5, 0.0, 1.0]), DT)


class TestDfrcMeasurementModel:
    def test_jacobian_finite_difference(self, rng):
        for x in random_states(rng):
            theta_beam = x[0] + rng.normal(0.0, 0.01)
            model = DfrcMeasurementModel(16, 16, BUDGET, theta_beam)
            steps = 1e-6 * np.maximum(1.0, np.abs(x))
            numeric = central_difference(model.h, x, steps)
            assert_jacobian_close(model.jacobian(x), numeric)

    def test_delay_row(self):
        x = np.array([0.5, 25.0, 18.0, 0.7, 0.7])
        jac = jacobian_h_dfrc(x, 0.5, 64, 64, BUDGET)
        assert jac[-2, 1] == pytest.approx(6.6667e-9, rel=1e-4)
        assert np.count_nonzero(jac[-2]) == 1

    def test_broadside_doppler_row(self):
        v = 18.0
        jac = jacobian_h_dfrc(np.array([math.pi / 2, 10.0, v, 0.7, 0.7]), math.pi / 2, 8, 8, BUDGET)
        assert jac[-1, 2] == pytest.approx(0.0, abs=1e-9)
        assert jac[-1, 0] == pytest.approx(-2 * v * 30e9 / 3e8)

    def test_single_receive_element_echo(self):
        beta = 0.3 + 0.4j
        model = DfrcMeasurementModel(64, 1, BUDGET, 0.9)
        y = model.h(np.array([0.9, 25.0, 18.0, beta.real, beta.imag]))
        assert y[0] == pytest.approx(8 * beta.real)
        assert y[1] == pytest.approx(8 * beta.imag)

    def test_dimension_and_noise(self, cfg):
        model = dfrc_measurement_model(cfg, cfg.theta0)
        assert model.dim == 2 * 64 + 2
        q = model.noise_covariance(cfg.initial_state().as_real())
        assert q.shape == (130, 130)
        assert np.trace(q[:-2, :-2]) == pytest.approx(0.64)
        assert q[-2, -2] == pytest.approx((6.7e-7) ** 2 / 409600)
        assert q[-1, -1] == pytest.approx(976.5625)
        assert not model.track_lost


class TestFeedbackMeasurementModel:
    def test_dimension_and_alignment(self, cfg):
        alpha = los_channel(cfg.alpha_ref, cfg.d0, cfg.fc)
        model = feedback_measurement_model(cfg, cfg.theta0, cfg.theta0, alpha)
        assert model.dim == 4
        y = model.h(cfg.initial_state().as_real(with_beta=False))
        pilot = complex(y[0], y[1])
        assert pilot == pytest.approx(64 * alpha, rel=1e-12)
        assert np.diag(model.noise_covariance(np.array([cfg.theta0, cfg.d0, cfg.v0])))[0] == pytest.approx(0.05)

    def test_belief_alpha_is_phase_free(self, cfg):
        model = feedback_measurement_model(cfg, cfg.theta0, cfg.theta0)
        y = model.h(np.array([cfg.theta0, 50.0, cfg.v0]))
        assert complex(y[0], y[1]) == pytest.approx(64 * 0.5, rel=1e-12)

    @pytest.mark.parametrize("known_alpha", [True, False])
    def test_jacobian_finite_difference(self, rng, known_alpha):
        for x in random_states(rng, n=30)[:, :3]:
            alpha = los_channel(25.0, x[1], 30e9) if known_alpha else None
            model = FeedbackMeasurementModel(16, 16, BUDGET, x[0] + 0.01, x[0] - 0.02, 25.0, alpha=alpha)
            steps = 1e-6 * np.maximum(1.0, np.abs(x))
            numeric = central_difference(model.h, x, steps)
            assert_jacobian_close(model.jacobian(x), numeric)

    def test_measured_pilot_sets_noise_level(self, cfg):
        x = np.array([cfg.theta0, cfg.d0, cfg.v0])
        predicted = feedback_measurement_model(cfg, cfg.theta0, cfg.theta0)
        pilot = complex(*predicted.h(x)[:2])
        faded = feedback_measurement_model(cfg, cfg.theta0, cfg.theta0, measured_pilot=0.1 * pilot)
        q_aligned = np.diag(predicted.noise_covariance(x))
        q_faded = np.diag(faded.noise_covariance(x))
        assert q_faded[0] == pytest.approx(q_aligned[0])
        np.testing.assert_allclose(q_faded[2:], 100.0 * q_aligned[2:], rtol=1e-9)

    def test_gate_from_config(self, cfg):
        model = feedback_measurement_model(cfg, cfg.theta0, cfg.theta0)
        assert model.gated_rows == (0, 1)
        assert model.gate == cfg.pilot_gate
        assert dfrc_measurement_model(cfg, cfg.theta0).gate is None


class TestKalmanScalar:
    def test_predict(self):
        belief = EkfBelief(np.array([0.0]), np.array([[1.0]]))
        one, two = predict(belief, DT, np.array([[1.0]]), LinearTransition(np.array([[1.0]])))
        assert one.M[0, 0] == 2.0
        assert two[0] == 0.0

    def test_gain(self):
        k = kalman_gain(np.array([[2.0]]), np.array([[1.0]]), np.array([[1.0]]))
        assert k[0, 0] == pytest.approx(2.0 / 3.0)

    def test_static_model_without_noise(self, rng):
        b = rng.standard_normal((3, 3))
        m = b @ b.T
        one, _ = predict(EkfBelief(np.ones(3), m), DT, np.zeros((3, 3)), LinearTransition(np.eye(3)))
        np.testing.assert_allclose(one.M, m, atol=1e-15)

    @pytest.mark.parametrize("c", [1e-6, 3.0, 1e8])
    def test_gain_invariant_to_joint_scaling(self, rng, c):
        b = rng.standard_normal((3, 3))
        M = b @ b.T + np.eye(3)
        H = rng.standard_normal((4, 3))
        Q_m = np.diag(rng.uniform(0.1, 2.0, 4))
        np.testing.assert_allclose(kalman_gain(c * M, H, c * Q_m), kalman_gain(M, H, Q_m), rtol=1e-9)


class TestPredictUpdate:
    def test_reference_prediction(self, cfg):
        belief = EkfBelief(cfg.initial_state().as_real(), cfg.m0())
        one, two = predict(belief, cfg.dt, cfg.process_noise.covariance())
        assert math.degrees(one.theta) == pytest.approx(9.33191, abs=1e-5)
        assert two[0] > one.theta
        assert is_symmetric(one.M)

    def test_zero_innovation(self, cfg):
        x = cfg.initial_state().as_real()
        pred = EkfBelief(x, cfg.m0())
        model = dfrc_measurement_model(cfg, cfg.theta0)
        post = update(pred, model.h(x), model)
        np.testing.assert_allclose(post.x_hat, x, rtol=1e-12)
        assert np.trace(post.M) < np.trace(pred.M)
        assert min_eigenvalue_ok(post.M)

    def test_measurement_size_checked(self, cfg):
        model = dfrc_measurement_model(cfg, cfg.theta0)
        with pytest.raises(ValueError):
            update(EkfBelief(cfg.initial_state().as_real(), cfg.m0()), np.zeros(5), model)

    def test_matches_linear_kalman_filter(self):
        rng = np.random.default_rng(2024)
        n, m = 4, 3
        F = np.eye(n) + 0.05 * rng.standard_normal((n, n))
        H = rng.standard_normal((m, n))
        a = rng.standard_normal((n, n))
        Q = 0.01 * (a @ a.T + np.eye(n))
        r = rng.standard_normal((m, m))
        R = 0.1 * (r @ r.T + np.eye(m))

        transition = LinearTransition(F)
        model = LinearMeasurementModel(H, R)
        belief = EkfBelief(np.zeros(n), np.eye(n))
        x_ref, P_ref = np.zeros(n), np.eye(n)
        truth = rng.standard_normal(n)

        for _ in range(100):
            truth = F @ truth + rng.multivariate_normal(np.zeros(n), Q)
            y = H @ truth + rng.multivariate_normal(np.zeros(m), R)

            belief, _ = predict(belief, DT, Q, transition)
            belief = update(belief, y, model)

            x_ref = F @ x_ref
            P_ref = F @ P_ref @ F.T + Q
            S = H @ P_ref @ H.T + R
            K = np.linalg.solve(S, H @ P_ref).T
            x_ref = x_ref + K @ (y - H @ x_ref)
            P_ref = (np.eye(n) - K @ H) @ P_ref

            np.testing.assert_allclose(belief.x_hat, x_ref, atol=1e-9)
            np.testing.assert_allclose(belief.M, P_ref, atol=1e-9)


class TestGainConditioning:
    def test_wide_dynamic_range(self):
        M = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 1.0]])
        H = np.diag([1.0, 1e-9, 10.0])
        Q_m = np.diag([1e-2, 1e-18, 1e3])
        S = H @ M @ H.T + Q_m

        with pytest.raises(SingularMatrixError):
            invert(S)

        K = kalman_gain(M, H, Q_m)
        target = M @ H.T
        for j in range(3):
            np.testing.assert_allclose(
                (K @ S)[:, j], target[:, j], rtol=1e-9, atol=1e-12 * np.abs(target[:, j]).max()
            )


class TestBeamTracker:
    def _tracker(self, x, cov=1.0):
        return BeamTracker(
            EkfBelief(np.asarray(x, dtype=float), cov * np.eye(3)),
            np.zeros((3, 3)),
            DT,
            transition=LinearTransition(np.eye(3)),
        )

    def test_update_before_predict(self):
        tracker = self._tracker([0.5, 20.0, 10.0])
        with pytest.raises(RuntimeError):
            tracker.update(np.zeros(1), LinearMeasurementModel(np.eye(1, 3), np.eye(1)))

    def test_angle_clamped(self):
        tracker = self._tracker([0.01, 20.0, 10.0])
        tracker.predict()
        flags = tracker.update(np.array([-1.0]), LinearMeasurementModel(np.eye(1, 3), 1e-6 * np.eye(1)))
        assert flags.clamped
        assert tracker.belief.theta == THETA_MIN

    def test_negative_distance_floored(self):
        tracker = self._tracker([0.5, 1.0, 10.0])
        tracker.predict()
        model = LinearMeasurementModel(np.eye(1, 3, k=1), 1e-6 * np.eye(1))
        flags = tracker.update(np.array([-50.0]), model)
        assert flags.clamped
        assert tracker.belief.x_hat[1] == D_MIN

    def test_non_finite_measurement_diverges(self):
        tracker = self._tracker([0.5, 20.0, 10.0])
        tracker.predict()
        with pytest.raises(FilterDivergence):
            tracker.update(np.array([np.nan]), LinearMeasurementModel(np.eye(1, 3), np.eye(1)))

    def _pilot_setup(self, cfg, gate):
        x = np.array([cfg.theta0, cfg.d0, cfg.v0])
        model = feedback_measurement_model(cfg.with_overrides(pilot_gate=gate), cfg.theta0, cfg.theta0)
        tracker = self._tracker(x, cov=1e-4)
        tracker.predict()
        return x, model, tracker

    def test_outlying_pilot_gated(self, cfg):
        x, model, tracker = self._pilot_setup(cfg, 5.99)
        y = model.h(x)
        y[0] -= 50.0
        assert gating_distance(EkfBelief(x, 1e-4 * np.eye(3)), y, model, model.gated_rows) > 5.99
        flags = tracker.update(y, model)
        assert flags.gated
        # Delay and Doppler agree with the prediction, so nothing moves.
        np.testing.assert_allclose(tracker.belief.x_hat, x, rtol=1e-12)

    def test_consistent_pilot_passes_gate(self, cfg):
        x, model, tracker = self._pilot_setup(cfg, 5.99)
        flags = tracker.update(model.h(x), model)
        assert not flags.gated

    def test_gate_disabled(self, cfg):
        x, model, tracker = self._pilot_setup(cfg, None)
        y = model.h(x)
        y[0] -= 50.0
        flags = tracker.update(y, model)
        assert not flags.gated
        assert not np.allclose(tracker.belief.x_hat, x, rtol=1e-9)

    def test_predict_returns_angles(self, cfg):
        tracker = BeamTracker(
            EkfBelief(cfg.initial_state().as_real(), cfg.m0()),
            cfg.process_noise.covariance(),
            cfg.dt,
        )
        one, two = tracker.predict()
        assert math.degrees(one) == pytest.approx(9.33191, abs=1e-5)
        assert two > one
