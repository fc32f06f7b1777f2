import json
import math

import numpy as np
import pytest

from dfrc_tracker.config import ScenarioConfig, config_from_dict, load_config
from dfrc_tracker.errors import ConfigError


class TestDefaults:
    def test_reference_scenario(self, cfg):
        assert cfg.p == pytest.approx(10.0)
        assert cfg.theta0 == pytest.approx(math.radians(9.2))
        assert cfg.beta0 == pytest.approx(complex(math.sqrt(2) / 2, math.sqrt(2) / 2))
        assert abs(cfg.epsilon) == pytest.approx(50.0)
        assert cfg.initial_state().is_valid()

    def test_budgets(self, cfg):
        assert cfg.radar_budget.g_mf == 10.0
        assert cfg.feedback_budget.g_mf == 1.0
        assert cfg.feedback_budget.sigma_sq == cfg.sigma_c_sq

    def test_feedback_defaults(self, cfg):
        assert cfg.feedback_alpha == "belief"
        assert cfg.pilot_gate == pytest.approx(5.99)
        assert config_from_dict({"pilot_gate": None}).pilot_gate is None

    def test_initial_mse(self, cfg):
        q = cfg.process_noise.covariance()
        np.testing.assert_allclose(cfg.m0(), 10 * q)
        assert cfg.m0(with_beta=False).shape == (3, 3)

    def test_explicit_initial_mse(self):
        cfg = ScenarioConfig(m0_diag=[1.0, 2.0, 3.0, 4.0, 5.0])
        np.testing.assert_array_equal(np.diag(cfg.m0(with_beta=False)), [1.0, 2.0, 3.0])


class TestValidation:
    @pytest.mark.parametrize(
        "overrides",
        [
            {"epochs": 0},
            {"trials": 0},
            {"n_tx": 0},
            {"dt": -0.02},
            {"theta0_deg": 180.0},
            {"sigma_v": -1.0},
            {"beta0_re": 0.0, "beta0_im": 0.0},
            {"schemes": []},
            {"schemes": ["radar"]},
            {"truth_model": "curved"},
            {"feedback_alpha": "guess"},
            {"master_seed": -1},
            {"m0_diag": [1.0, 1.0]},
            {"pilot_gate": 0.0},
            {"pilot_gate": True},
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ConfigError):
            ScenarioConfig().with_overrides(**overrides)

    @pytest.mark.parametrize(
        "data",
        [
            {"epochs": 2.5, "trials": True},
            {"epochs": 2.5},
            {"trials": True},
            {"workers": "2"},
            {"n_antennas": 64.0},
            {"master_seed": 1e3},
            {"m_vehicle": False},
        ],
    )
    def test_counts_must_be_integers(self, data):
        with pytest.raises(ConfigError, match="must be an integer"):
            config_from_dict(data)

    def test_numpy_integer_accepted(self):
        assert config_from_dict({"epochs": np.int64(7)}).epochs == 7

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="n_txx"):
            config_from_dict({"n_txx": 32})

    def test_not_a_mapping(self):
        with pytest.raises(ConfigError):
            config_from_dict([1, 2, 3])


class TestOverrides:
    def test_antenna_alias(self, cfg):
        big = cfg.with_overrides(n_antennas=128)
        assert (big.n_tx, big.n_rx, big.m_vehicle) == (128, 128, 128)
        assert cfg.n_tx == 64

    def test_round_trip_through_dict(self, cfg):
        assert config_from_dict(cfg.to_dict()) == cfg


class TestLoadConfig:
    def test_none_gives_defaults(self):
        assert load_config(None) == ScenarioConfig()

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        assert load_config(path) == ScenarioConfig()

    def test_partial_file(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"n_antennas": 128, "trials": 5}))
        cfg = load_config(path)
        assert cfg.n_rx == 128
        assert cfg.trials == 5
        assert cfg.fc == 30e9

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{trials: 5")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
