"""Scenario configuration."""

import json
import math
import numbers
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from dfrc_tracker.errors import ConfigError
from dfrc_tracker.motion import ProcessNoise, VehicleState
from dfrc_tracker.propagation import LinkBudget

SCHEMES = ("dfrc", "feedback")
TRUTH_MODELS = ("exact", "approximate")
FEEDBACK_ALPHA_SOURCES = ("known", "belief")
INT_FIELDS = ("epochs", "trials", "workers", "n_tx", "n_rx", "m_vehicle", "master_seed")

# Sweep-only key that sets all three array sizes at once.
ANTENNA_ALIAS = "n_antennas"


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Physical, noise, array and run-control parameters of one scenario.

    Every field has a default, so an empty config file reproduces the
    reference scenario (30 GHz, 64-element arrays, 10 dB transmit SNR,
    vehicle starting at 9.2 deg / 25 m / 18 m/s).
    """

    # Carrier and timing
    fc: float = 30e9
    c: float = 3e8
    dt: float = 0.02
    epochs: int = 200

    # Arrays
    n_tx: int = 64
    n_rx: int = 64
    m_vehicle: int = 64

    # Link budget
    tx_snr_db: float = 10.0
    sigma_sq: float = 1.0
    sigma_c_sq: float = 1.0
    g_mf: float = 10.0
    g_feedback: float = 1.0
    a1: float = 1.0
    a2: float = 6.7e-7
    a3: float = 2e4

    # State evolution noise
    sigma_theta_deg: float = 0.02
    sigma_d: float = 0.2
    sigma_v: float = 0.5
    sigma_beta: float = 0.1

    # Initial truth
    theta0_deg: float = 9.2
    d0: float = 25.0
    v0: float = 18.0
    beta0_re: float = math.sqrt(2) / 2
    beta0_im: float = math.sqrt(2) / 2
    alpha_ref: float = 25.0

    # Initial MSE diagonal, None means 10x the process-noise variances
    m0_diag: list[float] | None = None

    # Run control
    trials: int = 100
    master_seed: int = 20210129
    schemes: list[str] = field(default_factory=lambda: list(SCHEMES))
    workers: int = 1

    # Simulation switches
    truth_model: str = "exact"
    truth_process_noise: bool = False
    measurement_noise: bool = True
    feedback_alpha: str = "belief"
    # Chi-square gate (2 dof) on the feedback pilot innovation, None disables it
    pilot_gate: float | None = 5.99
    cond_cap: float = 1e12

    def __post_init__(self):
        for name in INT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Integral):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        for name in ("n_tx", "n_rx", "m_vehicle"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("fc", "c", "dt", "sigma_sq", "sigma_c_sq", "g_mf", "g_feedback", "d0", "alpha_ref", "cond_cap"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        for name in ("sigma_theta_deg", "sigma_d", "sigma_v", "sigma_beta", "v0"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0 < self.theta0_deg < 180:
            raise ConfigError(f"theta0_deg must lie in (0, 180), got {self.theta0_deg}")
        if self.beta0_re == 0 and self.beta0_im == 0:
            raise ConfigError("beta0 must be non-zero")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            raise ConfigError(f"schemes must be a non-empty subset of {SCHEMES}, got {self.schemes}")
        if self.truth_model not in TRUTH_MODELS:
            raise ConfigError(f"truth_model must be one of {TRUTH_MODELS}, got {self.truth_model!r}")
        if self.feedback_alpha not in FEEDBACK_ALPHA_SOURCES:
            raise ConfigError(
                f"feedback_alpha must be one of {FEEDBACK_ALPHA_SOURCES}, got {self.feedback_alpha!r}"
            )
        if self.pilot_gate is not None and not (
            isinstance(self.pilot_gate, (int, float))
            and not isinstance(self.pilot_gate, bool)
            and self.pilot_gate > 0
            and math.isfinite(self.pilot_gate)
        ):
            raise ConfigError(f"pilot_gate must be positive and finite or null, got {self.pilot_gate!r}")
        if self.m0_diag is not None and (
            len(self.m0_diag) != 5 or any(m <= 0 for m in self.m0_diag)
        ):
            raise ConfigError("m0_diag must list 5 positive variances [theta, d, v, Re beta, Im beta]")

    @property
    def p(self) -> float:
        """Transmit power from the transmit SNR p / sigma^2."""
        return self.sigma_sq * 10.0 ** (self.tx_snr_db / 10.0)

    @property
    def theta0(self) -> float:
        return math.radians(self.theta0_deg)

    @property
    def beta0(self) -> complex:
        return complex(self.beta0_re, self.beta0_im)

    @property
    def epsilon(self) -> complex:
        """RCS consistent with beta0 at d0."""
        return 2.0 * self.d0 * self.beta0

    @property
    def radar_budget(self) -> LinkBudget:
        return LinkBudget(
            p=self.p,
            sigma_sq=self.sigma_sq,
            sigma_c_sq=self.sigma_c_sq,
            g_mf=self.g_mf,
            a1=self.a1,
            a2=self.a2,
            a3=self.a3,
            fc=self.fc,
            c=self.c,
        )

    @property
    def feedback_budget(self) -> LinkBudget:
        """Pilot link: communication noise and the pilot matched-filter gain."""
        return replace(self.radar_budget, sigma_sq=self.sigma_c_sq, g_mf=self.g_feedback)

    @property
    def process_noise(self) -> ProcessNoise:
        return ProcessNoise(
            sigma_theta=math.radians(self.sigma_theta_deg),
            sigma_d=self.sigma_d,
            sigma_v=self.sigma_v,
            sigma_beta=self.sigma_beta,
        )

    def initial_state(self) -> VehicleState:
        return VehicleState(theta=self.theta0, d=self.d0, v=self.v0, beta=self.beta0)

    def m0(self, with_beta: bool = True) -> np.ndarray:
        """Initial MSE matrix, 5x5 (or 3x3 without beta)."""
        if self.m0_diag is not None:
            diag = np.array(self.m0_diag, dtype=float)
        else:
            diag = 10.0 * np.diag(self.process_noise.covariance(with_beta=True))
        return np.diag(diag if with_beta else diag[:3])

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def with_overrides(self, **overrides: Any) -> "ScenarioConfig":
        """
        Copy with some keys replaced.

        `n_antennas` sets n_tx, n_rx and m_vehicle together.

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        overrides = dict(overrides)
        if ANTENNA_ALIAS in overrides:
            n = overrides.pop(ANTENNA_ALIAS)
            overrides.update(n_tx=n, n_rx=n, m_vehicle=n)
        _check_keys(overrides)
        try:
            return replace(self, **overrides)
        except TypeError as e:
            raise ConfigError(str(e)) from e


def _check_keys(data: dict[str, Any]) -> None:
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown config key(s): {', '.join(unknown)}")


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """
    Build a config from a flat mapping.

    Raises:
        ConfigError: On unknown keys or invalid values.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"Config must be a JSON object, got {type(data).__name__}")
    return ScenarioConfig().with_overrides(**data)


def load_config(path: str | Path | None = None) -> ScenarioConfig:
    """
    Load a scenario from a JSON file; None gives the defaults.

    Raises:
        ConfigError: If the file cannot be read or parsed, or holds unknown keys.
    """
    if path is None:
        return ScenarioConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    if not text.strip():
        return ScenarioConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config {path} is not valid JSON: {e}") from e
    return config_from_dict(data)
