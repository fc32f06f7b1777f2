"""
Vehicle kinematics.

The vehicle drives along a straight road parallel to the RSU array. Ground
truth is propagated exactly in Cartesian coordinates (RSU at the origin, array
along x); the tracker uses the approximate polar evolution in `evolve_state`.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from dfrc_tracker.propagation.radar import reflection_coeff


@dataclass(frozen=True)
class VehicleState:
    """Angle (rad), distance (m), speed (m/s) and reflection coefficient."""

    theta: float
    d: float
    v: float
    beta: complex = 0j

    def is_valid(self) -> bool:
        """True when d > 0, theta in (0, pi) and v >= 0."""
        return self.d > 0 and 0 < self.theta < math.pi and self.v >= 0

    def as_real(self, with_beta: bool = True) -> np.ndarray:
        """Real layout [theta, d, v, Re beta, Im beta] (or [theta, d, v])."""
        if with_beta:
            return np.array([self.theta, self.d, self.v, self.beta.real, self.beta.imag])
        return np.array([self.theta, self.d, self.v])

    @classmethod
    def from_real(cls, x: np.ndarray) -> "VehicleState":
        """Inverse of `as_real`; a 3-vector gives beta = 0."""
        x = np.asarray(x, dtype=float)
        beta = complex(x[3], x[4]) if x.size == 5 else 0j
        return cls(theta=float(x[0]), d=float(x[1]), v=float(x[2]), beta=beta)


@dataclass(frozen=True)
class TruthPose:
    """Cartesian pose: along-road x (m), perpendicular offset y (m), speed v (m/s)."""

    x: float
    y: float
    v: float

    def __post_init__(self):
        if self.y <= 0:
            raise ValueError(f"Vehicle must be off the array line (y > 0), got y={self.y}")

    @property
    def d(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class ProcessNoise:
    """
    State evolution noise standard deviations.

    sigma_beta is the total standard deviation of the complex beta noise;
    each real component gets variance sigma_beta^2 / 2.
    """

    sigma_theta: float
    sigma_d: float
    sigma_v: float
    sigma_beta: float = 0.0

    def __post_init__(self):
        for name in ("sigma_theta", "sigma_d", "sigma_v", "sigma_beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"ProcessNoise.{name} must be >= 0, got {getattr(self, name)}")

    def covariance(self, with_beta: bool = True) -> np.ndarray:
        """Real-augmented Q_s, 5x5 (or 3x3 without beta)."""
        diag = [self.sigma_theta**2, self.sigma_d**2, self.sigma_v**2]
        if with_beta:
            diag += [self.sigma_beta**2 / 2.0] * 2
        return np.diag(diag)

    def draw(self, rng: np.random.Generator) -> tuple[float, float, float, complex]:
        """One draw of (w_theta, w_d, w_v, w_beta)."""
        w = rng.standard_normal(5)
        beta_scale = self.sigma_beta / math.sqrt(2.0)
        return (
            self.sigma_theta * w[0],
            self.sigma_d * w[1],
            self.sigma_v * w[2],
            complex(beta_scale * w[3], beta_scale * w[4]),
        )


def pose_from_polar(theta: float, d: float, v: float) -> TruthPose:
    """Cartesian pose of a vehicle at angle theta and distance d."""
    return TruthPose(x=d * math.cos(theta), y=d * math.sin(theta), v=v)


def truth_step(pose: TruthPose, dt: float) -> TruthPose:
    """
    Exact, noise-free straight-line motion: x <- x - v dt.

    Raises:
        ValueError: If dt <= 0.
    """
    if dt <= 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    return replace(pose, x=pose.x - pose.v * dt)


def pose_to_state(pose: TruthPose, epsilon: complex) -> VehicleState:
    """Polar view of a pose; beta follows from the RCS epsilon."""
    d = pose.d
    return VehicleState(
        theta=math.atan2(pose.y, pose.x),
        d=d,
        v=pose.v,
        beta=reflection_coeff(epsilon, d),
    )


def evolve_state(
    x: VehicleState,
    dt: float,
    noise: tuple[float, float, float, complex] | None = None,
) -> VehicleState:
    """
    Approximate state evolution g(x) over one block of length dt.

    theta' = theta + v dt sin(theta) / d + w_theta
    d'     = d - v dt cos(theta) + w_d
    v'     = v + w_v
    beta'  = beta (1 + v dt cos(theta) / d) + w_beta

    Raises:
        ValueError: If d <= 0.
    """
    if x.d <= 0:
        raise ValueError(f"Distance must be positive, got {x.d}")
    w_theta, w_d, w_v, w_beta = noise if noise is not None else (0.0, 0.0, 0.0, 0j)

    step = x.v * dt
    sin_t, cos_t = math.sin(x.theta), math.cos(x.theta)
    return VehicleState(
        theta=x.theta + step * sin_t / x.d + w_theta,
        d=x.d - step * cos_t + w_d,
        v=x.v + w_v,
        beta=x.beta * (1.0 + step * cos_t / x.d) + w_beta,
    )
