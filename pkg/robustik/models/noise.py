"""
Joint actuation noise models.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from robustik.config import Config
from robustik.errors import InvalidArgumentError


@dataclass(frozen=True)
class JointNoiseModel:
    """
    Isotropic Gaussian joint error with a k-sigma error ball.

    sigma = 0 is accepted as the noise-free limit.

    Attributes:
        sigma: Per-joint standard deviation, rad
        k: Number of standard deviations bounding the error ball
        dim: Number of joints, n + m
    """

    sigma: float
    k: float
    dim: int

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0.0:
            raise InvalidArgumentError(f"sigma must be >= 0, got {self.sigma}")
        if not np.isfinite(self.k) or self.k <= 0.0:
            raise InvalidArgumentError(f"k must be > 0, got {self.k}")
        if int(self.dim) < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {self.dim}")

    @property
    def c(self) -> float:
        """Squared radius (k sigma)^2 of the joint error ball."""
        return (self.k * self.sigma) ** 2

    @property
    def covariance(self) -> np.ndarray:
        return self.sigma ** 2 * np.eye(self.dim)

    def with_sigma(self, sigma: float) -> 'JointNoiseModel':
        return JointNoiseModel(sigma, self.k, self.dim)


@dataclass(frozen=True)
class NoiseConfig:
    """
    The noise block of a run configuration.

    Attributes:
        sigma: Joint standard deviation, rad
        k: Number of standard deviations
        gamma: Orientation weight in M = P + gamma O, m/rad
        seed: Root seed for all sampling
    """

    sigma: float = 0.0045
    k: float = 2.0
    gamma: float = Config.GAMMA
    seed: int = 0

    def model(self, dim: int, sigma: Optional[float] = None) -> JointNoiseModel:
        return JointNoiseModel(self.sigma if sigma is None else sigma, self.k, dim)

    def to_dict(self):
        return {'sigma': self.sigma, 'k': self.k, 'gamma': self.gamma, 'seed': self.seed}
