"""
Configuration settings for robustik.
"""
import os
from dataclasses import dataclass

from robustik.errors import ConfigError


class Config:
    """Base configuration class with default settings."""

    # Logging
    LOG_LEVEL = 'WARNING'

    # Damped-least-squares IK
    DLS_DAMPING = 1e-3
    IK_TOLERANCE = 1e-9
    IK_MAX_ITERATIONS = 500
    IK_SEEDS = 64
    IK_SEED = 0

    # Redundancy sweep for arms with more than six joints
    REDUNDANCY_JOINT = 0
    REDUNDANCY_STEPS = 16
    REDUNDANCY_SEEDS = 8

    # Candidate bookkeeping
    DEDUP_TOLERANCE = 1e-3
    POSE_TOLERANCE = 1e-6
    RELATIVE_LEFT_SAMPLES = 8

    # Numerics
    SMALL_ANGLE = 1e-10
    EIGEN_FLOOR = 1e-14
    FD_STEP = 1e-6

    # Scoring and simulation
    GAMMA = 0.0
    TRIALS = 10000
    THREADS = 1

    @classmethod
    def log_level(cls):
        """ROBUSTIK_LOG when set, else the class default."""
        return os.environ.get('ROBUSTIK_LOG') or cls.LOG_LEVEL

    @classmethod
    def threads(cls):
        """ROBUSTIK_THREADS when set, else the class default."""
        value = os.environ.get('ROBUSTIK_THREADS')
        if not value:
            return cls.THREADS
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"ROBUSTIK_THREADS must be an integer, got '{value}'")


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    """Production configuration."""
    LOG_LEVEL = 'WARNING'


class TestingConfig(Config):
    """Testing configuration with smaller search budgets."""
    IK_SEEDS = 24
    REDUNDANCY_STEPS = 6
    REDUNDANCY_SEEDS = 4
    TRIALS = 2000


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': Config,
}


def get_config(name=None):
    """
    Resolve a configuration class by name.

    Args:
        name: Key into ``config``; defaults to ``ROBUSTIK_ENV`` or 'default'

    Returns:
        Configuration class
    """
    name = name or os.environ.get('ROBUSTIK_ENV') or 'default'
    return config.get(name, Config)


@dataclass(frozen=True)
class IKSettings:
    """Immutable view of the IK enumeration knobs of a configuration class."""

    damping: float = Config.DLS_DAMPING
    tolerance: float = Config.IK_TOLERANCE
    max_iterations: int = Config.IK_MAX_ITERATIONS
    seeds: int = Config.IK_SEEDS
    seed: int = Config.IK_SEED
    redundancy_joint: int = Config.REDUNDANCY_JOINT
    redundancy_steps: int = Config.REDUNDANCY_STEPS
    redundancy_seeds: int = Config.REDUNDANCY_SEEDS
    dedup_tolerance: float = Config.DEDUP_TOLERANCE
    pose_tolerance: float = Config.POSE_TOLERANCE
    relative_left_samples: int = Config.RELATIVE_LEFT_SAMPLES

    @classmethod
    def from_config(cls, config_class=Config, **overrides):
        """
        Build settings from a configuration class.

        Args:
            config_class: Configuration class to read
            **overrides: Field values replacing the class defaults

        Returns:
            IKSettings instance
        """
        values = dict(
            damping=config_class.DLS_DAMPING,
            tolerance=config_class.IK_TOLERANCE,
            max_iterations=config_class.IK_MAX_ITERATIONS,
            seeds=config_class.IK_SEEDS,
            seed=config_class.IK_SEED,
            redundancy_joint=config_class.REDUNDANCY_JOINT,
            redundancy_steps=config_class.REDUNDANCY_STEPS,
            redundancy_seeds=config_class.REDUNDANCY_SEEDS,
            dedup_tolerance=config_class.DEDUP_TOLERANCE,
            pose_tolerance=config_class.POSE_TOLERANCE,
            relative_left_samples=config_class.RELATIVE_LEFT_SAMPLES,
        )
        values.update(overrides)
        return cls(**values)
