"""
Pytest configuration and fixtures.
"""
import os
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from robustik.cli import create_cli
from robustik.config import IKSettings, TestingConfig
from robustik.models import ArmModel, DualArmModel, JointNoiseModel, Pose, TaskSpec, Twist
from robustik.utils.io import load_model, load_pairs, load_task

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'

# gripper z along +x (left) and -x (right), shared x axis
LEFT_GRIPPER_R = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])
RIGHT_GRIPPER_R = np.array([[0.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]])


@pytest.fixture
def configs_dir():
    """Directory of the bundled config files."""
    return CONFIGS


@pytest.fixture(scope='session')
def baxter():
    """Bundled Baxter-like 7+7 model."""
    return load_model(CONFIGS / 'baxter.json')


@pytest.fixture(scope='session')
def planar():
    """Planar 3R + 3R model."""
    return load_model(CONFIGS / 'planar_3r.json')


@pytest.fixture(scope='session')
def baxter_task():
    """Peg-in-hole task with the published target poses."""
    return load_task(CONFIGS / 'peg_in_hole_task.json')


@pytest.fixture(scope='session')
def published_pairs(baxter):
    """Published robust and comparison joint vectors, by label."""
    return {pair.label: pair for pair in load_pairs(CONFIGS / 'published_pairs.json', baxter)}


@pytest.fixture(scope='session')
def facing_arms():
    """
    Two 3R arms whose grippers face each other at the zero configuration.

    At theta = 0 the peg tip sits at (0.65, 0, 0) and the hole tip at
    (0.75, 0, 0), hole z pointing back at the peg.
    """
    left = ArmModel(
        (Twist.revolute([0, 0, 1], [0.0, 0.0, 0.0]),
         Twist.revolute([0, 1, 0], [0.3, 0.0, 0.0]),
         Twist.revolute([1, 0, 0], [0.6, 0.0, 0.0])),
        Pose(LEFT_GRIPPER_R, [0.6, 0.0, 0.0]),
    )
    right = ArmModel(
        (Twist.revolute([0, 0, 1], [1.4, 0.0, 0.0]),
         Twist.revolute([0, 1, 0], [1.1, 0.0, 0.0]),
         Twist.revolute([1, 0, 0], [0.8, 0.0, 0.0])),
        Pose(RIGHT_GRIPPER_R, [0.8, 0.0, 0.0]),
    )
    return DualArmModel(left, right)


@pytest.fixture
def facing_task():
    """Task whose desired placement is reached by the facing arms at zero."""
    return TaskSpec(
        g_bp=Pose(LEFT_GRIPPER_R, [0.65, 0.0, 0.0]),
        g_bh=Pose(RIGHT_GRIPPER_R, [0.75, 0.0, 0.0]),
        l_p=0.05, l_h=0.05, h_p=0.05, w_p=0.03, w_h=0.04,
    )


@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def noise():
    """sigma = 0.0045 rad, k = 2 over 14 joints."""
    return JointNoiseModel(0.0045, 2.0, 14)


@pytest.fixture
def settings():
    """IK settings with the reduced test budgets."""
    return IKSettings.from_config(TestingConfig)


@pytest.fixture
def cli():
    """CLI bound to the testing configuration."""
    return create_cli(TestingConfig)


@pytest.fixture
def runner():
    """Create CLI test runner."""
    return CliRunner()


@pytest.fixture
def robustik_env(monkeypatch):
    """No ROBUSTIK_* variables; whatever a test loads is removed afterwards."""
    names = ('ROBUSTIK_ENV', 'ROBUSTIK_LOG', 'ROBUSTIK_THREADS')
    for name in names:
        monkeypatch.delenv(name, raising=False)
    yield
    for name in names:
        os.environ.pop(name, None)
