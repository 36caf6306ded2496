"""
Value types for robustik.
"""
from .se3 import AdjointMatrix, Pose, Twist, UnitQuaternion
from .arm import ArmModel, DualArmModel, JacobianMatrix, JointVector
from .noise import JointNoiseModel, NoiseConfig
from .task import TaskConfig, TaskSpec
from .results import (
    ErrorEllipsoid,
    FeasibilityReport,
    IKPair,
    SweepResult,
    TrialOutcome,
    WorstCaseError,
)

__all__ = [
    'AdjointMatrix', 'Pose', 'Twist', 'UnitQuaternion',
    'ArmModel', 'DualArmModel', 'JacobianMatrix', 'JointVector',
    'JointNoiseModel', 'NoiseConfig',
    'TaskConfig', 'TaskSpec',
    'ErrorEllipsoid', 'FeasibilityReport', 'IKPair', 'SweepResult',
    'TrialOutcome', 'WorstCaseError',
]
