"""
Serial-arm and dual-arm kinematic models.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from robustik.errors import InvalidArgumentError
from robustik.models.se3 import Pose, Twist

LAYOUTS = ('left', 'right', 'pseudo')
JACOBIAN_KINDS = ('spatial_relative', 'analytical_relative')


@dataclass(frozen=True, eq=False)
class ArmModel:
    """
    Product-of-exponentials model of one serial arm.

    Attributes:
        twists: Joint screws ordered base to tip, in the common base frame
        g0: End-effector pose at the zero configuration
        joint_limits: Optional (n, 2) array of [min, max] per joint
    """

    twists: Tuple[Twist, ...]
    g0: Pose
    joint_limits: Optional[np.ndarray] = None

    def __post_init__(self):
        twists = tuple(self.twists)
        if not twists:
            raise InvalidArgumentError("arm model needs at least one joint twist")
        for index, twist in enumerate(twists):
            if not isinstance(twist, Twist):
                raise InvalidArgumentError(f"twists[{index}] is not a Twist")
        object.__setattr__(self, 'twists', twists)
        if self.joint_limits is not None:
            limits = np.array(self.joint_limits, dtype=float)
            if limits.shape != (len(twists), 2):
                raise InvalidArgumentError(
                    f"joint limits must have shape ({len(twists)}, 2), got {limits.shape}")
            bad = np.nonzero(limits[:, 0] > limits[:, 1])[0]
            if bad.size:
                raise InvalidArgumentError(f"joint {int(bad[0])} has min > max")
            limits.setflags(write=False)
            object.__setattr__(self, 'joint_limits', limits)

    @property
    def dof(self) -> int:
        return len(self.twists)

    @property
    def revolute_mask(self) -> np.ndarray:
        return np.array([t.is_revolute for t in self.twists])

    def bounds(self) -> np.ndarray:
        """Joint limits, or [-pi, pi] per joint when none are stored."""
        if self.joint_limits is not None:
            return np.array(self.joint_limits)
        return np.tile([-np.pi, np.pi], (self.dof, 1))

    def mid_range(self) -> np.ndarray:
        return self.bounds().mean(axis=1)

    def within_limits(self, theta: np.ndarray, tolerance: float = 1e-9) -> bool:
        if self.joint_limits is None:
            return True
        lo, hi = self.joint_limits[:, 0], self.joint_limits[:, 1]
        return bool(np.all(theta >= lo - tolerance) and np.all(theta <= hi + tolerance))

    def transformed(self, base: Pose) -> 'ArmModel':
        """The same arm mounted at ``base`` in a parent frame."""
        return ArmModel(tuple(t.transformed(base) for t in self.twists),
                        base @ self.g0, self.joint_limits)


@dataclass(frozen=True, eq=False)
class JointVector:
    """
    Joint values tagged with their layout.

    The pseudo layout orders the dual arm as nL..1L, 1R..mR.

    Attributes:
        values: Joint values, rad (or m for prismatic joints)
        layout: One of 'left', 'right', 'pseudo'
    """

    values: np.ndarray
    layout: str = 'left'

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise InvalidArgumentError(f"unknown joint layout '{self.layout}'")
        values = np.array(self.values, dtype=float).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.size

    @classmethod
    def pseudo(cls, theta_left: 'JointLike', theta_right: 'JointLike') -> 'JointVector':
        """Reverse the left vector and append the right one."""
        left = joint_values(theta_left)
        right = joint_values(theta_right)
        return cls(np.concatenate((left[::-1], right)), 'pseudo')

    def split(self, n: int) -> Tuple['JointVector', 'JointVector']:
        """Inverse of ``pseudo`` for a pseudo vector with ``n`` left joints."""
        if self.layout != 'pseudo':
            raise InvalidArgumentError("only pseudo vectors can be split")
        return (JointVector(self.values[:n][::-1], 'left'),
                JointVector(self.values[n:], 'right'))

    def tolist(self):
        return self.values.tolist()


JointLike = Union[JointVector, Sequence[float], np.ndarray]


def joint_values(theta: JointLike, expected: Optional[int] = None, name: str = 'theta') -> np.ndarray:
    """
    Plain float array of a joint vector, optionally length checked.

    Args:
        theta: JointVector or sequence of floats
        expected: Required length
        name: Label used in the error message

    Returns:
        1-D float array
    """
    values = theta.values if isinstance(theta, JointVector) else np.asarray(theta, dtype=float).reshape(-1)
    if expected is not None and values.size != expected:
        raise InvalidArgumentError(f"{name} has {values.size} values, expected {expected}")
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError(f"{name} has non-finite values")
    return np.array(values, dtype=float)


@dataclass(frozen=True, eq=False)
class DualArmModel:
    """
    Two arms in a common base frame.

    Attributes:
        left: Left arm (n joints)
        right: Right arm (m joints)
    """

    left: ArmModel
    right: ArmModel

    @property
    def n(self) -> int:
        return self.left.dof

    @property
    def m(self) -> int:
        return self.right.dof

    @property
    def dof(self) -> int:
        return self.n + self.m

    def pseudo_chain(self):
        """(twist, sign) pairs in pseudo-chain order nL..1L, 1R..mR."""
        chain = [(t, -1.0) for t in reversed(self.left.twists)]
        chain.extend((t, 1.0) for t in self.right.twists)
        return chain

    def pseudo_vector(self, theta_left: JointLike, theta_right: JointLike) -> JointVector:
        return JointVector.pseudo(joint_values(theta_left, self.n, 'theta_left'),
                                  joint_values(theta_right, self.m, 'theta_right'))

    def pseudo_mid_range(self) -> np.ndarray:
        return self.pseudo_vector(self.left.mid_range(), self.right.mid_range()).values


@dataclass(frozen=True, eq=False)
class JacobianMatrix:
    """
    Relative Jacobian; rows 0-2 linear, rows 3-5 angular.

    Attributes:
        m: 6 x (n+m) matrix
        kind: 'spatial_relative' or 'analytical_relative'
    """

    m: np.ndarray
    kind: str = 'spatial_relative'

    def __post_init__(self):
        if self.kind not in JACOBIAN_KINDS:
            raise InvalidArgumentError(f"unknown Jacobian kind '{self.kind}'")
        m = np.array(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != 6:
            raise InvalidArgumentError(f"Jacobian must be 6 x N, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, 'm', m)

    @property
    def linear(self) -> np.ndarray:
        return self.m[:3]

    @property
    def angular(self) -> np.ndarray:
        return self.m[3:]

    def to_dict(self):
        return {'kind': self.kind, 'matrix': self.m.tolist()}
