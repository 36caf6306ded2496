"""
Rigid-body and unit-quaternion algebra.

Conventions:
    - Quaternions are scalar-first, q = (eta, eps), Hamilton product.
    - Twists are xi = (v, omega); a revolute joint through point q has
      v = -omega x q, a prismatic joint has omega = 0.
    - Poses map child coordinates to parent coordinates, g = [R p; 0 1].

All value types are immutable; their arrays are read-only copies.
"""
import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

from robustik.config import Config
from robustik.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-9
ORTHONORMAL_TOLERANCE = 1e-10
SMALL_ANGLE = Config.SMALL_ANGLE

ArrayLike = Union[np.ndarray, list, tuple]


def _frozen(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


def hat(w: ArrayLike) -> np.ndarray:
    """
    Skew-symmetric cross-product matrix of a 3-vector.

    Args:
        w: 3-vector

    Returns:
        3x3 matrix with hat(w) @ x == cross(w, x)
    """
    x, y, z = np.asarray(w, dtype=float).reshape(3)
    return np.array([[0.0, -z, y],
                     [z, 0.0, -x],
                     [-y, x, 0.0]])


def vee(W: np.ndarray) -> np.ndarray:
    """Recover the 3-vector of a (nearly) skew-symmetric matrix."""
    return 0.5 * np.array([W[2, 1] - W[1, 2], W[0, 2] - W[2, 0], W[1, 0] - W[0, 1]])


def rodrigues(omega: np.ndarray, theta: float) -> np.ndarray:
    """Rotation matrix exp(theta * hat(omega)) for a unit axis."""
    if abs(theta) < SMALL_ANGLE:
        return np.eye(3)
    W = hat(omega)
    return np.eye(3) + np.sin(theta) * W + (1.0 - np.cos(theta)) * (W @ W)


def _canonical(vec: np.ndarray) -> np.ndarray:
    # eta >= 0; for eta == 0 the first nonzero vector component is positive
    if vec[0] < 0.0:
        return -vec
    if vec[0] == 0.0:
        for component in vec[1:]:
            if component != 0.0:
                return -vec if component < 0.0 else vec
    return vec


@dataclass(frozen=True, eq=False)
class UnitQuaternion:
    """
    Unit quaternion q = (eta, eps) representing a rotation.

    Construction checks the norm is within 1e-9 of one, renormalizes and
    picks the sign with eta >= 0.

    Attributes:
        eta: Scalar part
        eps: Vector part (3,)
    """

    eta: float
    eps: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float).reshape(3)
        vec = np.concatenate(([float(self.eta)], eps))
        if not np.all(np.isfinite(vec)):
            raise InvalidArgumentError("quaternion has non-finite components")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > UNIT_TOLERANCE:
            raise InvalidArgumentError(f"quaternion is not unit (norm {norm:.12g})")
        vec = _canonical(vec / norm)
        object.__setattr__(self, 'eta', float(vec[0]))
        object.__setattr__(self, 'eps', _frozen(vec[1:], 3))

    @classmethod
    def identity(cls) -> 'UnitQuaternion':
        return cls(1.0, np.zeros(3))

    @classmethod
    def from_vector(cls, vec: ArrayLike, normalize: bool = False) -> 'UnitQuaternion':
        """
        Build from a 4-vector (eta, eps_x, eps_y, eps_z).

        Args:
            vec: Four components, scalar first
            normalize: Scale any nonzero vector to unit length first

        Returns:
            UnitQuaternion
        """
        vec = np.asarray(vec, dtype=float).reshape(4)
        if normalize:
            norm = np.linalg.norm(vec)
            if not np.isfinite(norm) or norm == 0.0:
                raise InvalidArgumentError("cannot normalize a zero quaternion")
            vec = vec / norm
        return cls(vec[0], vec[1:])

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.eta], self.eps))

    def conjugate(self) -> 'UnitQuaternion':
        return UnitQuaternion(self.eta, -self.eps)

    def left_compound(self) -> np.ndarray:
        """q+ such that q (x) p == q+ @ p."""
        out = np.empty((4, 4))
        out[0, 0] = self.eta
        out[0, 1:] = -self.eps
        out[1:, 0] = self.eps
        out[1:, 1:] = self.eta * np.eye(3) + hat(self.eps)
        return out

    def right_compound(self) -> np.ndarray:
        """q(+) such that p (x) q == q(+) @ p."""
        out = np.empty((4, 4))
        out[0, 0] = self.eta
        out[0, 1:] = -self.eps
        out[1:, 0] = self.eps
        out[1:, 1:] = self.eta * np.eye(3) - hat(self.eps)
        return out

    def h_matrix(self) -> np.ndarray:
        """H(q) = [-eps, eta*I + hat(eps)]; H H^T = I and H q = 0."""
        return np.hstack((-self.eps.reshape(3, 1), self.eta * np.eye(3) + hat(self.eps)))

    def as_matrix(self) -> np.ndarray:
        """Rotation matrix, the lower block of q+ @ conj(q)(+)."""
        return (self.left_compound() @ self.conjugate().right_compound())[1:, 1:]

    def dot(self, other: 'UnitQuaternion') -> float:
        return float(np.dot(self.as_array(), as_quaternion(other).as_array()))

    def distance(self, other: 'UnitQuaternion') -> float:
        """arccos |<q, p>|: half the rotation angle between the two."""
        return float(np.arccos(np.clip(abs(self.dot(other)), -1.0, 1.0)))

    def to_dict(self):
        return {'eta': self.eta, 'eps': self.eps.tolist()}

    def __repr__(self):
        return f'<UnitQuaternion {np.array2string(self.as_array(), precision=6)}>'


QuaternionLike = Union[UnitQuaternion, ArrayLike]


def as_quaternion(q: QuaternionLike) -> UnitQuaternion:
    """Coerce a UnitQuaternion or a scalar-first 4-vector."""
    if isinstance(q, UnitQuaternion):
        return q
    return UnitQuaternion.from_vector(q)


def quat_multiply(a: QuaternionLike, b: QuaternionLike) -> UnitQuaternion:
    """
    Hamilton product a (x) b through the left compound operator.

    Args:
        a: Left factor, unit within 1e-9
        b: Right factor, unit within 1e-9

    Returns:
        Renormalized product
    """
    qa, qb = as_quaternion(a), as_quaternion(b)
    return UnitQuaternion.from_vector(qa.left_compound() @ qb.as_array(), normalize=True)


def quat_from_axis_angle(omega: ArrayLike, theta: float) -> UnitQuaternion:
    """
    Quaternion (cos theta/2, omega sin theta/2).

    Args:
        omega: Unit rotation axis
        theta: Angle in radians

    Returns:
        UnitQuaternion
    """
    omega = np.asarray(omega, dtype=float).reshape(3)
    norm = float(np.linalg.norm(omega))
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        raise InvalidArgumentError(f"rotation axis is not unit (norm {norm:.12g})")
    half = 0.5 * float(theta)
    return UnitQuaternion(np.cos(half), omega * np.sin(half))


def quat_rotate_vector(q: QuaternionLike, p: ArrayLike) -> np.ndarray:
    """Rotate p by q via q+ conj(q)(+) [0; p]."""
    q = as_quaternion(q)
    pure = np.concatenate(([0.0], np.asarray(p, dtype=float).reshape(3)))
    return (q.left_compound() @ (q.conjugate().right_compound() @ pure))[1:]


@dataclass(frozen=True, eq=False)
class Twist:
    """
    Joint screw xi = (v, omega).

    Attributes:
        v: Linear part (3,)
        omega: Angular part (3,), zero for prismatic joints
    """

    v: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3)
        omega = np.asarray(self.omega, dtype=float).reshape(3)
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(omega))):
            raise InvalidArgumentError("twist has non-finite components")
        w_norm = float(np.linalg.norm(omega))
        if w_norm > 0.0:
            if abs(w_norm - 1.0) > UNIT_TOLERANCE:
                raise InvalidArgumentError(f"revolute axis is not unit (norm {w_norm:.12g})")
            if abs(float(np.dot(v, omega))) > UNIT_TOLERANCE:
                raise InvalidArgumentError("revolute twist has nonzero pitch (v not orthogonal to omega)")
        else:
            v_norm = float(np.linalg.norm(v))
            if abs(v_norm - 1.0) > UNIT_TOLERANCE:
                raise InvalidArgumentError(f"prismatic direction is not unit (norm {v_norm:.12g})")
        object.__setattr__(self, 'v', _frozen(v, 3))
        object.__setattr__(self, 'omega', _frozen(omega, 3))

    @classmethod
    def revolute(cls, axis: ArrayLike, point: ArrayLike) -> 'Twist':
        """Revolute twist about ``axis`` (normalized) through ``point``."""
        axis = np.asarray(axis, dtype=float).reshape(3)
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise InvalidArgumentError("revolute axis must be nonzero")
        axis = axis / norm
        return cls(-np.cross(axis, np.asarray(point, dtype=float).reshape(3)), axis)

    @classmethod
    def prismatic(cls, direction: ArrayLike) -> 'Twist':
        direction = np.asarray(direction, dtype=float).reshape(3)
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            raise InvalidArgumentError("prismatic direction must be nonzero")
        return cls(direction / norm, np.zeros(3))

    @classmethod
    def from_vector(cls, vec: ArrayLike) -> 'Twist':
        vec = np.asarray(vec, dtype=float).reshape(6)
        return cls(vec[:3], vec[3:])

    @property
    def is_revolute(self) -> bool:
        return bool(np.any(self.omega != 0.0))

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.v, self.omega))

    def transformed(self, g: 'Pose') -> 'Twist':
        """Twist coordinates after a change of frame, Ad_g xi."""
        return Twist.from_vector(adjoint(g).m @ self.as_vector())

    def __repr__(self):
        return f'<Twist v={self.v.tolist()} omega={self.omega.tolist()}>'


@dataclass(frozen=True, eq=False)
class Pose:
    """
    Rigid transform g = (R, p) in SE(3).

    Attributes:
        R: Rotation matrix (3, 3)
        p: Position (3,), meters
    """

    R: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float).reshape(3, 3)
        p = np.asarray(self.p, dtype=float).reshape(3)
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(p))):
            raise InvalidArgumentError("pose has non-finite entries")
        if np.max(np.abs(R.T @ R - np.eye(3))) > ORTHONORMAL_TOLERANCE:
            raise InvalidArgumentError("pose rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOLERANCE:
            raise InvalidArgumentError("pose rotation has determinant != 1")
        object.__setattr__(self, 'R', _frozen(R, (3, 3)))
        object.__setattr__(self, 'p', _frozen(p, 3))

    @classmethod
    def identity(cls) -> 'Pose':
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def translation(cls, x: float, y: float, z: float) -> 'Pose':
        return cls(np.eye(3), [x, y, z])

    @classmethod
    def from_matrix(cls, T: ArrayLike) -> 'Pose':
        """Build from a 4x4 homogeneous matrix."""
        T = np.asarray(T, dtype=float)
        if T.shape != (4, 4):
            raise InvalidArgumentError(f"homogeneous matrix must be 4x4, got {T.shape}")
        return cls(T[:3, :3], T[:3, 3])

    def as_matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.p
        return T

    def compose(self, other: 'Pose') -> 'Pose':
        return compose(self, other)

    def inverse(self) -> 'Pose':
        return inverse(self)

    def __matmul__(self, other: 'Pose') -> 'Pose':
        return compose(self, other)

    def apply(self, point: ArrayLike) -> np.ndarray:
        return self.R @ np.asarray(point, dtype=float).reshape(3) + self.p

    def to_dict(self):
        return {
            'rotation': self.R.tolist(),
            'position': self.p.tolist(),
            'quaternion': to_quaternion(self).as_array().tolist(),
        }

    def __repr__(self):
        return f'<Pose p={np.array2string(self.p, precision=6)}>'


@dataclass(frozen=True, eq=False)
class AdjointMatrix:
    """
    6x6 adjoint Ad_g = [[R, hat(p) R], [0, R]] acting on (v, omega) twists.

    Attributes:
        m: The 6x6 matrix
    """

    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'm', _frozen(self.m, (6, 6)))

    def __matmul__(self, twist):
        if isinstance(twist, Twist):
            return Twist.from_vector(self.m @ twist.as_vector())
        return self.m @ np.asarray(twist, dtype=float)

    def inverse(self) -> 'AdjointMatrix':
        """Closed-form inverse, Ad_{g^-1}."""
        R = self.m[3:, 3:]
        p_hat = self.m[:3, 3:] @ R.T
        out = np.zeros((6, 6))
        out[:3, :3] = R.T
        out[:3, 3:] = -R.T @ p_hat
        out[3:, 3:] = R.T
        return AdjointMatrix(out)


def adjoint_matrix(T: np.ndarray) -> np.ndarray:
    """Raw 6x6 adjoint of a 4x4 homogeneous matrix."""
    R = T[:3, :3]
    out = np.zeros((6, 6))
    out[:3, :3] = R
    out[:3, 3:] = hat(T[:3, 3]) @ R
    out[3:, 3:] = R
    return out


def adjoint(g: Pose) -> AdjointMatrix:
    """
    Adjoint transformation of a pose.

    Args:
        g: Pose of the frame the twist is transformed into

    Returns:
        AdjointMatrix
    """
    return AdjointMatrix(adjoint_matrix(g.as_matrix()))


def exp_twist_matrix(v: np.ndarray, omega: np.ndarray, theta: float) -> np.ndarray:
    """4x4 matrix of exp(theta * hat(xi)) using the closed-form screw formula."""
    T = np.eye(4)
    if not np.any(omega):
        T[:3, 3] = v * theta
        return T
    if abs(theta) < SMALL_ANGLE:
        T[:3, 3] = v * theta
        return T
    R = rodrigues(omega, theta)
    T[:3, :3] = R
    T[:3, 3] = (np.eye(3) - R) @ np.cross(omega, v) + omega * np.dot(omega, v) * theta
    return T


def exp_twist_batch(v: np.ndarray, omega: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Vectorized exp_twist_matrix over an array of angles, shape (N, 4, 4)."""
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    out = np.tile(np.eye(4), (thetas.size, 1, 1))
    if not np.any(omega):
        out[:, :3, 3] = thetas[:, None] * v
        return out
    W = hat(omega)
    s = np.sin(thetas)[:, None, None]
    c = (1.0 - np.cos(thetas))[:, None, None]
    R = np.eye(3) + s * W + c * (W @ W)
    out[:, :3, :3] = R
    w_cross_v = np.cross(omega, v)
    out[:, :3, 3] = (w_cross_v - R @ w_cross_v) + thetas[:, None] * (omega * np.dot(omega, v))
    return out


def exp_twist(xi: Twist, theta: float) -> Pose:
    """
    Rigid motion generated by a twist.

    Args:
        xi: Joint screw
        theta: Joint displacement (rad for revolute, m for prismatic)

    Returns:
        Pose exp(theta * hat(xi))
    """
    T = exp_twist_matrix(xi.v, xi.omega, float(theta))
    return Pose(T[:3, :3], T[:3, 3])


def compose(g1: Pose, g2: Pose) -> Pose:
    return Pose(g1.R @ g2.R, g1.R @ g2.p + g1.p)


def inverse(g: Pose) -> Pose:
    return Pose(g.R.T, -g.R.T @ g.p)


def matrix_inverse(T: np.ndarray) -> np.ndarray:
    """Closed-form inverse of a 4x4 (or stacked Nx4x4) homogeneous matrix."""
    R_t = np.swapaxes(T[..., :3, :3], -1, -2)
    out = np.zeros_like(T)
    out[..., :3, :3] = R_t
    out[..., :3, 3] = -np.einsum('...ij,...j->...i', R_t, T[..., :3, 3])
    out[..., 3, 3] = 1.0
    return out


def to_quaternion(g: Union[Pose, np.ndarray]) -> UnitQuaternion:
    """Rotation part of a pose (or a bare 3x3 rotation) as a canonical quaternion."""
    R = g.R if isinstance(g, Pose) else np.asarray(g, dtype=float)[:3, :3]
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    return UnitQuaternion.from_vector([w, x, y, z], normalize=True)


def from_quaternion(q: QuaternionLike, p: ArrayLike = (0.0, 0.0, 0.0)) -> Pose:
    return Pose(as_quaternion(q).as_matrix(), p)


def project_to_rotation(M: ArrayLike) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius sense (SVD projection)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float).reshape(3, 3))
    D = np.diag([1.0, 1.0, np.sign(np.linalg.det(U @ Vt))])
    return U @ D @ Vt


def rotation_vector(R: np.ndarray) -> np.ndarray:
    """Axis-angle vector of a rotation matrix."""
    return Rotation.from_matrix(R).as_rotvec()


def pose_distance(a: Pose, b: Pose) -> Tuple[float, float]:
    """
    Position and rotation distance between two poses.

    Returns:
        (meters, radians of the rotation a.R^T b.R)
    """
    return (float(np.linalg.norm(a.p - b.p)),
            float(np.linalg.norm(rotation_vector(a.R.T @ b.R))))
