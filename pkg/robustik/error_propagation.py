"""
Propagation of the joint error ball to task-space error ellipsoids and
worst-case relative position/orientation errors.
"""
import logging
from typing import Optional, Tuple, Union

import numpy as np

from robustik.config import Config
from robustik.errors import InvalidArgumentError
from robustik.models.arm import JacobianMatrix
from robustik.models.noise import JointNoiseModel
from robustik.models.results import ErrorEllipsoid, WorstCaseError
from robustik.models.se3 import QuaternionLike, UnitQuaternion, as_quaternion

logger = logging.getLogger(__name__)

EIGEN_FLOOR = Config.EIGEN_FLOOR


def joint_error_bound(model: JointNoiseModel) -> float:
    """Squared radius c = (k sigma)^2 of the joint error ball."""
    return model.c


def _check_c(c: float) -> float:
    c = float(c)
    if not np.isfinite(c) or c < 0.0:
        raise InvalidArgumentError(f"error bound c must be finite and >= 0, got {c}")
    return c


def _check_block(J: np.ndarray, name: str) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != 3:
        raise InvalidArgumentError(f"{name} must be 3 x N, got {J.shape}")
    if not np.all(np.isfinite(J)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    return J


def _top_eigen(M: np.ndarray) -> Tuple[float, np.ndarray]:
    values, vectors = np.linalg.eigh(0.5 * (M + M.T))
    return max(float(values[-1]), 0.0), vectors[:, -1]


def max_position_error(J_p: np.ndarray, c: float) -> float:
    """
    Worst relative position error sqrt(c * lambda_max(J_p J_p^T)).

    This is the longest semi-axis of the position error ellipsoid, i.e.
    the maximum of |J_p dTheta| over dTheta^T dTheta <= c.

    Args:
        J_p: Linear rows of the analytical relative Jacobian, 3 x (n+m)
        c: Joint error bound

    Returns:
        p_star in meters
    """
    J_p = _check_block(J_p, 'J_p')
    c = _check_c(c)
    lam, _ = _top_eigen(J_p @ J_p.T)
    return float(np.sqrt(c * lam))


def max_orientation_error(J_r: np.ndarray, q_rel: QuaternionLike, c: float) -> Tuple[float, UnitQuaternion]:
    """
    Worst relative orientation error as a quaternion distance.

    v* = 1/2 sqrt(c lambda_max) V_max with (lambda_max, V_max) the top
    eigenpair of J_r J_r^T; q* = normalize(q_rel + H(q_rel)^T v*) and
    o_star = arccos(q_rel . q*).

    Args:
        J_r: Angular rows of the relative Jacobian, 3 x (n+m)
        q_rel: Nominal relative orientation
        c: Joint error bound

    Returns:
        (o_star in rad, worst-case orientation q*)
    """
    J_r = _check_block(J_r, 'J_r')
    c = _check_c(c)
    q_rel = as_quaternion(q_rel)
    lam, direction = _top_eigen(J_r @ J_r.T)
    if lam <= EIGEN_FLOOR or c == 0.0:
        return 0.0, q_rel
    v_star = 0.5 * np.sqrt(c * lam) * direction
    q_vec = q_rel.as_array()
    q_star = UnitQuaternion.from_vector(q_vec + q_rel.h_matrix().T @ v_star, normalize=True)
    # the raw perturbed vector keeps q_rel's sign, so compare before canonicalization
    o_star = float(np.arccos(np.clip(abs(np.dot(q_vec, q_star.as_array())), -1.0, 1.0)))
    return o_star, q_star


def weighted_metric(p_star: float, o_star: float, gamma: float = 0.0) -> float:
    """M* = P* + gamma O*."""
    for name, value in (('p_star', p_star), ('o_star', o_star), ('gamma', gamma)):
        if not np.isfinite(value) or value < 0.0:
            raise InvalidArgumentError(f"{name} must be finite and >= 0, got {value}")
    return float(p_star) + float(gamma) * float(o_star)


def worst_case_error(J_a: JacobianMatrix, q_rel: QuaternionLike, c: float, gamma: float = 0.0) -> WorstCaseError:
    """
    P*, O* and M* of one configuration.

    Args:
        J_a: Analytical relative Jacobian
        q_rel: Relative orientation at the same configuration
        c: Joint error bound
        gamma: Orientation weight, m/rad

    Returns:
        WorstCaseError
    """
    if J_a.kind != 'analytical_relative':
        raise InvalidArgumentError(f"expected an analytical_relative Jacobian, got '{J_a.kind}'")
    p_star = max_position_error(J_a.linear, c)
    o_star, _ = max_orientation_error(J_a.angular, q_rel, c)
    m_star = weighted_metric(p_star, o_star, gamma)
    return WorstCaseError(float(p_star), float(o_star), m_star, float(gamma))


def _floored_inverse(M: np.ndarray) -> Tuple[np.ndarray, bool]:
    values, vectors = np.linalg.eigh(0.5 * (M + M.T))
    keep = values > EIGEN_FLOOR
    inv_values = np.zeros_like(values)
    inv_values[keep] = 1.0 / values[keep]
    return (vectors * inv_values) @ vectors.T, not bool(np.all(keep))


def build_ellipsoids(J_a: JacobianMatrix, q_rel: QuaternionLike,
                     c: float) -> Tuple[ErrorEllipsoid, ErrorEllipsoid]:
    """
    Position and orientation error ellipsoids.

    Position: dX^T (J_p J_p^T)^-1 dX <= c. Orientation:
    dq^T H^T (J_r J_r^T)^-1 H dq <= c/4. Rank-deficient blocks use a
    pseudo-inverse with eigenvalue floor 1e-14 and are flagged degenerate.

    Args:
        J_a: Analytical relative Jacobian
        q_rel: Relative orientation at the same configuration
        c: Joint error bound

    Returns:
        (position ellipsoid, orientation ellipsoid)
    """
    if J_a.kind != 'analytical_relative':
        raise InvalidArgumentError(f"expected an analytical_relative Jacobian, got '{J_a.kind}'")
    c = _check_c(c)
    if not np.all(np.isfinite(J_a.m)):
        raise InvalidArgumentError("Jacobian has non-finite entries")

    J_p, J_r = J_a.linear, J_a.angular
    position_char, position_degenerate = _floored_inverse(J_p @ J_p.T)
    H = as_quaternion(q_rel).h_matrix()
    rotation_inv, orientation_degenerate = _floored_inverse(J_r @ J_r.T)
    orientation_char = H.T @ rotation_inv @ H

    if position_degenerate or orientation_degenerate:
        logger.debug("degenerate error ellipsoid (position=%s, orientation=%s)",
                     position_degenerate, orientation_degenerate)
    return (ErrorEllipsoid(position_char, c, 'position', position_degenerate),
            ErrorEllipsoid(orientation_char, c / 4.0, 'orientation', orientation_degenerate))


def sample_joint_noise(model: JointNoiseModel, count: int,
                       seed: Optional[Union[int, np.random.Generator]] = None) -> np.ndarray:
    """
    Draw i.i.d. zero-mean Gaussian joint errors.

    Samples are not truncated to the k-sigma ball.

    Args:
        model: Noise model (sigma, dim)
        count: Number of samples
        seed: Integer seed or an existing generator owned by the caller

    Returns:
        (count, dim) array
    """
    if int(count) < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if model.sigma == 0.0:
        return np.zeros((int(count), model.dim))
    return rng.normal(0.0, model.sigma, size=(int(count), model.dim))
