"""
Product-of-exponentials kinematics of single arms and of the dual-arm
pseudo chain.

The relative pose of the right hand in the left hand frame is

    g_rel = g_L0^-1 (prod_{i=n..1} exp(-xi_iL th_iL)) (prod_{j=1..m} exp(xi_jR th_jR)) g_R0

i.e. one serial chain with joints nL..1L, 1R..mR. Jacobian columns are
assembled from closed-form adjoint expressions while carrying the running
prefix product along the chain; finite differences only serve as a test
oracle.
"""
import logging
from typing import Tuple

import numpy as np

from robustik.errors import InvalidArgumentError, NumericalError
from robustik.models.arm import ArmModel, DualArmModel, JacobianMatrix, JointLike, JointVector, joint_values
from robustik.models.se3 import (
    Pose,
    UnitQuaternion,
    adjoint_matrix,
    exp_twist_batch,
    exp_twist_matrix,
    hat,
    matrix_inverse,
    quat_from_axis_angle,
    quat_multiply,
    quat_rotate_vector,
    to_quaternion,
    vee,
)

logger = logging.getLogger(__name__)

FD_STEP_RANGE = (1e-8, 1e-3)


def _side_values(theta: JointLike, expected: int, side: str) -> np.ndarray:
    if isinstance(theta, JointVector) and theta.layout != side:
        raise InvalidArgumentError(f"expected a {side} joint vector, got layout '{theta.layout}'")
    return joint_values(theta, expected, f'theta_{side}')


def _fk_matrix(arm: ArmModel, theta: np.ndarray) -> np.ndarray:
    T = np.eye(4)
    for twist, angle in zip(arm.twists, theta):
        T = T @ exp_twist_matrix(twist.v, twist.omega, angle)
    return T @ arm.g0.as_matrix()


def _to_pose(T: np.ndarray) -> Pose:
    if not np.all(np.isfinite(T)):
        raise NumericalError("kinematics produced non-finite pose entries")
    return Pose(T[:3, :3], T[:3, 3])


def forward_kinematics(arm: ArmModel, theta: JointLike) -> Pose:
    """
    End-effector pose (prod_i exp(th_i xi_i)) g0, product ordered base to tip.

    Args:
        arm: Arm model
        theta: Joint values (left or right layout)

    Returns:
        Pose in the base frame
    """
    layout = theta.layout if isinstance(theta, JointVector) else None
    if layout == 'pseudo':
        raise InvalidArgumentError("forward kinematics takes a single-arm joint vector")
    values = joint_values(theta, arm.dof, 'theta')
    return _to_pose(_fk_matrix(arm, values))


def forward_kinematics_batch(arm: ArmModel, thetas: np.ndarray) -> np.ndarray:
    """
    Vectorized forward kinematics.

    Args:
        arm: Arm model
        thetas: (N, dof) joint values

    Returns:
        (N, 4, 4) homogeneous matrices
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != arm.dof:
        raise InvalidArgumentError(f"expected (N, {arm.dof}) joint array, got {thetas.shape}")
    T = np.tile(np.eye(4), (thetas.shape[0], 1, 1))
    for index, twist in enumerate(arm.twists):
        T = T @ exp_twist_batch(twist.v, twist.omega, thetas[:, index])
    return T @ arm.g0.as_matrix()


def relative_pose_matrix(dual: DualArmModel, theta_left: JointLike, theta_right: JointLike) -> np.ndarray:
    """4x4 matrix of g_L^-1 g_R."""
    left = _side_values(theta_left, dual.n, 'left')
    right = _side_values(theta_right, dual.m, 'right')
    return matrix_inverse(_fk_matrix(dual.left, left)) @ _fk_matrix(dual.right, right)


def relative_pose(dual: DualArmModel, theta_left: JointLike, theta_right: JointLike) -> Pose:
    """
    Pose of the right hand in the left hand frame, g_L^-1 g_R.

    Args:
        dual: Dual-arm model
        theta_left: Left joints (n)
        theta_right: Right joints (m)

    Returns:
        Relative pose
    """
    return _to_pose(relative_pose_matrix(dual, theta_left, theta_right))


def pseudo_chain_pose(dual: DualArmModel, theta_left: JointLike, theta_right: JointLike) -> Pose:
    """Relative pose evaluated as the pseudo-chain product of exponentials."""
    pseudo = dual.pseudo_vector(_side_values(theta_left, dual.n, 'left'),
                                _side_values(theta_right, dual.m, 'right')).values
    T = matrix_inverse(dual.left.g0.as_matrix())
    for (twist, sign), angle in zip(dual.pseudo_chain(), pseudo):
        T = T @ exp_twist_matrix(sign * twist.v, sign * twist.omega, angle)
    return _to_pose(T @ dual.right.g0.as_matrix())


def relative_spatial_jacobian(dual: DualArmModel, theta_left: JointLike, theta_right: JointLike) -> JacobianMatrix:
    """
    Spatial relative Jacobian, columns ordered nL..1L, 1R..mR.

    Left column k is -Ad_(g_L0^-1 prod_{i=n..k+1} exp(-xi_iL th_iL)) xi_kL,
    right column k is Ad_(g_L^-1 prod_{j<k} exp(xi_jR th_jR)) xi_kR.

    Args:
        dual: Dual-arm model
        theta_left: Left joints (n)
        theta_right: Right joints (m)

    Returns:
        JacobianMatrix of kind 'spatial_relative'
    """
    pseudo = dual.pseudo_vector(_side_values(theta_left, dual.n, 'left'),
                                _side_values(theta_right, dual.m, 'right')).values
    prefix = matrix_inverse(dual.left.g0.as_matrix())
    columns = np.empty((6, dual.dof))
    for index, ((twist, sign), angle) in enumerate(zip(dual.pseudo_chain(), pseudo)):
        v, omega = sign * twist.v, sign * twist.omega
        columns[:, index] = adjoint_matrix(prefix) @ np.concatenate((v, omega))
        prefix = prefix @ exp_twist_matrix(v, omega, angle)
    if not np.all(np.isfinite(columns)):
        raise NumericalError("relative Jacobian has non-finite entries")
    return JacobianMatrix(columns, 'spatial_relative')


def analytical_from_spatial(J: JacobianMatrix, g_rel: Pose) -> JacobianMatrix:
    """
    Analytical Jacobian [I, -hat(p_rel); 0, I] J_s.

    Rows 0-2 then give the velocity of the relative frame origin.

    Args:
        J: Spatial relative Jacobian
        g_rel: Relative pose at the same configuration

    Returns:
        JacobianMatrix of kind 'analytical_relative'
    """
    if J.kind != 'spatial_relative':
        raise InvalidArgumentError(f"expected a spatial_relative Jacobian, got '{J.kind}'")
    A = np.eye(6)
    A[:3, 3:] = -hat(g_rel.p)
    return JacobianMatrix(A @ J.m, 'analytical_relative')


def relative_analytical_jacobian(dual: DualArmModel, theta_left: JointLike,
                                 theta_right: JointLike) -> Tuple[JacobianMatrix, Pose]:
    """Analytical relative Jacobian together with the relative pose it was taken at."""
    g_rel = relative_pose(dual, theta_left, theta_right)
    return analytical_from_spatial(relative_spatial_jacobian(dual, theta_left, theta_right), g_rel), g_rel


def quaternion_jacobian(dual: DualArmModel, theta_left: JointLike,
                        theta_right: JointLike) -> Tuple[np.ndarray, UnitQuaternion]:
    """
    Orientation Jacobian J_r built from quaternion products.

    dq_rel/dTheta = 1/2 H(q_rel)^T J_r with left columns -R_kL w_kL and
    right columns R_kR w_kR, where R_kL = R_0L^T prod_{i=n..k+1} exp(-hat(w_iL) th_iL).

    Args:
        dual: Dual-arm model
        theta_left: Left joints (n)
        theta_right: Right joints (m)

    Returns:
        (3 x (n+m) matrix J_r, relative orientation q_rel)
    """
    left = _side_values(theta_left, dual.n, 'left')
    right = _side_values(theta_right, dual.m, 'right')
    columns = np.zeros((3, dual.dof))
    q_s = to_quaternion(dual.left.g0).conjugate()

    column = 0
    for twist, angle in zip(reversed(dual.left.twists), left[::-1]):
        if twist.is_revolute:
            columns[:, column] = -quat_rotate_vector(q_s, twist.omega)
            q_s = quat_multiply(q_s, quat_from_axis_angle(twist.omega, angle).conjugate())
        column += 1
    for twist, angle in zip(dual.right.twists, right):
        if twist.is_revolute:
            columns[:, column] = quat_rotate_vector(q_s, twist.omega)
            q_s = quat_multiply(q_s, quat_from_axis_angle(twist.omega, angle))
        column += 1

    q_rel = quat_multiply(q_s, to_quaternion(dual.right.g0))
    return columns, q_rel


def quaternion_derivative(J_r: np.ndarray, q_rel: UnitQuaternion) -> np.ndarray:
    """dq_rel/dTheta = 1/2 H(q_rel)^T J_r, shape (4, n+m)."""
    return 0.5 * q_rel.h_matrix().T @ np.asarray(J_r, dtype=float)


def finite_difference_relative_jacobian(dual: DualArmModel, theta_left: JointLike,
                                        theta_right: JointLike, step: float = 1e-6) -> np.ndarray:
    """
    Central-difference estimate of (dg_rel/dth g_rel^-1)^vee per pseudo joint.

    Args:
        dual: Dual-arm model
        theta_left: Left joints (n)
        theta_right: Right joints (m)
        step: Perturbation in [1e-8, 1e-3]

    Returns:
        6 x (n+m) matrix
    """
    lo, hi = FD_STEP_RANGE
    if not lo <= step <= hi:
        raise InvalidArgumentError(f"finite-difference step must lie in [{lo}, {hi}], got {step}")
    pseudo = dual.pseudo_vector(_side_values(theta_left, dual.n, 'left'),
                                _side_values(theta_right, dual.m, 'right'))
    T0_inv = matrix_inverse(relative_pose_matrix(dual, *pseudo.split(dual.n)))
    columns = np.empty((6, dual.dof))
    for index in range(dual.dof):
        offset = np.zeros(dual.dof)
        offset[index] = step
        plus = JointVector(pseudo.values + offset, 'pseudo').split(dual.n)
        minus = JointVector(pseudo.values - offset, 'pseudo').split(dual.n)
        dT = (relative_pose_matrix(dual, *plus) - relative_pose_matrix(dual, *minus)) / (2.0 * step)
        X = dT @ T0_inv
        columns[:3, index] = X[:3, 3]
        columns[3:, index] = vee(X[:3, :3])
    return columns


def arm_spatial_jacobian(arm: ArmModel, theta: JointLike) -> np.ndarray:
    """Spatial Jacobian of one arm; column i is Ad_(prod_{j<i} exp(xi_j th_j)) xi_i."""
    values = joint_values(theta, arm.dof, 'theta')
    prefix = np.eye(4)
    columns = np.empty((6, arm.dof))
    for index, (twist, angle) in enumerate(zip(arm.twists, values)):
        columns[:, index] = adjoint_matrix(prefix) @ twist.as_vector()
        prefix = prefix @ exp_twist_matrix(twist.v, twist.omega, angle)
    return columns


def arm_analytical_jacobian(arm: ArmModel, theta: JointLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Analytical Jacobian of one arm and its end-effector matrix.

    Returns:
        (6 x dof Jacobian mapping joint rates to [p_dot; omega_spatial], 4x4 pose)
    """
    values = joint_values(theta, arm.dof, 'theta')
    T = _fk_matrix(arm, values)
    A = np.eye(6)
    A[:3, 3:] = -hat(T[:3, 3])
    return A @ arm_spatial_jacobian(arm, values), T
