"""
Candidate IK-pair enumeration, worst-case scoring and robust selection.

Enumeration solves each arm separately with damped least squares from
scrambled Halton seeds (plus a sweep over a locked redundancy joint for
arms with more than six joints), deduplicates the per-arm solutions and
pairs them up.
"""
import itertools
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from robustik.config import IKSettings
from robustik.error_propagation import worst_case_error
from robustik.errors import InvalidArgumentError, NoSolutionError, NumericalError
from robustik.kinematics import (
    arm_analytical_jacobian,
    forward_kinematics,
    quaternion_jacobian,
    relative_analytical_jacobian,
    relative_pose,
)
from robustik.models.arm import ArmModel, DualArmModel
from robustik.models.noise import JointNoiseModel
from robustik.models.results import FeasibilityReport, IKPair, WorstCaseError
from robustik.models.se3 import Pose, pose_distance, rotation_vector
from robustik.utils.helpers import derive_int_seed, halton_seeds, infinity_distance, wrap_angles

logger = logging.getLogger(__name__)

MAX_STEP = 0.5
STALL_WINDOW = 25

Scorer = Callable[[DualArmModel, IKPair, JointNoiseModel, float], WorstCaseError]


def _pose_error(T_target: np.ndarray, T: np.ndarray) -> np.ndarray:
    return np.concatenate((T_target[:3, 3] - T[:3, 3],
                           rotation_vector(T_target[:3, :3] @ T[:3, :3].T)))


def solve_arm_ik(arm: ArmModel, target: Pose, seed: np.ndarray, settings: IKSettings = IKSettings(),
                 locked_joint: Optional[int] = None) -> Optional[np.ndarray]:
    """
    Damped-least-squares IK for one arm from one seed configuration.

    Args:
        arm: Arm model
        target: Desired end-effector pose
        seed: Initial joint values
        settings: Damping, tolerance and iteration cap
        locked_joint: Joint held at its seed value

    Returns:
        Joint values (wrapped, inside limits) or None when the solve
        did not converge or left the limits
    """
    theta = np.array(seed, dtype=float)
    T_target = target.as_matrix()
    damping = settings.damping ** 2 * np.eye(6)
    best, stall = np.inf, 0
    converged = False

    for _ in range(settings.max_iterations):
        J, T = arm_analytical_jacobian(arm, theta)
        error = _pose_error(T_target, T)
        norm = float(np.linalg.norm(error))
        if norm < settings.tolerance:
            converged = True
            break
        if norm < best * (1.0 - 1e-3):
            best, stall = norm, 0
        else:
            stall += 1
            if stall >= STALL_WINDOW:
                break
        if locked_joint is not None:
            J[:, locked_joint] = 0.0
        step = J.T @ np.linalg.solve(J @ J.T + damping, error)
        step_norm = float(np.max(np.abs(step)))
        if step_norm > MAX_STEP:
            step *= MAX_STEP / step_norm
        theta = theta + step

    if not converged or not np.all(np.isfinite(theta)):
        return None
    theta = wrap_angles(theta, arm.revolute_mask, arm.joint_limits)
    if not arm.within_limits(theta):
        return None
    return theta


def dedupe(solutions: Sequence[np.ndarray], tolerance: float) -> List[np.ndarray]:
    """Keep the first of every group of solutions within ``tolerance`` in the infinity norm."""
    kept: List[np.ndarray] = []
    for solution in solutions:
        if all(infinity_distance(solution, other) > tolerance for other in kept):
            kept.append(solution)
    return kept


def _arm_solutions(arm: ArmModel, target: Pose, settings: IKSettings, side: int,
                   stats: Dict[str, int]) -> List[np.ndarray]:
    bounds = arm.bounds()
    runs = [(None, s) for s in halton_seeds(bounds, settings.seeds, derive_int_seed(settings.seed, side))]

    if arm.dof > 6 and settings.redundancy_steps > 0:
        joint = settings.redundancy_joint
        if not 0 <= joint < arm.dof:
            raise InvalidArgumentError(f"redundancy joint {joint} out of range for a {arm.dof}-joint arm")
        lo, hi = bounds[joint]
        for step, value in enumerate(np.linspace(lo, hi, settings.redundancy_steps)):
            seeds = halton_seeds(bounds, settings.redundancy_seeds,
                                 derive_int_seed(settings.seed, side, step + 1))
            seeds[:, joint] = value
            runs.extend((joint, s) for s in seeds)

    found = []
    for locked, start in runs:
        solution = solve_arm_ik(arm, target, start, settings, locked)
        if solution is None:
            stats['dropped'] += 1
            continue
        found.append(solution)
    stats['seeds'] += len(runs)
    stats['converged'] += len(found)
    unique = dedupe(found, settings.dedup_tolerance)
    logger.debug("arm %d: %d runs, %d converged, %d unique", side, len(runs), len(found), len(unique))
    return unique


def _new_diagnostics() -> Dict[str, int]:
    return {'seeds': 0, 'converged': 0, 'dropped': 0, 'left_solutions': 0,
            'right_solutions': 0, 'pairs': 0, 'rejected_pairs': 0}


def enumerate_ik_pairs(dual: DualArmModel, g_L: Pose, g_R: Pose, settings: IKSettings = IKSettings(),
                       diagnostics: Optional[Dict[str, int]] = None) -> List[IKPair]:
    """
    Enumerate candidate IK pairs reaching both gripper targets.

    Args:
        dual: Dual-arm model
        g_L: Left gripper target in the base frame
        g_R: Right gripper target in the base frame
        settings: Enumeration knobs
        diagnostics: Optional dict updated with seed and solution counts

    Returns:
        Unscored pairs, empty when either target is unreachable
    """
    stats = _new_diagnostics() if diagnostics is None else diagnostics
    for key, value in _new_diagnostics().items():
        stats.setdefault(key, value)

    left = _arm_solutions(dual.left, g_L, settings, 0, stats)
    right = _arm_solutions(dual.right, g_R, settings, 1, stats) if left else []
    stats['left_solutions'] += len(left)
    stats['right_solutions'] += len(right)
    if not left or not right:
        logger.warning("target unreachable: %d left and %d right solutions", len(left), len(right))
        return []

    target_rel = g_L.inverse() @ g_R
    pairs = []
    for theta_left, theta_right in itertools.product(left, right):
        achieved = relative_pose(dual, theta_left, theta_right)
        position, rotation = pose_distance(achieved, target_rel)
        if position > settings.pose_tolerance or rotation > settings.pose_tolerance:
            stats['rejected_pairs'] += 1
            logger.warning("dropping pair with relative residual %.3g m, %.3g rad", position, rotation)
            continue
        pairs.append(IKPair(theta_left, theta_right, residual=position + rotation))
    stats['pairs'] += len(pairs)
    logger.info("enumerated %d IK pairs (%d left x %d right)", len(pairs), len(left), len(right))
    return pairs


def enumerate_relative_ik_pairs(dual: DualArmModel, g_rel: Pose, settings: IKSettings = IKSettings(),
                                diagnostics: Optional[Dict[str, int]] = None) -> List[IKPair]:
    """
    Enumerate pairs for a relative target only, the left pose left free.

    Left gripper targets are forward kinematics of scrambled Halton
    configurations; the right arm is solved for g_L g_rel.

    Args:
        dual: Dual-arm model
        g_rel: Desired right gripper pose in the left gripper frame
        settings: Enumeration knobs
        diagnostics: Optional dict updated with counts

    Returns:
        Unscored pairs deduplicated in the pseudo joint space
    """
    stats = _new_diagnostics() if diagnostics is None else diagnostics
    samples = halton_seeds(dual.left.bounds(), settings.relative_left_samples,
                           derive_int_seed(settings.seed, 2))
    pairs: List[IKPair] = []
    for sample in samples:
        g_L = forward_kinematics(dual.left, sample)
        for pair in enumerate_ik_pairs(dual, g_L, g_L @ g_rel, settings, stats):
            if all(infinity_distance(pair.pseudo.values, kept.pseudo.values) > settings.dedup_tolerance
                   for kept in pairs):
                pairs.append(pair)
    return pairs


def _check_residual(dual: DualArmModel, pair: IKPair, target_rel: Optional[Pose], tolerance: float):
    if target_rel is None:
        if pair.residual is not None and pair.residual > 2.0 * tolerance:
            raise InvalidArgumentError(f"pair residual {pair.residual:.3g} exceeds the pose tolerance")
        return
    position, rotation = pose_distance(relative_pose(dual, pair.theta_left, pair.theta_right), target_rel)
    if position > tolerance or rotation > tolerance:
        raise InvalidArgumentError(
            f"pair misses the relative target by {position:.3g} m, {rotation:.3g} rad")


def check_literal_pairs(dual: DualArmModel, pairs: Sequence[IKPair], target_rel: Pose,
                        tolerance: float = IKSettings.pose_tolerance,
                        diagnostics: Optional[Dict[str, int]] = None) -> List[IKPair]:
    """
    Measure given pairs against a relative target.

    Pairs missing the target by more than ``tolerance`` in position or
    rotation are dropped and counted under ``literal_dropped``.

    Args:
        dual: Dual-arm model
        pairs: Pairs read from a file, residual unknown
        target_rel: Desired right gripper pose in the left gripper frame
        tolerance: Pose tolerance
        diagnostics: Optional dict updated with the drop count

    Returns:
        The pairs on target, with their measured residual
    """
    kept = []
    dropped = 0
    for pair in pairs:
        position, rotation = pose_distance(relative_pose(dual, pair.theta_left, pair.theta_right), target_rel)
        if position > tolerance or rotation > tolerance:
            dropped += 1
            logger.warning("pair %s misses the relative target by %.3g m, %.3g rad; not a candidate",
                           pair.label or '?', position, rotation)
            continue
        kept.append(pair.with_residual(position + rotation))
    if diagnostics is not None:
        diagnostics['literal_dropped'] = diagnostics.get('literal_dropped', 0) + dropped
    return kept


def score_pair(dual: DualArmModel, pair: IKPair, noise: JointNoiseModel, gamma: float = 0.0,
               target_rel: Optional[Pose] = None, tolerance: float = IKSettings.pose_tolerance) -> WorstCaseError:
    """
    Worst-case errors of a pair under the joint error ball.

    Args:
        dual: Dual-arm model
        pair: Candidate pair
        noise: Joint noise model (c = (k sigma)^2)
        gamma: Orientation weight, m/rad
        target_rel: Relative target to check the pair against
        tolerance: Pose tolerance for that check

    Returns:
        WorstCaseError
    """
    _check_residual(dual, pair, target_rel, tolerance)
    J_a, _ = relative_analytical_jacobian(dual, pair.theta_left, pair.theta_right)
    if not np.all(np.isfinite(J_a.m)):
        raise NumericalError("relative Jacobian has non-finite entries")
    _, q_rel = quaternion_jacobian(dual, pair.theta_left, pair.theta_right)
    return worst_case_error(J_a, q_rel, noise.c, gamma)


def score_pairs(dual: DualArmModel, pairs: Sequence[IKPair], noise: JointNoiseModel, gamma: float = 0.0,
                scorer: Optional[Scorer] = None) -> List[IKPair]:
    """
    Score every pair that has no score yet.

    Existing scores are kept as they are, whatever noise model produced
    them.
    """
    scorer = scorer or score_pair
    return [pair if pair.score is not None else pair.with_score(scorer(dual, pair, noise, gamma))
            for pair in pairs]


def _scored(dual: DualArmModel, pairs: Sequence[IKPair], noise: Optional[JointNoiseModel],
            gamma: float, scorer: Optional[Scorer]) -> List[IKPair]:
    if noise is None:
        if any(pair.score is None for pair in pairs):
            raise InvalidArgumentError("ranking without a noise model needs scored pairs")
        return list(pairs)
    scorer = scorer or score_pair
    return [pair.with_score(scorer(dual, pair, noise, gamma)) for pair in pairs]


def _ranking(dual: DualArmModel, pairs: Sequence[IKPair]):
    middle = dual.pseudo_mid_range()
    return [(p.score.m_star, p.score.p_star, infinity_distance(p.pseudo.values, middle), index)
            for index, p in enumerate(pairs)]


def select_robust_pair(dual: DualArmModel, pairs: Sequence[IKPair], noise: Optional[JointNoiseModel] = None,
                       gamma: float = 0.0, scorer: Optional[Scorer] = None) -> IKPair:
    """
    The pair minimizing M*.

    Ties are broken by smaller P*, then by the infinity-norm distance to
    mid-range joint values, then by input order.

    Args:
        dual: Dual-arm model
        pairs: Candidates
        noise: Joint noise model every pair is scored under; None ranks
            the scores the pairs already carry
        gamma: Orientation weight
        scorer: Replacement for ``score_pair``

    Returns:
        The selected, scored pair
    """
    if not pairs:
        raise NoSolutionError("no IK solutions to select from")
    scored = _scored(dual, pairs, noise, gamma, scorer)
    index = min(_ranking(dual, scored))[-1]
    logger.info("selected pair %d of %d with M* = %.6g", index, len(scored), scored[index].score.m_star)
    return scored[index]


def worst_pair(dual: DualArmModel, pairs: Sequence[IKPair], noise: Optional[JointNoiseModel] = None,
               gamma: float = 0.0, scorer: Optional[Scorer] = None) -> IKPair:
    """The pair maximizing M*, first in input order among equals. ``noise`` as in ``select_robust_pair``."""
    if not pairs:
        raise NoSolutionError("no IK solutions to compare")
    scored = _scored(dual, pairs, noise, gamma, scorer)
    index = max(range(len(scored)), key=lambda i: (scored[i].score.m_star, -i))
    return scored[index]


def feasibility_check(best: IKPair, epsilon: float) -> FeasibilityReport:
    """
    Compare the best pair's worst-case error with the task tolerance.

    Args:
        best: Scored pair
        epsilon: Tolerance, m

    Returns:
        FeasibilityReport; feasible when m_star <= epsilon
    """
    if best.score is None:
        raise InvalidArgumentError("feasibility needs a scored pair")
    if not np.isfinite(epsilon) or epsilon < 0.0:
        raise InvalidArgumentError(f"epsilon must be finite and >= 0, got {epsilon}")
    m_star = best.score.m_star
    return FeasibilityReport(float(epsilon), best, bool(m_star <= epsilon), float(epsilon - m_star))
