"""
Square peg-in-hole assembly: task error measure, vertex projection test,
Monte Carlo success rates and sweeps over noise level and clearance.

The peg is held by the left gripper and the hole by the right one. All
simulation works on the tip relative pose

    g_tip = g_peg^-1 g_rel g_hole

(the hole-tip frame seen from the peg-tip frame), in batches of 4x4
matrices.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from robustik.error_propagation import max_orientation_error, sample_joint_noise
from robustik.errors import InvalidArgumentError
from robustik.kinematics import forward_kinematics_batch, quaternion_jacobian, relative_analytical_jacobian
from robustik.models.arm import DualArmModel
from robustik.models.noise import JointNoiseModel
from robustik.models.results import IKPair, SweepResult, TrialOutcome, WorstCaseError
from robustik.models.se3 import Pose, hat, matrix_inverse
from robustik.models.task import TaskSpec
from robustik.robust_ik import Scorer, score_pair
from robustik.utils.helpers import derive_seed

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-12
PARALLEL_TOLERANCE = 1e-9

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]

# peg face corners (+,+), (-,+), (-,-), (+,-) in units of half the peg width
_CORNERS = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def tip_relative_pose(g_rel: Pose, task: TaskSpec) -> Pose:
    """
    Hole-tip frame in the peg-tip frame.

    Args:
        g_rel: Right gripper pose in the left gripper frame
        task: Task geometry (tip offsets)

    Returns:
        g_peg^-1 g_rel g_hole
    """
    return task.peg_offset.inverse() @ g_rel @ task.hole_offset


def _tip_error(desired_tip: np.ndarray, achieved_tip: np.ndarray, h_p: float) -> np.ndarray:
    # |p_d - p_a| on tip frames equals |p_rel_d - p_rel_a + l_h (z_d - z_a)| on gripper frames
    position = np.linalg.norm(desired_tip[..., :3, 3] - achieved_tip[..., :3, 3], axis=-1)
    sin_angle = np.linalg.norm(np.cross(desired_tip[..., :3, 0], achieved_tip[..., :3, 0]), axis=-1)
    return position + h_p * sin_angle


def assembly_error_measure(desired: Pose, achieved: Pose, task: TaskSpec) -> float:
    """
    Task error between a desired and an achieved relative gripper pose.

    |p_d - p_a + l_h (z_d - z_a)| + h_p |sin dtheta|, with dtheta the
    angle between the two x axes.

    Args:
        desired: Desired g_rel
        achieved: Achieved g_rel
        task: Task geometry

    Returns:
        Error in meters
    """
    desired_tip = tip_relative_pose(desired, task).as_matrix()
    achieved_tip = tip_relative_pose(achieved, task).as_matrix()
    return float(_tip_error(desired_tip, achieved_tip, task.h_p))


def _vertex_margins(T_tip: np.ndarray, task: TaskSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Signed vertex margins (N, 4) and a mask of trials whose peg axis meets the hole plane."""
    T_hp = matrix_inverse(T_tip)
    R, p = T_hp[:, :3, :3], T_hp[:, :3, 3]
    corners = 0.5 * task.w_p * _CORNERS
    vertices = p[:, None, :] + np.einsum('nij,kj->nki', R[:, :, :2], corners)

    direction = R[:, :, 2]
    valid = np.abs(direction[:, 2]) >= PARALLEL_TOLERANCE
    safe_dz = np.where(valid, direction[:, 2], 1.0)
    t = -vertices[:, :, 2] / safe_dz[:, None]
    projected = vertices[:, :, :2] + t[:, :, None] * direction[:, None, :2]

    margins = 0.5 * task.w_h - np.max(np.abs(projected), axis=2)
    margins[~valid] = -np.inf
    return margins, valid


def _successes(margins: np.ndarray) -> np.ndarray:
    return np.min(margins, axis=1) >= -BOUNDARY_TOLERANCE


def insertion_success_test(achieved_tip: Pose, task: TaskSpec, desired_tip: Optional[Pose] = None) -> TrialOutcome:
    """
    Slide the peg along its own z axis onto the hole plane and check the corners.

    The four peg-face vertices are projected into the hole XY plane; the
    trial succeeds when every vertex lies inside the hole square (closed
    test).

    Args:
        achieved_tip: Hole-tip frame in the peg-tip frame
        task: Task geometry
        desired_tip: Reference tip pose for the error measure

    Returns:
        TrialOutcome
    """
    T = achieved_tip.as_matrix()[None]
    margins, valid = _vertex_margins(T, task)
    desired = task_tip_target(task) if desired_tip is None else desired_tip
    error = float(_tip_error(desired.as_matrix(), T[0], task.h_p))
    if not valid[0]:
        return TrialOutcome(False, achieved_tip, error, (-np.inf,) * 4,
                            diagnostic="peg axis parallel to the hole plane")
    return TrialOutcome(bool(_successes(margins)[0]), achieved_tip, error,
                        tuple(float(m) for m in margins[0]))


def task_tip_target(task: TaskSpec) -> Pose:
    """Desired hole-tip frame in the peg-tip frame."""
    return task.g_bp.inverse() @ task.g_bh


def _noisy_tips(dual: DualArmModel, pair: IKPair, task: TaskSpec, noise: JointNoiseModel,
                trials: int, seed: SeedLike) -> np.ndarray:
    if noise.dim != dual.dof:
        raise InvalidArgumentError(f"noise dimension {noise.dim} does not match {dual.dof} joints")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    delta = sample_joint_noise(noise, trials, rng)
    # noise columns follow the pseudo order nL..1L, 1R..mR
    left = pair.theta_left.values + delta[:, :dual.n][:, ::-1]
    right = pair.theta_right.values + delta[:, dual.n:]
    T_rel = matrix_inverse(forward_kinematics_batch(dual.left, left)) @ forward_kinematics_batch(dual.right, right)
    return task.peg_offset.inverse().as_matrix() @ T_rel @ task.hole_offset.as_matrix()


def _check_trials(trials: int) -> int:
    if int(trials) < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    return int(trials)


def monte_carlo_success_rate(dual: DualArmModel, pair: IKPair, task: TaskSpec, noise: JointNoiseModel,
                             trials: int, seed: SeedLike = 0) -> float:
    """
    Percentage of noisy executions of a pair that insert successfully.

    Args:
        dual: Dual-arm model
        pair: Joint targets of both arms
        task: Task geometry
        noise: Joint noise model
        trials: Number of trials
        seed: Seed, seed sequence or generator

    Returns:
        Success rate in percent
    """
    trials = _check_trials(trials)
    margins, _ = _vertex_margins(_noisy_tips(dual, pair, task, noise, trials, seed), task)
    return 100.0 * float(np.count_nonzero(_successes(margins))) / trials


def simulate_trials(dual: DualArmModel, pair: IKPair, task: TaskSpec, noise: JointNoiseModel,
                    trials: int, seed: SeedLike = 0) -> List[TrialOutcome]:
    """Per-trial outcomes, drawn exactly as ``monte_carlo_success_rate`` draws them."""
    trials = _check_trials(trials)
    tips = _noisy_tips(dual, pair, task, noise, trials, seed)
    margins, valid = _vertex_margins(tips, task)
    success = _successes(margins)
    errors = _tip_error(task_tip_target(task).as_matrix(), tips, task.h_p)
    outcomes = []
    for index in range(trials):
        T = tips[index]
        outcomes.append(TrialOutcome(
            bool(success[index]),
            Pose(T[:3, :3], T[:3, 3]),
            float(errors[index]),
            tuple(float(m) for m in margins[index]),
            None if valid[index] else "peg axis parallel to the hole plane",
        ))
    return outcomes


def pair_ids(pairs: Sequence[IKPair]) -> List[str]:
    """Pair labels, falling back to 'pair<index>'."""
    ids = [pair.label or f'pair{index}' for index, pair in enumerate(pairs)]
    if len(set(ids)) != len(ids):
        raise InvalidArgumentError(f"duplicate pair ids: {ids}")
    return ids


def sweep(dual: DualArmModel, pairs: Sequence[IKPair], task: TaskSpec, sigma_list: Sequence[float],
          clearance_list: Sequence[float], trials: int, seed: int = 0, k: float = 2.0,
          threads: int = 1) -> SweepResult:
    """
    Success rates over the full sigma x clearance grid.

    Each cell (i, j) draws from SeedSequence([seed, i * len(clearances) + j]);
    all pairs in a cell see the same noise draws.

    Args:
        dual: Dual-arm model
        pairs: Pairs to compare
        task: Task geometry; the hole width is reset per clearance
        sigma_list: Joint standard deviations, rad
        clearance_list: Clearances, m
        trials: Trials per cell and pair
        seed: Root seed
        k: Number of standard deviations recorded in the noise model
        threads: Worker threads; results do not depend on it

    Returns:
        SweepResult
    """
    sigmas = [float(s) for s in sigma_list]
    clearances = [float(c) for c in clearance_list]
    if not sigmas or not clearances:
        raise InvalidArgumentError("sweep needs at least one sigma and one clearance")
    if not pairs:
        raise InvalidArgumentError("sweep needs at least one pair")
    trials = _check_trials(trials)
    ids = pair_ids(pairs)
    cells = [(i, j) for i in range(len(sigmas)) for j in range(len(clearances))]

    def run_cell(cell):
        i, j = cell
        cell_seed = derive_seed(seed, i * len(clearances) + j)
        noise = JointNoiseModel(sigmas[i], k, dual.dof)
        cell_task = task.with_clearance(clearances[j])
        rates = {}
        for pair_id, pair in zip(ids, pairs):
            rates[(i, j, pair_id)] = monte_carlo_success_rate(dual, pair, cell_task, noise, trials, cell_seed)
        logger.info("sigma=%g clearance=%g: %s", sigmas[i], clearances[j],
                    ', '.join(f'{p}={r:.2f}%' for (_, _, p), r in rates.items()))
        return rates

    result = SweepResult(sigmas, clearances, ids, trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for rates in pool.map(run_cell, cells):
                result.rates.update(rates)
    else:
        for cell in cells:
            result.rates.update(run_cell(cell))
    return result


def task_error_bound(dual: DualArmModel, pair: IKPair, noise: JointNoiseModel, task: TaskSpec) -> float:
    """
    Worst-case task error of a pair under the joint error ball.

    sqrt(c lambda_max(J_tip J_tip^T)) + h_p sin(min(2 O*, pi/2)), where
    J_tip = J_p - hat(R_rel p_h) J_r is the linear Jacobian of the hole
    tip point in the left gripper frame.

    Args:
        dual: Dual-arm model
        pair: Candidate pair
        noise: Joint noise model
        task: Task geometry

    Returns:
        Bound in meters
    """
    return _task_bound(dual, pair, noise, task)[0]


def _task_bound(dual: DualArmModel, pair: IKPair, noise: JointNoiseModel, task: TaskSpec) -> Tuple[float, float]:
    J_a, g_rel = relative_analytical_jacobian(dual, pair.theta_left, pair.theta_right)
    J_tip = J_a.linear - hat(g_rel.R @ task.hole_offset.p) @ J_a.angular
    lam = max(float(np.linalg.eigvalsh(J_tip @ J_tip.T)[-1]), 0.0)
    _, q_rel = quaternion_jacobian(dual, pair.theta_left, pair.theta_right)
    o_star, _ = max_orientation_error(J_a.angular, q_rel, noise.c)
    bound = float(np.sqrt(noise.c * lam)) + task.h_p * float(np.sin(min(2.0 * o_star, np.pi / 2.0)))
    return bound, o_star


def task_scorer(task: TaskSpec) -> Scorer:
    """
    Scorer ranking pairs by ``task_error_bound``.

    The returned score carries the bound as p_star (gamma 0) and the
    quaternion orientation error as o_star.
    """
    def scorer(dual: DualArmModel, pair: IKPair, noise: JointNoiseModel, gamma: float) -> WorstCaseError:
        bound, o_star = _task_bound(dual, pair, noise, task)
        return WorstCaseError.from_components(bound, o_star, 0.0)
    return scorer


def objective_curve(dual: DualArmModel, pairs: Sequence[IKPair], sigmas: Sequence[float], k: float = 2.0,
                    gamma: float = 0.0, scorer: Optional[Scorer] = None) -> Dict[str, List[float]]:
    """
    Worst-case objective M* as a function of sigma for each pair.

    Args:
        dual: Dual-arm model
        pairs: Pairs to evaluate
        sigmas: Joint standard deviations, rad
        k: Number of standard deviations
        gamma: Orientation weight
        scorer: Replacement for ``score_pair``

    Returns:
        Mapping pair id -> M* per sigma
    """
    scorer = scorer or score_pair
    curves = {}
    for pair_id, pair in zip(pair_ids(pairs), pairs):
        curves[pair_id] = [scorer(dual, pair, JointNoiseModel(float(s), k, dual.dof), gamma).m_star
                           for s in sigmas]
    return curves
