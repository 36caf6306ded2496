"""
Kinematics subcommands: fk, relpose, jacobian.
"""
import logging

import click
import numpy as np

from robustik.commands.common import emit, model_option, resolve_pair, run_options, theta_options, with_run
from robustik.errors import InvalidArgumentError
from robustik.kinematics import (
    FD_STEP_RANGE,
    finite_difference_relative_jacobian,
    forward_kinematics,
    quaternion_derivative,
    quaternion_jacobian,
    relative_analytical_jacobian,
    relative_pose,
    relative_spatial_jacobian,
)
from robustik.models.arm import JointVector
from robustik.utils.helpers import parse_float_list

logger = logging.getLogger(__name__)


@click.command('fk')
@model_option
@run_options
@click.option('--side', type=click.Choice(['left', 'right']), default='left', show_default=True)
@click.option('--theta', default=None, help='Comma-separated joint values (default: zeros).')
@with_run
def fk(run, side, theta):
    """Forward kinematics of one arm."""
    arm = run.model.left if side == 'left' else run.model.right
    values = np.zeros(arm.dof) if theta is None else parse_float_list(theta)
    pose = forward_kinematics(arm, JointVector(values, side))
    emit({'side': side, 'theta': list(map(float, values)), 'pose': pose.to_dict()}, run.output_path)


@click.command('relpose')
@model_option
@run_options
@theta_options
@with_run
def relpose(run, theta_left, theta_right, pair_id):
    """Pose of the right hand in the left hand frame."""
    pair = resolve_pair(run, theta_left, theta_right, pair_id)
    g_rel = relative_pose(run.model, pair.theta_left, pair.theta_right)
    emit({'pair': pair.to_dict(), 'g_rel': g_rel.to_dict()}, run.output_path)


@click.command('jacobian')
@model_option
@run_options
@theta_options
@click.option('--kind', type=click.Choice(['spatial', 'analytical']), default='spatial', show_default=True)
@click.option('--check', is_flag=True, help='Compare against central finite differences.')
@click.option('--step', type=float, default=None, help='Finite-difference step.')
@with_run
def jacobian(run, theta_left, theta_right, pair_id, kind, check, step):
    """Relative Jacobian (pseudo-chain column order) and its quaternion form."""
    pair = resolve_pair(run, theta_left, theta_right, pair_id)
    if kind == 'spatial':
        J = relative_spatial_jacobian(run.model, pair.theta_left, pair.theta_right)
    else:
        J, _ = relative_analytical_jacobian(run.model, pair.theta_left, pair.theta_right)
    J_r, q_rel = quaternion_jacobian(run.model, pair.theta_left, pair.theta_right)
    report = {
        'pair': pair.to_dict(),
        'jacobian': J.to_dict(),
        'J_r': J_r.tolist(),
        'q_rel': q_rel.to_dict(),
        'dq_dtheta': quaternion_derivative(J_r, q_rel).tolist(),
    }
    if check:
        step = run.config_class.FD_STEP if step is None else step
        lo, hi = FD_STEP_RANGE
        if not lo <= step <= hi:
            raise InvalidArgumentError(f"--step must lie in [{lo}, {hi}]")
        J_s = J if kind == 'spatial' else relative_spatial_jacobian(run.model, pair.theta_left, pair.theta_right)
        J_fd = finite_difference_relative_jacobian(run.model, pair.theta_left, pair.theta_right, step)
        report['finite_difference'] = {'step': step, 'max_abs_error': float(np.max(np.abs(J_fd - J_s.m)))}
    emit(report, run.output_path)


COMMANDS = (fk, relpose, jacobian)
