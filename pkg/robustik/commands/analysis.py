"""
Error analysis subcommands: errset, select.
"""
import logging

import click

from robustik.assembly import task_scorer
from robustik.commands.common import emit, model_option, resolve_pair, run_options, theta_options, with_run
from robustik.error_propagation import build_ellipsoids, max_orientation_error, worst_case_error
from robustik.errors import NoSolutionError
from robustik.kinematics import quaternion_jacobian, relative_analytical_jacobian
from robustik.robust_ik import (
    check_literal_pairs,
    enumerate_ik_pairs,
    enumerate_relative_ik_pairs,
    feasibility_check,
    score_pairs,
    select_robust_pair,
    worst_pair,
)

logger = logging.getLogger(__name__)

objective_option = click.option('--objective', type=click.Choice(['metric', 'task']), default='metric',
                                show_default=True, help='M* = P* + gamma O*, or the peg-in-hole bound.')


@click.command('errset')
@model_option
@run_options
@theta_options
@with_run
def errset(run, theta_left, theta_right, pair_id):
    """Error ellipsoids and worst-case errors of one pair."""
    pair = resolve_pair(run, theta_left, theta_right, pair_id)
    noise = run.noise.model(run.model.dof)
    J_a, g_rel = relative_analytical_jacobian(run.model, pair.theta_left, pair.theta_right)
    _, q_rel = quaternion_jacobian(run.model, pair.theta_left, pair.theta_right)
    position, orientation = build_ellipsoids(J_a, q_rel, noise.c)
    score = worst_case_error(J_a, q_rel, noise.c, run.noise.gamma)
    _, q_star = max_orientation_error(J_a.angular, q_rel, noise.c)
    emit({
        'pair': pair.to_dict(),
        'noise': run.noise.to_dict(),
        'c': noise.c,
        'position': position.to_dict(),
        'orientation': orientation.to_dict(),
        'worst_case': score.to_dict(),
        'q_rel': q_rel.to_dict(),
        'q_worst': q_star.to_dict(),
    }, run.output_path)


def candidate_pairs(run, relative_only=False, diagnostics=None):
    """Enumerated pairs for the task targets, followed by the literal --pairs that meet them."""
    task = run.require_task().task
    g_L, g_R = task.gripper_targets()
    target_rel = g_L.inverse() @ g_R
    if relative_only:
        pairs = enumerate_relative_ik_pairs(run.model, target_rel, run.ik_settings, diagnostics)
    else:
        pairs = enumerate_ik_pairs(run.model, g_L, g_R, run.ik_settings, diagnostics)
    literal = check_literal_pairs(run.model, run.pairs or [], target_rel,
                                  run.ik_settings.pose_tolerance, diagnostics)
    return pairs + literal


def scorer_for(run, objective):
    return task_scorer(run.require_task().task) if objective == 'task' else None


@click.command('select')
@model_option
@run_options
@objective_option
@click.option('--epsilon', type=float, default=None, help='Task tolerance, m (default: the clearance).')
@click.option('--relative-only', is_flag=True, help='Constrain only the relative pose.')
@with_run
def select(run, objective, epsilon, relative_only):
    """Enumerate, score and select the robust IK pair."""
    diagnostics = {}
    pairs = candidate_pairs(run, relative_only, diagnostics)
    if not pairs:
        raise NoSolutionError("no IK solutions for the task targets")

    noise = run.noise.model(run.model.dof)
    scorer = scorer_for(run, objective)
    scored = score_pairs(run.model, pairs, noise, run.noise.gamma, scorer)
    best = select_robust_pair(run.model, scored)
    worst = worst_pair(run.model, scored)
    report = feasibility_check(best, run.epsilon(epsilon))

    emit({
        'objective': objective,
        'noise': run.noise.to_dict(),
        'seed': run.seed,
        'candidate_count': len(scored),
        'candidates': [p.to_dict() for p in scored],
        'selected_index': scored.index(best),
        'worst_index': scored.index(worst),
        'selected': best.to_dict(),
        'feasibility': report.to_dict(),
        'diagnostics': diagnostics,
    }, run.output_path)


COMMANDS = (errset, select)
