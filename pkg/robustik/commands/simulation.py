"""
Monte Carlo subcommands: simulate, sweep.
"""
import logging
from dataclasses import replace

import click

from robustik.assembly import monte_carlo_success_rate, objective_curve, simulate_trials, sweep as run_sweep
from robustik.commands.analysis import candidate_pairs, objective_option, scorer_for
from robustik.commands.common import emit, model_option, resolve_pair, run_options, theta_options, with_run
from robustik.errors import InvalidArgumentError, NoSolutionError
from robustik.robust_ik import score_pairs, select_robust_pair, worst_pair
from robustik.utils.helpers import parse_float_list
from robustik.utils.io import dumps_json, write_csv

logger = logging.getLogger(__name__)

SWEEP_HEADER = ('sigma', 'clearance', 'pair_id', 'trials', 'success_pct')


def _trials(run, trials):
    if trials is not None:
        return trials
    return run.task.trials if run.task is not None else run.config_class.TRIALS


@click.command('simulate')
@model_option
@run_options
@theta_options
@click.option('--trials', type=int, default=None, help='Number of trials (default: task file).')
@click.option('--clearance', type=float, default=None, help='Clearance, m (default: task file).')
@click.option('--details', is_flag=True, help='Include every trial outcome.')
@with_run
def simulate(run, theta_left, theta_right, pair_id, trials, clearance, details):
    """Success rate of one pair under joint noise."""
    task = run.require_task().task
    if clearance is not None:
        task = task.with_clearance(clearance)
    pair = resolve_pair(run, theta_left, theta_right, pair_id)
    trials = _trials(run, trials)
    noise = run.noise.model(run.model.dof)

    rate = monte_carlo_success_rate(run.model, pair, task, noise, trials, run.seed)
    report = {
        'pair': pair.to_dict(),
        'noise': run.noise.to_dict(),
        'clearance': task.clearance,
        'trials': trials,
        'seed': run.seed,
        'success_pct': rate,
    }
    if details:
        report['outcomes'] = [o.to_dict() for o in simulate_trials(run.model, pair, task, noise, trials, run.seed)]
    emit(report, run.output_path)


def _sweep_pairs(run, objective):
    """Literal --pairs, or the selected and the worst enumerated pair."""
    if run.pairs:
        return list(run.pairs)
    pairs = candidate_pairs(run)
    if not pairs:
        raise NoSolutionError("no IK solutions for the task targets")
    noise = run.noise.model(run.model.dof)
    scorer = scorer_for(run, objective)
    scored = score_pairs(run.model, pairs, noise, run.noise.gamma, scorer)
    best = select_robust_pair(run.model, scored)
    worst = worst_pair(run.model, scored)
    return [replace(best, label='robust'), replace(worst, label='worst')]


@click.command('sweep')
@model_option
@run_options
@objective_option
@click.option('--sigmas', default=None, help='Comma-separated sigma grid (default: task file).')
@click.option('--clearances', default=None, help='Comma-separated clearance grid (default: task file).')
@click.option('--trials', type=int, default=None, help='Trials per cell (default: task file).')
@click.option('--threads', type=int, default=None, help='Worker threads (default: ROBUSTIK_THREADS or 1).')
@with_run
def sweep(run, objective, sigmas, clearances, trials, threads):
    """Success rates over the sigma x clearance grid; CSV to --out or stdout."""
    task_config = run.require_task()
    sigma_list = parse_float_list(sigmas) if sigmas else list(task_config.sigmas)
    clearance_list = parse_float_list(clearances) if clearances else list(task_config.clearances)
    if not sigma_list or not clearance_list:
        raise InvalidArgumentError("sweep needs a sigma grid and a clearance grid")
    threads = run.config_class.threads() if threads is None else threads
    pairs = _sweep_pairs(run, objective)

    result = run_sweep(run.model, pairs, task_config.task, sigma_list, clearance_list,
                       _trials(run, trials), run.seed, run.noise.k, max(1, threads))
    csv_text = write_csv(SWEEP_HEADER, result.rows(), run.output_path)
    if run.output_path is None:
        click.echo(csv_text, nl=False)
        return

    scorer = scorer_for(run, objective)
    summary = {
        'csv': run.output_path,
        'seed': run.seed,
        'pairs': [p.to_dict() for p in pairs],
        'objective_curve': {
            'sigmas': sigma_list,
            'k': run.noise.k,
            'curves': objective_curve(run.model, pairs, sigma_list, run.noise.k, run.noise.gamma, scorer),
        },
        'result': result.to_dict(),
    }
    click.echo(dumps_json(summary), nl=False)


COMMANDS = (simulate, sweep)
