"""
Options and run-configuration plumbing shared by the subcommands.
"""
import functools
import logging
from dataclasses import dataclass, replace
from typing import List, Optional

import click

from robustik.config import Config, IKSettings
from robustik.errors import ConfigError, InvalidArgumentError
from robustik.models.arm import DualArmModel
from robustik.models.noise import NoiseConfig
from robustik.models.results import IKPair
from robustik.models.task import TaskConfig
from robustik.utils.helpers import parse_float_list
from robustik.utils.io import load_model, load_noise, load_pairs, load_task, write_json

logger = logging.getLogger(__name__)

existing_file = click.Path(exists=True, dir_okay=False)


@dataclass
class RunConfig:
    """
    Everything a subcommand needs, loaded before any computation.

    Attributes:
        model: Dual-arm model
        task: Task file contents, when a task was given
        noise: Noise block (file or defaults, --sigma applied)
        pairs: Literal pairs from --pairs
        seed: Root seed for enumeration and sampling
        config_class: Configuration class of the CLI
        output_path: Where to write the primary artifact
    """

    model: DualArmModel
    task: Optional[TaskConfig] = None
    noise: NoiseConfig = NoiseConfig()
    pairs: Optional[List[IKPair]] = None
    seed: int = 0
    config_class: type = Config
    output_path: Optional[str] = None

    @property
    def ik_settings(self) -> IKSettings:
        return IKSettings.from_config(self.config_class, seed=self.seed)

    def require_task(self) -> TaskConfig:
        if self.task is None:
            raise ConfigError("this command needs --task")
        return self.task

    def epsilon(self, override: Optional[float] = None) -> float:
        if override is not None:
            return override
        return self.require_task().tolerance


def build_run(model_path, task_path=None, noise_path=None, pairs_path=None, seed=None,
              sigma=None, config_class=Config, output_path=None) -> RunConfig:
    """
    Load and validate every referenced file.

    Seed precedence: --seed, then the noise file, then the task file.
    """
    model = load_model(model_path)
    task = load_task(task_path) if task_path else None
    noise = load_noise(noise_path) if noise_path else NoiseConfig()
    if sigma is not None:
        if sigma < 0.0:
            raise InvalidArgumentError(f"sigma must be >= 0, got {sigma}")
        noise = replace(noise, sigma=sigma)
    pairs = load_pairs(pairs_path, model) if pairs_path else None
    if seed is None:
        seed = noise.seed if noise_path or task is None else task.seed
    return RunConfig(model, task, noise, pairs, int(seed), config_class, output_path)


def model_option(f):
    return click.option('--model', 'model_path', type=existing_file, required=True,
                        help='Dual-arm twist model (YAML/JSON).')(f)


def run_options(f):
    """--task, --noise, --pairs, --seed, --sigma and --out."""
    options = [
        click.option('--task', 'task_path', type=existing_file, help='Peg-in-hole task file.'),
        click.option('--noise', 'noise_path', type=existing_file, help='Noise block {sigma, k, gamma, seed}.'),
        click.option('--pairs', 'pairs_path', type=existing_file, help='Literal named joint vectors.'),
        click.option('--seed', type=int, default=None, help='Root seed (overrides config files).'),
        click.option('--sigma', type=float, default=None, help='Joint standard deviation, rad.'),
        click.option('--out', 'output_path', type=click.Path(dir_okay=False), help='Output file.'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def theta_options(f):
    f = click.option('--pair-id', default=None, help='Name of a pair in --pairs.')(f)
    f = click.option('--theta-right', default=None, help='Comma-separated right joint values.')(f)
    f = click.option('--theta-left', default=None, help='Comma-separated left joint values.')(f)
    return f


def with_run(f):
    """Turn the common options into a RunConfig passed as ``run``."""
    @functools.wraps(f)
    def wrapper(model_path, task_path=None, noise_path=None, pairs_path=None, seed=None,
                sigma=None, output_path=None, **kwargs):
        ctx = click.get_current_context()
        config_class = (ctx.obj or {}).get('config', Config)
        run = build_run(model_path, task_path, noise_path, pairs_path, seed, sigma,
                        config_class, output_path)
        return f(run, **kwargs)
    return wrapper


def resolve_pair(run: RunConfig, theta_left: Optional[str], theta_right: Optional[str],
                 pair_id: Optional[str]) -> IKPair:
    """Pair from --theta-left/--theta-right or from --pairs and --pair-id."""
    if theta_left is not None or theta_right is not None:
        if theta_left is None or theta_right is None:
            raise InvalidArgumentError("give both --theta-left and --theta-right")
        left, right = parse_float_list(theta_left), parse_float_list(theta_right)
        if len(left) != run.model.n:
            raise InvalidArgumentError(f"theta_left has {len(left)} values, expected {run.model.n}")
        if len(right) != run.model.m:
            raise InvalidArgumentError(f"theta_right has {len(right)} values, expected {run.model.m}")
        return IKPair(left, right, label='cli')
    if not run.pairs:
        raise InvalidArgumentError("give --theta-left/--theta-right or --pairs")
    if pair_id is None:
        return run.pairs[0]
    for pair in run.pairs:
        if pair.label == pair_id:
            return pair
    raise InvalidArgumentError(f"no pair named '{pair_id}' in --pairs")


def emit(data, output_path: Optional[str] = None):
    """Write JSON to --out, or to stdout."""
    text = write_json(data, output_path)
    if output_path is None:
        click.echo(text, nl=False)
    else:
        logger.info("wrote %s", output_path)
