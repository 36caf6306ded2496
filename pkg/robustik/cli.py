"""
robustik - robust IK-pair selection for dual-arm peg-in-hole assembly
Command-line entry point
"""
import logging
import sys

import click
from dotenv import find_dotenv, load_dotenv

from robustik import __version__
from robustik.commands import analysis, kinematics, simulation
from robustik.config import get_config
from robustik.errors import RobustIKError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


class RobustIKGroup(click.Group):
    """Click group that turns library errors into exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except RobustIKError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)


def configure_logging(level):
    """Configure the root logger on stderr."""
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)


def create_cli(config_class=None):
    """
    CLI factory, one command group per configuration class.

    Args:
        config_class: Configuration class to use (default: from ROBUSTIK_ENV)

    Returns:
        click.Group
    """
    config_class = config_class or get_config()

    @click.group(cls=RobustIKGroup)
    @click.version_option(__version__, prog_name='robustik')
    @click.option('--log-level', default=None,
                  type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
                  help='Log verbosity (default: ROBUSTIK_LOG or the config class).')
    @click.pass_context
    def cli(ctx, log_level):
        """Robust IK-pair selection and peg-in-hole simulation."""
        ctx.ensure_object(dict)
        ctx.obj['config'] = config_class
        configure_logging(log_level or config_class.log_level())

    # Register commands
    for module in (kinematics, analysis, simulation):
        for command in module.COMMANDS:
            cli.add_command(command)

    return cli


def main():
    load_dotenv(find_dotenv(usecwd=True))
    create_cli()(prog_name='robustik')


if __name__ == '__main__':
    main()
