"""
Command-line interface: one module per command, registered on a shared parser.
"""

import argparse
import json
import logging
import os
from typing import Any, Dict, List, Optional

from app import __version__, create_app
from app.config import Config
from app.constants import Command, Precision, EXIT_SUCCESS
from app.errors import ToolkitError, UsageError
from app.models import RunConfig
from app.services.config_validator import RunConfigValidator
from app.services.report_writer import ReportWriter

logger = logging.getLogger(__name__)

CACHE_DIR_ENV = 'KFDL_CACHE_DIR'


def integer(text: str) -> int:
    """argparse type accepting 4096 as well as 1e6."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: '{text}'")
    if value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: '{text}'")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    """Shared options plus one subparser per command module."""
    parser = argparse.ArgumentParser(prog = 'kfree-divisor',
                                     description = 'Exact computations around the k-free divisor problem')
    parser.add_argument('--version', action = 'version', version = f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help = False)
    common.add_argument('--config', help = 'JSON file with parameter values (overridden by flags)')
    common.add_argument('--output', help = 'Output directory for CSV/JSON artifacts')
    common.add_argument('--cache-dir', dest = 'cache_dir', help = f"Sieve cache directory (env {CACHE_DIR_ENV})")
    common.add_argument('--threads', type = integer, help = 'Worker threads')
    common.add_argument('--precision', choices = [p.value for p in Precision], help = 'Accumulation precision')
    common.add_argument('--k', type = integer, help = 'Power k')
    common.add_argument('--y', type = float, help = 'Hyperbola cutoff y')
    common.add_argument('--z', type = integer, help = 'Voronoi cutoff z')

    subparsers = parser.add_subparsers(dest = 'command', required = True)

    # Import command modules to register their parsers
    from app.cli import sieve, delta, constants, meansquare, voronoi, spacing
    for module in (sieve, delta, constants, meansquare, voronoi, spacing):
        module.register(subparsers, common)

    return parser


def _load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding = 'utf-8') as handle:
            values = json.load(handle)
    except (OSError, json.JSONDecodeError) as error:
        raise UsageError(f"Cannot read config file {path}: {error}")
    if not isinstance(values, dict):
        raise UsageError(f"Config file {path} must hold a JSON object")
    return values


def resolve_run_config(args: argparse.Namespace, file_values: Dict[str, Any],
                       environ = os.environ, config_class = Config) -> RunConfig:
    """
    Merge flags, environment, config file and defaults, in that order of precedence.
    """
    def pick(name: str, default: Any = None) -> Any:
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_values.get(name, default)

    cache_dir = args.cache_dir or environ.get(CACHE_DIR_ENV) or file_values.get('cache_dir') or config_class.CACHE_DIR
    precision = pick('precision', config_class.PRECISION)
    try:
        precision = Precision(precision)
    except ValueError:
        raise UsageError(f"Invalid precision: '{precision}'")

    return RunConfig(
        command = Command(args.command),
        output_path = pick('output', os.path.join('output', args.command)),
        cache_dir = cache_dir,
        k = pick('k'),
        y = pick('y'),
        z = pick('z'),
        precision = precision,
        threads = pick('threads', config_class.THREADS),
        params = {name: pick(name, default) for name, default in args.defaults.items()}
    )


def settings_for(run_config: RunConfig, cache_requested: bool, config_class = Config) -> type:
    """Configuration class carrying the run's parallelism, precision and cache settings."""
    return type('RunSettings', (config_class,), {
        'THREADS': run_config.threads,
        'PRECISION': run_config.precision.value,
        'CACHE_DIR': run_config.cache_dir,
        'CACHE_ENABLED': config_class.CACHE_ENABLED or cache_requested
    })


def run(argv: Optional[List[str]] = None, config_class = Config) -> int:
    """
    Parse arguments, validate the configuration and execute one command.

    Returns:
        Process exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or EXIT_SUCCESS)

    try:
        file_values = _load_config_file(args.config)
        run_config = resolve_run_config(args, file_values, config_class = config_class)
        validation = RunConfigValidator.validate(run_config)
        if not validation['valid']:
            raise UsageError(validation['error'])

        cache_requested = bool(args.cache_dir or os.environ.get(CACHE_DIR_ENV) or file_values.get('cache_dir'))
        toolkit = create_app(settings_for(run_config, cache_requested, config_class))
        writer = ReportWriter(run_config.output_path, __version__)
        logger.info(f"Running {run_config!r} on {run_config.threads} threads into {run_config.output_path}")
        status = args.handler(toolkit, run_config, writer)
    except ToolkitError as error:
        logger.error(f"{type(error).__name__}: {error}")
        return error.exit_code

    logger.info(f"Command {args.command} finished with status {status}")
    return status
