"""
Run configuration validator, checked before any computation starts.
"""

import logging
from typing import Any, Dict

from app.constants import Command, Precision, Problem
from app.models import RunConfig

logger = logging.getLogger(__name__)

CONSTANT_KINDS = ('Bk', 'Ck', 'divisor-square', 'tong')
CONSTANT_METHODS = ('direct', 'euler', 'both')


def _failure(error_msg: str) -> Dict[str, Any]:
    logger.error(error_msg)
    return {'valid': False, 'error': error_msg}


class RunConfigValidator:
    """Service class for run configuration validation."""

    @staticmethod
    def validate(run_config: RunConfig) -> Dict[str, Any]:
        """
        Validate the shared fields, then the command's own parameters.

        Args:
            run_config: Resolved configuration

        Returns:
            Dictionary with validation result and error message if invalid
        """
        logger.debug(f"Validating {run_config!r}")

        if not isinstance(run_config.threads, int) or run_config.threads < 1:
            return _failure(f"Invalid threads: {run_config.threads}. Must be an integer >= 1.")
        if run_config.precision not in list(Precision):
            return _failure(f"Invalid precision: {run_config.precision}.")
        if not run_config.output_path:
            return _failure("Missing output path.")

        checks = {
            Command.SIEVE: RunConfigValidator._validate_sieve,
            Command.DELTA: RunConfigValidator._validate_delta,
            Command.CONSTANTS: RunConfigValidator._validate_constants,
            Command.MEANSQUARE: RunConfigValidator._validate_meansquare,
            Command.VORONOI: RunConfigValidator._validate_voronoi,
            Command.SPACING: RunConfigValidator._validate_spacing
        }
        result = checks[run_config.command](run_config)
        if result['valid']:
            logger.debug("Run configuration validation passed")
        return result

    @staticmethod
    def _validate_k(k, minimum: int, what: str) -> Dict[str, Any]:
        if k is None:
            return _failure(f"{what} needs --k.")
        if not isinstance(k, int) or k < minimum:
            return _failure(f"Invalid k: {k}. {what} needs an integer k >= {minimum}.")
        return {'valid': True}

    @staticmethod
    def _validate_problem(run_config: RunConfig) -> Dict[str, Any]:
        problem = run_config.get('problem')
        if problem not in [p.value for p in Problem]:
            return _failure(f"Invalid problem: '{problem}'. Must be one of {[p.value for p in Problem]}.")
        if problem == Problem.KFREE.value:
            return RunConfigValidator._validate_k(run_config.k, 2, 'The k-free problem')
        if problem == Problem.THREEDIM.value:
            return RunConfigValidator._validate_k(run_config.k, 2, 'The three-dimensional problem')
        return {'valid': True}

    @staticmethod
    def _validate_sieve(run_config: RunConfig) -> Dict[str, Any]:
        lo, hi = run_config.get('lo'), run_config.get('hi')
        if not isinstance(lo, int) or lo < 1:
            return _failure(f"Invalid lo: {lo}. Must be an integer >= 1.")
        if not isinstance(hi, int) or hi <= lo:
            return _failure(f"Invalid hi: {hi}. Must be an integer > lo = {lo}.")
        if run_config.k is not None:
            return RunConfigValidator._validate_k(run_config.k, 2, 'The sieve')
        return {'valid': True}

    @staticmethod
    def _validate_delta(run_config: RunConfig) -> Dict[str, Any]:
        result = RunConfigValidator._validate_problem(run_config)
        if not result['valid']:
            return result
        x_min, x_max, points = run_config.get('x_min'), run_config.get('x_max'), run_config.get('points')
        if x_min is None or x_min < 1:
            return _failure(f"Invalid x_min: {x_min}. Must be >= 1.")
        if x_max is None or x_max < x_min:
            return _failure(f"Invalid x_max: {x_max}. Must be >= x_min = {x_min}.")
        if not isinstance(points, int) or points < 1:
            return _failure(f"Invalid points: {points}. Must be an integer >= 1.")
        return {'valid': True}

    @staticmethod
    def _validate_constants(run_config: RunConfig) -> Dict[str, Any]:
        kind, method = run_config.get('kind'), run_config.get('method')
        if kind not in CONSTANT_KINDS:
            return _failure(f"Invalid kind: '{kind}'. Must be one of {list(CONSTANT_KINDS)}.")
        if method not in CONSTANT_METHODS:
            return _failure(f"Invalid method: '{method}'. Must be one of {list(CONSTANT_METHODS)}.")
        if kind in ('Bk', 'Ck'):
            result = RunConfigValidator._validate_k(run_config.k, 3, f"{kind} (divergent for k = 2)")
            if not result['valid']:
                return result
        for name in ('M', 'P', 'alpha_max'):
            value = run_config.get(name)
            if value is not None and (not isinstance(value, int) or value < 2):
                return _failure(f"Invalid {name}: {value}. Must be an integer >= 2.")
        return {'valid': True}

    @staticmethod
    def _validate_meansquare(run_config: RunConfig) -> Dict[str, Any]:
        result = RunConfigValidator._validate_problem(run_config)
        if not result['valid']:
            return result
        if run_config.get('problem') != Problem.DIRICHLET.value and run_config.k < 3:
            return _failure(f"Invalid k: {run_config.k}. The mean-square constant diverges for k = 2.")
        T, checkpoints = run_config.get('T'), run_config.get('checkpoints')
        if T is None or T < 2:
            return _failure(f"Invalid T: {T}. Must be >= 2.")
        if not isinstance(checkpoints, int) or checkpoints < 2:
            return _failure(f"Invalid checkpoints: {checkpoints}. Must be an integer >= 2.")
        omega_x = run_config.get('omega_X')
        if omega_x is not None:
            if run_config.get('problem') != Problem.KFREE.value or run_config.k < 4:
                return _failure("--omega-X applies to the k-free problem with k >= 4.")
            if omega_x < 2:
                return _failure(f"Invalid omega_X: {omega_x}. Must be >= 2.")
        return {'valid': True}

    @staticmethod
    def _validate_voronoi(run_config: RunConfig) -> Dict[str, Any]:
        V, points, z = run_config.get('V'), run_config.get('points'), run_config.z
        if V is None or V < 2:
            return _failure(f"Invalid V: {V}. Must be >= 2.")
        if not isinstance(points, int) or points < 2:
            return _failure(f"Invalid points: {points}. Must be an integer >= 2.")
        if not isinstance(z, int) or z < 1:
            return _failure(f"Invalid z: {z}. Must be an integer >= 1.")
        if run_config.get('x') is not None:
            result = RunConfigValidator._validate_k(run_config.k, 2, 'The decomposition residual')
            if not result['valid']:
                return result
            if run_config.y is None or run_config.y < 1:
                return _failure(f"Invalid y: {run_config.y}. The decomposition residual needs y >= 1.")
            if run_config.get('x') < 1:
                return _failure(f"Invalid x: {run_config.get('x')}. Must be >= 1.")
        return {'valid': True}

    @staticmethod
    def _validate_spacing(run_config: RunConfig) -> Dict[str, Any]:
        for name in ('D1', 'D2', 'N1', 'N2'):
            value = run_config.get(name)
            if not isinstance(value, int) or value < 1:
                return _failure(f"Invalid {name}: {value}. Must be an integer >= 1.")
        result = RunConfigValidator._validate_k(run_config.k, 2, 'Spacing')
        if not result['valid']:
            return result
        delta = run_config.get('delta')
        if delta is None or delta < 0:
            return _failure(f"Invalid delta: {delta}. Must be >= 0.")
        return {'valid': True}
