"""
k-free divisor toolkit - application factory
"""

import logging
from dataclasses import dataclass

import mpmath

from app.config import Config

__version__ = '0.3.0'


@dataclass
class Toolkit:
    """Configured service instances sharing one sieve."""

    config: type
    sieve: 'SieveService'
    special: 'SpecialFunctions'
    summatory: 'SummatoryService'
    constants: 'ConstantsService'
    voronoi: 'VoronoiService'
    meansquare: 'MeanSquareService'
    spacing: 'SpacingService'

    def __repr__(self) -> str:
        return f"<Toolkit(config={self.config.__name__}, sieve={self.sieve!r})>"


def configure_logging(config_class = Config) -> None:
    """Route log records to the log file and to stderr."""
    logging.basicConfig(
        level = getattr(logging, str(config_class.LOG_LEVEL).upper(), logging.INFO),
        format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers = [
            logging.FileHandler(config_class.LOG_FILE),
            logging.StreamHandler()
        ]
    )


def create_app(config_class = Config) -> Toolkit:
    """
    Create and wire the service layer.

    Args:
        config_class: Configuration class to use

    Returns:
        Toolkit with every service bound to one configuration
    """
    from app.services.arith_sieve import SieveService
    from app.services.sieve_cache import SieveCache
    from app.services.analytic.special_functions import SpecialFunctions
    from app.services.analytic.series_constants import ConstantsService
    from app.services.summatory import SummatoryService
    from app.services.voronoi import VoronoiService
    from app.services.meansquare.mean_square_service import MeanSquareService
    from app.services.spacing import SpacingService

    mpmath.mp.dps = config_class.MPMATH_DPS

    cache = SieveCache(config_class.CACHE_DIR) if config_class.CACHE_ENABLED else None
    sieve = SieveService(config_class, cache = cache)
    special = SpecialFunctions(config_class)
    summatory = SummatoryService(sieve, special, config_class)
    constants = ConstantsService(sieve, special, config_class)

    toolkit = Toolkit(
        config = config_class,
        sieve = sieve,
        special = special,
        summatory = summatory,
        constants = constants,
        voronoi = VoronoiService(sieve, summatory, config_class),
        meansquare = MeanSquareService(sieve, summatory, constants, config_class),
        spacing = SpacingService(sieve, config_class)
    )
    logging.getLogger(__name__).debug(f"Created {toolkit!r}")
    return toolkit
