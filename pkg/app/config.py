"""
Application configuration settings.
"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base configuration class."""
    
    # Sieve configuration
    SEGMENT_SIZE = int(os.environ.get('KFDL_SEGMENT_SIZE', 2 ** 22))
    MAX_SIEVE_LIMIT = int(os.environ.get('KFDL_MAX_SIEVE_LIMIT', 2 * 10 ** 8))
    
    # Sieve segment cache
    CACHE_DIR = os.environ.get('KFDL_CACHE_DIR') or os.path.join('.cache', 'sieve')
    CACHE_ENABLED = os.environ.get('KFDL_CACHE_ENABLED', 'False').lower() == 'true'
    
    # Working precision for mpmath evaluations (decimal digits)
    MPMATH_DPS = 30
    
    # Voronoi series
    VORONOI_MAX_Z = 10 ** 7
    VORONOI_CHUNK = 2048
    PHASE_DD_THRESHOLD = 1e12
    
    # Spacing brute force budget (pair candidates)
    SPACING_BUDGET = 10 ** 10
    SPACING_MAX_SIDE = 5 * 10 ** 7
    SPACING_PAIR_CHUNK = 2 ** 22
    
    # Mean square integration
    SMALL_PIECE_LIMIT = 1024
    TAYLOR_TERMS = 8
    INTEGRATION_CHUNK = 2 ** 16
    
    # Parallelism hint and accumulation precision
    THREADS = int(os.environ.get('KFDL_THREADS', 1))
    PRECISION = os.environ.get('KFDL_PRECISION', 'double-double')
    
    # Logging configuration
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FILE = 'kfree_divisor.log'


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    """Production configuration."""
    CACHE_ENABLED = True
    LOG_LEVEL = 'INFO'


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    SEGMENT_SIZE = 2 ** 12
    MAX_SIEVE_LIMIT = 2 * 10 ** 6
    CACHE_ENABLED = False
    VORONOI_CHUNK = 256
    LOG_LEVEL = 'WARNING'


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
