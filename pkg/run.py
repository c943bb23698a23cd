"""
Main entry point for the k-free divisor toolkit.
"""

import os
import sys
import logging

from app import configure_logging
from app.cli import run
from app.config import config

logger = logging.getLogger(__name__)


def main() -> int:
    """Main application entry point."""
    config_name = os.environ.get('KFDL_ENV', 'default')
    config_class = config.get(config_name, config['default'])
    configure_logging(config_class)
    logger.info(f"Using configuration: {config_name}")

    return run(sys.argv[1:], config_class = config_class)


if __name__ == '__main__':
    sys.exit(main())
