"""
Shared fixtures for the test suite.
"""

import os
import sys

import pytest

# Add the repository root to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from app import create_app
from app.config import TestingConfig


@pytest.fixture(scope = 'session')
def toolkit():
    """Services wired to the testing configuration (small segments, no cache)."""
    return create_app(TestingConfig)


@pytest.fixture
def cached_config(tmp_path):
    """Testing configuration with the sieve cache in a temporary directory."""
    class CachedTestingConfig(TestingConfig):
        CACHE_ENABLED = True
        CACHE_DIR = str(tmp_path / 'sieve')
    return CachedTestingConfig


@pytest.fixture
def threaded_config():
    """Testing configuration with four workers."""
    class ThreadedTestingConfig(TestingConfig):
        THREADS = 4
    return ThreadedTestingConfig


@pytest.fixture(autouse = True)
def no_cache_env(monkeypatch):
    monkeypatch.delenv('KFDL_CACHE_DIR', raising = False)
