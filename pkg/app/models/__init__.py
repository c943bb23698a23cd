"""
Domain types shared by the services.
"""

from app.models.sieve import SieveRange, SieveTable
from app.models.main_term import MainTermModel, ErrorTermSample
from app.models.truncation import TruncationParams, CosSumTerm
from app.models.constant_estimate import ConstantEstimate
from app.models.mean_square import MeanSquareReport
from app.models.spacing import DyadicBox
from app.models.run_config import RunConfig
