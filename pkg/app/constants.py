"""
Application constants and enumerations.
"""

from enum import Enum


class Problem(Enum):
    """Divisor problem whose error term is studied."""
    DIRICHLET = 'dirichlet'
    KFREE = 'kfree'
    THREEDIM = 'threedim'


class BasisTag(Enum):
    """Basis functions appearing in the main terms."""
    X_LOG_X = 'x*log(x)'
    X = 'x'
    X_POW_1_OVER_K = 'x^(1/k)'


class ConstantKind(Enum):
    """Mean-square series constants."""
    BK = 'Bk'
    CK = 'Ck'


class SummationMethod(Enum):
    """Evaluation routes for the series constants."""
    DIRECT_SUM = 'direct'
    EULER_PRODUCT = 'euler'
    CLOSED_FORM = 'closed-form'


class Precision(Enum):
    """Accumulation precision."""
    DOUBLE = 'double'
    DOUBLE_DOUBLE = 'double-double'


class Command(Enum):
    """CLI commands."""
    SIEVE = 'sieve'
    DELTA = 'delta'
    CONSTANTS = 'constants'
    MEANSQUARE = 'meansquare'
    VORONOI = 'voronoi'
    SPACING = 'spacing'


# Process exit codes
EXIT_SUCCESS = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_INVARIANT = 4

# Binary sieve cache
CACHE_MAGIC = b'KFDL'
CACHE_VERSION = 1
CACHE_HEADER_FORMAT = '<4sIQQI'

# Largest argument for which D(x) stays inside a signed 64-bit accumulator
MAX_BIG_D_ARGUMENT = 10 ** 16

# A ConstantEstimate is converged when its tail bound is below this
CONVERGENCE_TOLERANCE = 1e-6

# Default cap on prime-power exponents in Euler products
DEFAULT_ALPHA_MAX = 160

# CSV column layouts
DELTA_CSV_COLUMNS = ['x', 'summatory', 'main', 'delta']
VORONOI_CSV_COLUMNS = ['u', 'delta', 'delta1', 'delta2']
RATIO_CSV_COLUMNS = ['T', 'integral', 'predicted', 'ratio']
SPACING_CSV_COLUMNS = ['D1', 'D2', 'N1', 'N2', 'k', 'delta', 'count', 'envelope', 'ratio']
