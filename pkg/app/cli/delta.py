"""
delta command: error terms on a uniform grid.
"""

import numpy as np

from app.constants import Problem, DELTA_CSV_COLUMNS
from app.cli import integer
from app.models import RunConfig
from app.services.report_writer import ReportWriter

DEFAULTS = {'problem': Problem.DIRICHLET.value, 'x_min': 1.0, 'x_max': None, 'points': 1000}


def register(subparsers, common) -> None:
    parser = subparsers.add_parser('delta', parents = [common], help = 'Error terms on a grid')
    parser.add_argument('--problem', choices = [p.value for p in Problem])
    parser.add_argument('--x-min', dest = 'x_min', type = float)
    parser.add_argument('--x-max', dest = 'x_max', type = float)
    parser.add_argument('--points', type = integer)
    parser.set_defaults(handler = execute, defaults = DEFAULTS)


def execute(toolkit, run_config: RunConfig, writer: ReportWriter) -> int:
    problem = Problem(run_config.get('problem'))
    k = None if problem == Problem.DIRICHLET else run_config.k
    grid = np.linspace(run_config.get('x_min'), run_config.get('x_max'), run_config.get('points'))
    frame = toolkit.summatory.delta_grid(problem, grid, k)
    writer.write_delta_csv('delta.csv', frame, DELTA_CSV_COLUMNS)
    return 0
