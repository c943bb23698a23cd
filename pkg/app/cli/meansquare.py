"""
meansquare command: exact mean square of an error term and its ratio trace.
"""

from app.constants import Problem, RATIO_CSV_COLUMNS
from app.cli import integer
from app.models import RunConfig
from app.services.report_writer import ReportWriter

DEFAULTS = {'problem': Problem.DIRICHLET.value, 'T': None, 'checkpoints': 16, 'T_min': None, 'omega_X': None}


def register(subparsers, common) -> None:
    parser = subparsers.add_parser('meansquare', parents = [common], help = 'Integral of the squared error term')
    parser.add_argument('--problem', choices = [p.value for p in Problem])
    parser.add_argument('--T', dest = 'T', type = float, help = 'Upper limit of integration')
    parser.add_argument('--checkpoints', type = integer, help = 'Ratio-trace checkpoints')
    parser.add_argument('--T-min', dest = 'T_min', type = float, help = 'First ratio-trace checkpoint')
    parser.add_argument('--omega-X', dest = 'omega_X', type = float,
                        help = 'Also report max |Delta|/x^(1/4) up to X (k-free, k >= 4)')
    parser.set_defaults(handler = execute, defaults = DEFAULTS)


def execute(toolkit, run_config: RunConfig, writer: ReportWriter) -> int:
    problem = Problem(run_config.get('problem'))
    k = None if problem == Problem.DIRICHLET else run_config.k
    T = run_config.get('T')
    service = toolkit.meansquare

    report = service.integrate_delta_squared(problem, k, T)
    payload = report.to_dict()
    payload['numerator'] = service.numerator(problem, k).to_dict()
    if run_config.get('omega_X') is not None:
        x_star, score = service.omega_witness(k, run_config.get('omega_X'))
        payload['omega_witness'] = {'X': run_config.get('omega_X'), 'x_star': x_star, 'score': score}

    trace = service.ratio_trace(problem, k, T, run_config.get('checkpoints'), T_min = run_config.get('T_min'))
    writer.write_json('meansquare.json', payload, run_config.to_dict())
    writer.write_rows('ratio_trace.csv', trace, RATIO_CSV_COLUMNS)
    return 0
