"""
constants command: B_k, C_k, the divisor-square series and Tong's constant.
"""

import logging

from app.constants import ConstantKind, SummationMethod
from app.errors import InvariantViolation
from app.cli import integer
from app.models import RunConfig
from app.services.report_writer import ReportWriter

logger = logging.getLogger(__name__)

DEFAULTS = {'kind': 'Bk', 'method': 'euler', 'M': None, 'P': None, 'alpha_max': None}

METHODS = {
    'direct': [SummationMethod.DIRECT_SUM],
    'euler': [SummationMethod.EULER_PRODUCT],
    'both': [SummationMethod.DIRECT_SUM, SummationMethod.EULER_PRODUCT]
}


def register(subparsers, common) -> None:
    parser = subparsers.add_parser('constants', parents = [common], help = 'Mean-square series constants')
    parser.add_argument('--kind', choices = ['Bk', 'Ck', 'divisor-square', 'tong'])
    parser.add_argument('--method', choices = sorted(METHODS))
    parser.add_argument('--M', dest = 'M', type = integer, help = 'Terms for the direct sum')
    parser.add_argument('--P', dest = 'P', type = integer, help = 'Prime bound for the Euler product')
    parser.add_argument('--alpha-max', dest = 'alpha_max', type = integer, help = 'Prime-power exponent cap')
    parser.set_defaults(handler = execute, defaults = DEFAULTS)


def _estimate(toolkit, run_config: RunConfig, method: SummationMethod):
    kind = run_config.get('kind')
    if kind == 'tong':
        return toolkit.constants.tong_constant()
    if kind == 'divisor-square':
        return toolkit.constants.divisor_square_constant(method, M = run_config.get('M'), P = run_config.get('P'))
    return toolkit.constants.series_constant(ConstantKind(kind), run_config.k, method,
                                             M = run_config.get('M'), P = run_config.get('P'),
                                             alpha_max = run_config.get('alpha_max'))


def execute(toolkit, run_config: RunConfig, writer: ReportWriter) -> int:
    methods = METHODS[run_config.get('method')]
    if run_config.get('kind') == 'tong':
        methods = methods[:1]
    estimates = [_estimate(toolkit, run_config, method) for method in methods]

    payload = {'estimates': [estimate.to_dict() for estimate in estimates]}
    agree = True
    if len(estimates) == 2:
        first, second = estimates
        agree = first.agrees_with(second)
        payload['agreement'] = {
            'difference': float(abs(first.value - second.value)),
            'tolerance': first.tail_bound + second.tail_bound,
            'agree': agree
        }
    writer.write_json('constants.json', payload, run_config.to_dict())

    if not agree:
        raise InvariantViolation(f"Direct sum and Euler product disagree: {payload['agreement']}")
    return 0
