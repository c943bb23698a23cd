"""
spacing command: near-resonance count of one dyadic box against its envelope.
"""

from app.constants import SPACING_CSV_COLUMNS
from app.errors import InvariantViolation
from app.cli import integer
from app.models import RunConfig, DyadicBox
from app.services.report_writer import ReportWriter

DEFAULTS = {'D1': None, 'D2': None, 'N1': None, 'N2': None, 'delta': None, 'naive': False}


def register(subparsers, common) -> None:
    parser = subparsers.add_parser('spacing', parents = [common], help = 'Count near resonances in a dyadic box')
    for name in ('D1', 'D2', 'N1', 'N2'):
        parser.add_argument(f"--{name}", dest = name, type = integer)
    parser.add_argument('--delta', type = float)
    parser.add_argument('--naive', action = 'store_true', default = None,
                        help = 'Cross-check against the quadratic pair loop')
    parser.set_defaults(handler = execute, defaults = DEFAULTS)


def execute(toolkit, run_config: RunConfig, writer: ReportWriter) -> int:
    box = DyadicBox(D1 = run_config.get('D1'), D2 = run_config.get('D2'), N1 = run_config.get('N1'),
                    N2 = run_config.get('N2'), k = run_config.k, delta = run_config.get('delta'))
    frame = toolkit.spacing.sweep([box])
    writer.write_csv('spacing.csv', frame, columns = SPACING_CSV_COLUMNS)

    if run_config.get('naive'):
        reference = toolkit.spacing.count_near_resonances_naive(box)
        count = int(frame['count'].iloc[0])
        if reference != count:
            raise InvariantViolation(f"Windowed count {count} differs from the pair loop {reference} for {box!r}")
    return 0
