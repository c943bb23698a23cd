"""
voronoi command: truncated Voronoi series against the exact error term.
"""

from app.constants import VORONOI_CSV_COLUMNS
from app.cli import integer
from app.models import RunConfig, TruncationParams
from app.services.report_writer import ReportWriter

DEFAULTS = {'V': None, 'points': 10000, 'x': None}


def register(subparsers, common) -> None:
    parser = subparsers.add_parser('voronoi', parents = [common], help = 'Delta, Delta_1 and Delta_2 on [V, 2V]')
    parser.add_argument('--V', dest = 'V', type = float, help = 'Left end of the grid [V, 2V]')
    parser.add_argument('--points', type = integer, help = 'Grid points')
    parser.add_argument('--x', type = float, help = 'Also report the k-free decomposition residual at x')
    parser.set_defaults(handler = execute, defaults = DEFAULTS)


def execute(toolkit, run_config: RunConfig, writer: ReportWriter) -> int:
    V, z, points = run_config.get('V'), run_config.z, run_config.get('points')
    service = toolkit.voronoi

    frame = service.grid_frame(V, z, points)
    writer.write_csv('voronoi.csv', frame, columns = VORONOI_CSV_COLUMNS)

    payload = {'residual_mean_square': service.lemma31_check(V, z, points)}
    if run_config.get('x') is not None:
        params = TruncationParams(z = z, y = run_config.y, k = run_config.k)
        payload['decomposition'] = service.decomposition_residual(run_config.get('x'), params)
    writer.write_json('voronoi.json', payload, run_config.to_dict())
    return 0
