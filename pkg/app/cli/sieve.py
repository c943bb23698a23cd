"""
sieve command: tabulate d, mu, d^(k) and d(1,1,k;.) over a range.
"""

import logging

import numpy as np
import pandas as pd

from app.cli import integer
from app.models import RunConfig
from app.services.report_writer import ReportWriter

logger = logging.getLogger(__name__)

DEFAULTS = {'lo': 1, 'hi': None}


def register(subparsers, common) -> None:
    parser = subparsers.add_parser('sieve', parents = [common], help = 'Tabulate arithmetic functions on [lo, hi)')
    parser.add_argument('--lo', type = integer, help = 'First n (default 1)')
    parser.add_argument('--hi', type = integer, help = 'End of the half-open range')
    parser.set_defaults(handler = execute, defaults = DEFAULTS)


def execute(toolkit, run_config: RunConfig, writer: ReportWriter) -> int:
    lo, hi, k = run_config.get('lo'), run_config.get('hi'), run_config.k
    columns = ['n', 'd', 'mu'] + (['dk', 'd11k'] if k else [])

    frames = []
    totals = {name: 0 for name in columns[1:]}
    for table in toolkit.sieve.sieve_segments(lo, hi, k):
        data = {'n': table.n}
        for name in columns[1:]:
            values = getattr(table, name)
            data[name] = values
            totals[name] += int(values.sum(dtype = np.int64))
        frames.append(pd.DataFrame(data, columns = columns))

    writer.write_csv('sieve.csv', pd.concat(frames, ignore_index = True), columns = columns)
    summary = {
        'range': {'lo': lo, 'hi': hi},
        'k': k,
        'sums': totals,
        'mertens_at_hi_minus_1': toolkit.sieve.mertens(hi - 1)
    }
    writer.write_json('sieve.json', summary, run_config.to_dict())
    return 0
