"""
Acceptance sweep for the k-free divisor toolkit.

Runs the desk-scale checks (identities, mean-square laws, constants,
Voronoi residual, spacing oracles, Omega evidence, determinism) and writes
a JSON summary. Use --scale quick for a few-minute smoke run.
"""

import argparse
import filecmp
import json
import logging
import os
import sys
import tempfile

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from app import create_app, configure_logging
from app.cli import run as run_cli
from app.config import Config
from app.constants import ConstantKind, Problem, SummationMethod
from app.models import DyadicBox
from app.services.arith_sieve import iroot

logger = logging.getLogger(__name__)

SCALES = {
    'desk': {'identity_x': 10 ** 6, 'T': 1e7, 'constants_M': 10 ** 6, 'V': 1e5, 'omega_X': 1e6},
    'quick': {'identity_x': 10 ** 5, 'T': 1e5, 'constants_M': 10 ** 5, 'V': 1e4, 'omega_X': 1e5}
}


class SweepConfig(Config):
    """Sieve coverage for T = 10^7 without the cache."""
    CACHE_ENABLED = False


def check_hyperbola_identity(toolkit, rng, scale):
    """Exact integer identity on 200 random (x, k, y)."""
    failures = []
    for _ in range(200):
        k = int(rng.integers(2, 7))
        x_max = scale['identity_x']
        if 10 ** k > x_max:
            k = 2
        x = int(rng.integers(10 ** k, x_max + 1))
        y = float(rng.uniform(10.0, iroot(x, k)))
        lhs, rhs = toolkit.summatory.hyperbola_identity_check(x, y, k)
        if lhs != rhs:
            failures.append({'x': x, 'k': k, 'y': y, 'lhs': lhs, 'rhs': rhs})
    return {'passed': not failures, 'failures': failures}


def check_ratio_law(toolkit, problem, k, scale, band, n_checkpoints = 8):
    """Ratio of the exact mean square to its predicted main term."""
    trace = toolkit.meansquare.ratio_trace(problem, k, scale['T'], n_checkpoints, T_min = min(1e4, scale['T'] / 10))
    report = toolkit.meansquare.integrate_delta_squared(problem, k, scale['T'])
    final = trace[-1]['ratio']
    tail = [abs(row['ratio'] - 1.0) for row in trace[-3:]]
    return {
        'passed': band[0] <= final <= band[1],
        'final_ratio': final,
        'trending': tail[-1] <= tail[0],
        'trace': trace,
        'predicted_error_exponent': report.predicted_error_exponent,
        'residual_slope': report.residual_slope,
        'delta_T': report.delta_T
    }


def check_constants(toolkit, scale):
    """Direct sum against Euler product for B_k and C_k, tail decay, and the divisor-square series."""
    rows = []
    for kind, ks in ((ConstantKind.BK, range(3, 7)), (ConstantKind.CK, range(3, 7))):
        for k in ks:
            direct = toolkit.constants.series_constant(kind, k, SummationMethod.DIRECT_SUM, M = scale['constants_M'])
            euler = toolkit.constants.series_constant(kind, k, SummationMethod.EULER_PRODUCT)
            relative = abs(float(direct.value - euler.value)) / float(euler.value)
            rows.append({'kind': kind.value, 'k': k, 'direct': float(direct.value), 'euler': float(euler.value),
                         'relative_difference': relative, 'agree': direct.agrees_with(euler)})
    disagreeing = [row for row in rows if not row['agree']]
    for row in disagreeing:
        logger.error(f"{row['kind']} (k={row['k']}): direct {row['direct']} and Euler {row['euler']} disagree")

    # Dyadic blocks of f_k(m)^2 m^(-3/2) on [U, 2U] for U in [10^4, 10^6]
    bounds = [int(u) for u in np.geomspace(10 ** 4, 10 ** 6, 7)]
    slopes = {}
    for k in (3, 4):
        sums = toolkit.constants.partial_sums(ConstantKind.CK, k, bounds + [2 * u for u in bounds])
        blocks = [upper - lower for lower, upper in zip(sums[:len(bounds)], sums[len(bounds):])]
        slopes[k] = float(np.polyfit(np.log(bounds), np.log(blocks), 1)[0])
    slopes_ok = all(abs(slope - (-0.5 + 1.0 / k)) <= 0.15 for k, slope in slopes.items())

    closed = toolkit.constants.mean_square_numerator(None, None)
    series = toolkit.constants.divisor_square_constant(SummationMethod.EULER_PRODUCT)
    divisor_square = abs(float(series.value / closed.value) - 1.0)
    return {
        'passed': not disagreeing and slopes_ok and divisor_square < 1e-9,
        'within_1e-6': all(row['relative_difference'] < 1e-6 for row in rows),
        'rows': rows,
        'tail_slopes': slopes,
        'divisor_square_relative_difference': divisor_square
    }


def check_voronoi_residual(toolkit, scale):
    """Mean of Delta_2^2 over [V, 2V] for z = 10^2, 10^3, 10^4."""
    rows = [toolkit.voronoi.lemma31_check(scale['V'], z, 10 ** 4) for z in (100, 1000, 10000)]
    means = [row['mean_square'] for row in rows]
    return {
        'passed': means[0] > means[1] > means[2],
        'fitted_constants': [row['fitted_constant'] for row in rows],
        'rows': rows
    }


def check_spacing(toolkit, rng):
    """Windowed counts against the pair loop, then a count/envelope sweep."""
    mismatches = []
    for _ in range(100):
        D1, D2 = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        N1, N2 = int(rng.integers(1, 10 ** 4 // D1 + 1)), int(rng.integers(1, 10 ** 4 // D2 + 1))
        box = DyadicBox(D1, D2, N1, N2, int(rng.integers(2, 7)),
                        float(10.0 ** rng.uniform(-6, -1)))
        windowed = toolkit.spacing.count_near_resonances(box)
        naive = toolkit.spacing.count_near_resonances_naive(box)
        if windowed != naive:
            mismatches.append({**box.to_dict(), 'windowed': windowed, 'naive': naive})

    boxes = [DyadicBox(int(rng.integers(1, 17)), int(rng.integers(1, 17)), int(rng.integers(8, 257)),
                       int(rng.integers(8, 257)), int(rng.integers(2, 7)), float(10.0 ** rng.uniform(-5, -3)))
             for _ in range(50)]
    frame = toolkit.spacing.sweep(boxes)
    return {
        'passed': not mismatches and float(frame['ratio'].max()) < 1e3,
        'mismatches': mismatches,
        'fitted_envelope_constant': float(frame['ratio'].max())
    }


def check_omega(toolkit, scale):
    """Non-decay of max |Delta^(4)(x)|/x^(1/4)."""
    _, small = toolkit.meansquare.omega_witness(4, 1e3)
    x_star, large = toolkit.meansquare.omega_witness(4, scale['omega_X'])
    return {'passed': large >= 0.5 * small, 'score_1e3': small, 'score_X': large, 'x_star': x_star}


def check_determinism():
    """Byte-identical artifacts across repeated runs and thread counts 1 and 4."""
    commands = [
        ['delta', '--problem', 'kfree', '--k', '4', '--x-max', '1e5', '--points', '500'],
        ['spacing', '--D1', '8', '--D2', '8', '--N1', '64', '--N2', '64', '--k', '2', '--delta', '1e-3'],
        ['meansquare', '--problem', 'dirichlet', '--T', '1e5', '--checkpoints', '6']
    ]
    differing = []
    with tempfile.TemporaryDirectory() as workdir:
        for index, command in enumerate(commands):
            outputs = []
            for threads in ('1', '4', '4'):
                target = os.path.join(workdir, f"{index}_{len(outputs)}")
                status = run_cli(command + ['--threads', threads, '--output', target])
                if status != 0:
                    differing.append({'command': command, 'status': status})
                outputs.append(target)
            names = sorted(os.listdir(outputs[0]))
            for other in outputs[1:]:
                _, mismatch, errors = filecmp.cmpfiles(outputs[0], other, names, shallow = False)
                mismatch = mismatch + errors
                if sorted(os.listdir(other)) != names:
                    mismatch.append('<file set>')
                if mismatch:
                    differing.append({'command': command, 'files': mismatch})
    return {'passed': not differing, 'differing': differing}


def main():
    """Run every acceptance check and write the summary."""
    parser = argparse.ArgumentParser(description = 'Acceptance sweep')
    parser.add_argument('--scale', choices = sorted(SCALES), default = 'desk')
    parser.add_argument('--seed', type = int, default = 20240601)
    parser.add_argument('--output', default = os.path.join('output', 'acceptance.json'))
    args = parser.parse_args()

    configure_logging(SweepConfig)
    logger.info(f"Starting acceptance sweep at {args.scale} scale")
    scale = SCALES[args.scale]
    toolkit = create_app(SweepConfig)
    rng = np.random.default_rng(args.seed)

    results = {
        'hyperbola_identity': check_hyperbola_identity(toolkit, rng, scale),
        'tong_law': check_ratio_law(toolkit, Problem.DIRICHLET, None, scale, (0.85, 1.15)),
        'kfree_k4_law': check_ratio_law(toolkit, Problem.KFREE, 4, scale, (0.7, 1.3)),
        'constants': check_constants(toolkit, scale),
        'voronoi_residual': check_voronoi_residual(toolkit, scale),
        'spacing': check_spacing(toolkit, rng),
        'omega': check_omega(toolkit, scale),
        'threedim_k3_law': check_ratio_law(toolkit, Problem.THREEDIM, 3, scale, (0.7, 1.3)),
        'determinism': check_determinism()
    }

    os.makedirs(os.path.dirname(args.output) or '.', exist_ok = True)
    with open(args.output, 'w', encoding = 'utf-8') as handle:
        json.dump(results, handle, indent = 2, sort_keys = True, default = float)
    for name, result in results.items():
        logger.info(f"{name}: {'passed' if result['passed'] else 'FAILED'}")
    logger.info(f"Acceptance summary written to {args.output}")
    return 0 if all(result['passed'] for result in results.values()) else 1


if __name__ == '__main__':
    sys.exit(main())
