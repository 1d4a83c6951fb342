"""
Table of the sphere concentration function.

Usage:
    python manage.py conc_sphere --d 3 10 30 100 --eps 0.1 0.3 0.5
    python manage.py conc_sphere --d 100 --eps-steps 20
"""

import numpy as np

from apps.diagnostics.concentration import HALF_PI, sphere_concentration, sphere_gaussian_bound
from common.commands import BenchCommand


class Command(BenchCommand):
    help = 'Emit alpha_d(eps) of the unit sphere next to exp(-(d-1) eps^2 / 2)'

    def add_bench_arguments(self, parser):
        parser.add_argument('--d', type=int, nargs='+', required=True, help='Sphere dimensions')
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--eps', type=float, nargs='+', help='Geodesic radii in [0, pi/2]')
        group.add_argument('--eps-steps', type=int, help='Evenly spaced radii over [0, pi/2]')

    def run(self, **options):
        if options['eps'] is not None:
            radii = options['eps']
        else:
            steps = max(1, options['eps_steps'])
            radii = np.linspace(0.0, HALF_PI, steps + 1).tolist()
        rows = (
            [d, eps, sphere_concentration(d, eps), sphere_gaussian_bound(d, eps)]
            for d in options['d']
            for eps in radii
        )
        self.emit(options, ['d', 'eps', 'alpha', 'gaussian_bound'], rows)
