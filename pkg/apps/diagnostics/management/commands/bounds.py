"""
Closed-form bound calculators.

Usage:
    python manage.py bounds vc --space l2 --d 20 --k 50
    python manage.py bounds sample-size --delta 49053 --eps 0.1 --eta 0.05
    python manage.py bounds hoeffding --n 200 --eps 0.1
    python manage.py bounds levy --C 1 --c 0.5 --d 99 --eps 0.3
"""

from django.core.management.base import CommandError

from apps.diagnostics.bounds import (
    BoundInputs,
    SpaceKind,
    hoeffding_bound,
    sample_size_bound,
    vc_bound,
)
from apps.diagnostics.concentration import levy_bound
from common.commands import BenchCommand

REQUIRED = {
    'vc': ('space', 'd', 'k'),
    'sample-size': ('delta', 'eps', 'eta'),
    'hoeffding': ('n', 'eps'),
    'levy': ('C', 'c', 'd', 'eps'),
}


class Command(BenchCommand):
    help = 'Evaluate the VC, sample-size, Hoeffding or Levy bound'

    def add_bench_arguments(self, parser):
        parser.add_argument('kind', choices=list(REQUIRED))
        parser.add_argument('--space', choices=SpaceKind.values)
        parser.add_argument('--d', type=int)
        parser.add_argument('--k', type=int)
        parser.add_argument('--delta', type=float, help='VC dimension bound')
        parser.add_argument('--eps', type=float)
        parser.add_argument('--eta', type=float)
        parser.add_argument('--n', type=int)
        parser.add_argument('--C', dest='C', type=float)
        parser.add_argument('--c', dest='c', type=float)

    def run(self, **options):
        kind = options['kind']
        missing = [f'--{name}' for name in REQUIRED[kind] if options.get(name) is None]
        if missing:
            raise CommandError(f'bounds {kind} needs {", ".join(missing)}')

        if kind == 'vc':
            header = ['space', 'd', 'k', 'value']
            row = [options['space'], options['d'], options['k'],
                   vc_bound(options['space'], options['d'], options['k'])]
        elif kind == 'sample-size':
            inputs = BoundInputs(delta=options['delta'], eps=options['eps'], eta=options['eta'])
            header = ['delta', 'eps', 'eta', 'value']
            row = [inputs.delta, inputs.eps, inputs.eta, sample_size_bound(inputs)]
        elif kind == 'hoeffding':
            header = ['n', 'eps', 'value']
            row = [options['n'], options['eps'], hoeffding_bound(options['n'], options['eps'])]
        else:
            bound = levy_bound(options['C'], options['c'], options['d'], options['eps'])
            header = ['C', 'c', 'd', 'eps', 'raw', 'value']
            row = [options['C'], options['c'], options['d'], options['eps'], bound.raw, bound.reported]
        self.emit(options, header, [row])
