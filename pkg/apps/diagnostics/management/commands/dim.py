"""
Chavez intrinsic dimension of a dataset.

Usage:
    python manage.py dim --generator cube --d 20 --n 20000 --pairs 100000
    python manage.py dim --generator sphere --d 100 --n 20000 --metric geodesic
    python manage.py dim --data nasa.txt
"""

from apps.diagnostics.dimension import chavez_dimension
from apps.metrics.distances import DistanceCounter
from common.commands import BenchCommand, add_dataset_arguments, dataset_from_options


class Command(BenchCommand):
    help = 'Estimate the Chavez intrinsic dimension from sampled pairs'

    def add_bench_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument(
            '--pairs',
            type=int,
            default=100_000,
            help='Number of sampled pairs (default 100000)'
        )

    def run(self, **options):
        ds = dataset_from_options(options)
        counter = DistanceCounter()
        estimate = chavez_dimension(ds, options['pairs'], options['seed'], counter)
        self.emit(
            options,
            ['dataset', 'n', 'd', 'metric', 'pairs', 'mean', 'variance', 'dtilde', 'seed'],
            [[ds.label, ds.n, ds.dim, ds.metric.value, estimate.pairs_used,
              estimate.mean, estimate.variance, estimate.dtilde, options['seed']]],
        )
