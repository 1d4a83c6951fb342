"""
Histogram of sampled distances.

Usage:
    python manage.py hist --generator cube --d 30 --n 20000 --normalize
    python manage.py hist --generator cube --d 300 --n 20000 --normalize --anchor origin --summary
"""

from django.conf import settings

from apps.diagnostics.dimension import ANCHOR_CHOICES, ANCHOR_PAIRS, distance_histogram
from apps.metrics.distances import DistanceCounter
from common.commands import BenchCommand, add_dataset_arguments, dataset_from_options


class Command(BenchCommand):
    help = 'Emit a distance histogram, or only its mean and standard deviation'

    def add_bench_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument('--pairs', type=int, default=100_000, help='Sampled distances')
        parser.add_argument('--bins', type=int, default=settings.PIVOTBENCH_HISTOGRAM_BINS)
        parser.add_argument('--normalize', action='store_true', help='Divide distances by sqrt(d)')
        parser.add_argument(
            '--anchor',
            choices=ANCHOR_CHOICES,
            default=ANCHOR_PAIRS,
            help='Measure pairwise distances, or distances to the origin corner'
        )
        parser.add_argument('--summary', action='store_true', help='Emit only mean and std')

    def run(self, **options):
        ds = dataset_from_options(options)
        hist = distance_histogram(
            ds, options['pairs'], options['bins'], options['normalize'],
            options['seed'], DistanceCounter(), anchor=options['anchor'],
        )
        if options['summary']:
            self.emit(options, ['d', 'n', 'samples', 'normalized', 'anchor', 'mean', 'std'],
                      [[ds.dim, ds.n, hist.samples, options['normalize'], options['anchor'], hist.mean, hist.std]])
            return
        rows = [
            [float(low), float(high), int(count)]
            for low, high, count in zip(hist.edges[:-1], hist.edges[1:], hist.counts)
        ]
        self.emit(options, ['bin_low', 'bin_high', 'count'], rows)
