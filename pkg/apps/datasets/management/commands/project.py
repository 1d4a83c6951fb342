"""
Project a dataset onto two coordinates.

Usage:
    python manage.py project --generator sphere --d 100 --n 2000 --i 0 --j 1
    python manage.py project --generator sphere --d 100 --n 2000 --summary
"""

from apps.datasets.projection import project2d, projected_spread
from common.commands import BenchCommand, add_dataset_arguments, dataset_from_options


class Command(BenchCommand):
    help = 'Emit the (x_i, x_j) projection of every point, or its spread'

    def add_bench_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument('--i', type=int, default=0, help='First axis (default 0)')
        parser.add_argument('--j', type=int, default=1, help='Second axis (default 1)')
        parser.add_argument(
            '--summary',
            action='store_true',
            help='Emit only the per-axis standard deviation'
        )

    def run(self, **options):
        ds = dataset_from_options(options)
        projection = project2d(ds, options['i'], options['j'])
        if options['summary']:
            std_i, std_j = projected_spread(projection)
            self.emit(options, ['d', 'n', 'i', 'j', 'std_i', 'std_j'],
                      [[ds.dim, ds.n, options['i'], options['j'], std_i, std_j]])
            return
        self.emit(options, ['x', 'y'], projection.tolist())
