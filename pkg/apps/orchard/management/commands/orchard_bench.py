"""
Benchmark Orchard's algorithm against brute force.

Usage:
    python manage.py orchard_bench --generator cube --d 8 --n 2000 --queries 1000
"""

from apps.experiments.harness import query_centers
from apps.metrics.distances import DistanceCounter
from apps.orchard.index import build_orchard, orchard_nn
from apps.pivots.index import linear_knn
from common.commands import BenchCommand, add_dataset_arguments, dataset_from_options
from common.utils import STREAM_START, make_rng, parallel_map


class Command(BenchCommand):
    help = 'Run exact 1-NN queries with Orchard and report cost and mismatches'

    def add_bench_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument('--queries', type=int, default=1000, help='Number of queries')
        parser.add_argument(
            '--allow-large',
            action='store_true',
            help='Build even above PIVOTBENCH_ORCHARD_MAX_POINTS'
        )

    def run(self, **options):
        ds = dataset_from_options(options)
        seed = options['seed']
        idx = build_orchard(ds, DistanceCounter(), allow_large=options['allow_large'])
        centers, _ = query_centers(ds, options['queries'], seed)

        def run(i):
            start = int(make_rng(seed, STREAM_START, i).integers(ds.n))
            result = orchard_nn(idx, ds, centers[i], DistanceCounter(), start_id=start)
            ids, _ = linear_knn(ds, centers[i], 1, DistanceCounter())
            return result.cost, int(ids[0]) != result.nn_id

        results = parallel_map(run, range(options['queries']))
        costs = [cost for cost, _ in results]
        self.emit(
            options,
            ['d', 'n', 'queries', 'avg_cost', 'max_cost', 'mismatches', 'build_cost', 'seed'],
            [[ds.dim, ds.n, len(costs), sum(costs) / len(costs), max(costs),
              sum(1 for _, bad in results if bad), idx.build_cost, seed]],
        )
