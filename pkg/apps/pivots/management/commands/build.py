"""
Select pivots and write the pivot table index.

Usage:
    python manage.py build --generator cube --d 8 --n 10000 --k 16 --out cube8.idx
    python manage.py build --data nasa.txt --k 60 --strategy incremental --pair-mode smart
"""

import logging

from django.conf import settings

from apps.metrics.distances import DistanceCounter
from apps.pivots.index import build_index
from apps.pivots.persistence import save_pivots, write_index
from apps.pivots.selection import (
    PAIR_MODE_CHOICES,
    PAIRS_RANDOM,
    SelectionConfig,
    select_incremental,
    select_random,
)
from common.commands import BenchCommand, add_dataset_arguments, dataset_from_options

logger = logging.getLogger(__name__)


def add_selection_arguments(parser):
    """Options shared by build and sweep."""
    parser.add_argument(
        '--strategy',
        choices=('random', 'incremental'),
        default='random',
        help='Pivot selection strategy (default random)'
    )
    parser.add_argument('--pairs', type=int, default=settings.PIVOTBENCH_SELECTION_PAIRS,
                        help='Pair sample size A for incremental selection')
    parser.add_argument('--candidates', type=int, default=settings.PIVOTBENCH_SELECTION_CANDIDATES,
                        help='Candidates N per incremental step')
    parser.add_argument('--pair-mode', choices=PAIR_MODE_CHOICES, default=PAIRS_RANDOM)
    parser.add_argument('--neighbour-rank', type=int, default=20,
                        help='Neighbour rank j of smart pairs (default 20)')


def selection_from_options(options, k):
    return SelectionConfig(
        k=k,
        pairs=options['pairs'],
        candidates=options['candidates'],
        seed=options['seed'],
        pair_mode=options['pair_mode'],
        neighbour_rank=options['neighbour_rank'],
    )


class Command(BenchCommand):
    help = 'Select k pivots and write the index (k n header, pivot ids, n x k table)'

    def add_bench_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument('--k', type=int, required=True, help='Number of pivots')
        add_selection_arguments(parser)
        parser.add_argument('--pivots-out', type=str, help='Also write the pivot ids here')

    def run(self, **options):
        ds = dataset_from_options(options)
        selection_counter = DistanceCounter()
        if options['strategy'] == 'incremental':
            cfg = selection_from_options(options, options['k'])
            pivot_ids = select_incremental(ds, cfg, selection_counter)
        else:
            pivot_ids = select_random(ds, options['k'], options['seed'])
        idx = build_index(ds, pivot_ids, DistanceCounter())
        logger.info(f'Selection cost {selection_counter.count}, table cost {idx.build_cost}')

        with self.output(options) as stream:
            write_index(idx, stream)
        if options['pivots_out']:
            save_pivots(pivot_ids, options['pivots_out'])
