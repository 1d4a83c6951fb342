"""
Run a pivot-count sweep and emit one CSV row per k.

Usage:
    python manage.py sweep --generator cube --d 8 --n 10000 --k-sweep 4 8 16 32 64
    python manage.py sweep --data nasa.txt --k-sweep 10 20 40 60 --strategy incremental --record
"""

import logging

from django.conf import settings
from django.db import transaction

from apps.experiments.harness import CSV_HEADER, DatasetSpec, ExperimentConfig, run_sweep
from apps.experiments.models import ExperimentResult, ExperimentRun
from apps.pivots.management.commands.build import add_selection_arguments, selection_from_options
from common.commands import BenchCommand, add_dataset_arguments
from common.utils import csv_row_writer

logger = logging.getLogger(__name__)


class Command(BenchCommand):
    help = 'Calibrate a radius, then benchmark range queries for every k'

    def add_bench_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument('--k-sweep', type=int, nargs='+', required=True, help='Ascending pivot counts')
        add_selection_arguments(parser)
        parser.add_argument('--queries', type=int, default=settings.PIVOTBENCH_QUERY_COUNT)
        parser.add_argument('--target-fraction', type=float, default=settings.PIVOTBENCH_TARGET_FRACTION)
        parser.add_argument('--probes', type=int, default=settings.PIVOTBENCH_PROBE_QUERIES)
        parser.add_argument('--label', type=str, default='', help='Name stored with --record')
        parser.add_argument('--record', action='store_true', help='Store the run in the database')

    def run(self, **options):
        if options.get('data'):
            spec = DatasetSpec(path=options['data'], metric=options.get('metric'))
        else:
            spec = DatasetSpec(
                generator=options.get('generator'), d=options.get('d'), n=options.get('n'),
                metric=options.get('metric'),
            )
        cfg = ExperimentConfig(
            dataset=spec,
            k_sweep=tuple(options['k_sweep']),
            strategy=options['strategy'],
            selection=selection_from_options(options, max(options['k_sweep'])),
            query_count=options['queries'],
            target_fraction=options['target_fraction'],
            probe_queries=options['probes'],
            seed=options['seed'],
        )
        metadata = {}
        rows = []
        with self.output(options) as stream:
            write_row = csv_row_writer(stream, CSV_HEADER, settings.PIVOTBENCH_CSV_DIGITS)

            def on_row(row):
                rows.append(row)
                write_row(row.as_csv_row())

            run_sweep(cfg, on_row=on_row, metadata=metadata)
        self.stderr.write(
            f"center_mode={metadata['center_mode']} radius={metadata['radius']!r} "
            f"degenerate={metadata['degenerate']}"
        )
        if options['record']:
            run = record_sweep(cfg, rows, metadata, options['label'])
            self.stderr.write(self.style.SUCCESS(f'Recorded run {run.id}'))


@transaction.atomic
def record_sweep(cfg, rows, metadata, label=''):
    """Persist a finished sweep and its rows."""
    run = ExperimentRun.objects.create(
        label=label,
        dataset=cfg.dataset.describe(),
        center_mode=metadata['center_mode'],
        seed=cfg.seed,
        target_fraction=cfg.target_fraction,
        query_count=cfg.query_count,
        config=cfg.as_dict(),
        metadata=metadata,
    )
    ExperimentResult.objects.bulk_create([
        ExperimentResult(
            run=run,
            d=row.d,
            n=row.n,
            k=row.k,
            selection_mode=row.selection_mode,
            radius=row.radius,
            avg_cost=row.avg_cost,
            avg_result_size=row.avg_result_size,
            median_discard_fraction=row.median_discard_fraction,
            build_cost=row.build_cost,
        )
        for row in rows
    ])
    logger.info(f'Recorded {len(rows)} sweep rows as run {run.id}')
    return run
