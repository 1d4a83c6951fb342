"""
Common Management Command Base

Shared plumbing for the workbench commands: CSV output to stdout or --out,
dataset selection options, and translation of workbench errors into
CommandError (exit status 1).
"""

from contextlib import contextmanager
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.datasets.generators import GENERATOR_CHOICES, generate
from apps.datasets.io import load_ascii
from apps.metrics.distances import MetricKind
from common.exceptions import PivotBenchException
from common.utils import write_csv


class BenchCommand(BaseCommand):
    """
    Base class for pivotbench commands.

    Subclasses implement add_bench_arguments() and run(**options).
    """

    requires_system_checks = []
    requires_migrations_checks = False

    def add_arguments(self, parser):
        parser.add_argument(
            '--out',
            type=str,
            help='Write output to this file instead of stdout'
        )
        self.add_bench_arguments(parser)

    def add_bench_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except FileNotFoundError as e:
            raise CommandError(f'No such file: {e.filename}')
        except OSError as e:
            raise CommandError(f'{e.filename or "output"}: {e.strerror}')
        except PivotBenchException as e:
            raise CommandError(str(e))

    def run(self, **options):
        raise NotImplementedError

    @contextmanager
    def output(self, options):
        """Text stream for the command's output."""
        path = options.get('out')
        if not path:
            yield self.stdout
            return
        with Path(path).open('w', encoding='ascii', newline='') as stream:
            yield stream
        self.stderr.write(self.style.SUCCESS(f'Wrote {path}'))

    def emit(self, options, header, rows):
        with self.output(options) as stream:
            write_csv(stream, header, rows, digits=settings.PIVOTBENCH_CSV_DIGITS)


def add_dataset_arguments(parser):
    """--data PATH, or --generator with --d/--n; plus --metric and --seed."""
    parser.add_argument(
        '--data',
        type=str,
        help='ASCII dataset file'
    )
    parser.add_argument(
        '--generator',
        choices=GENERATOR_CHOICES,
        help='Generate the dataset instead of loading one'
    )
    parser.add_argument('--d', type=int, help='Dimension of the generated dataset')
    parser.add_argument('--n', type=int, help='Size of the generated dataset')
    add_metric_argument(parser)
    add_seed_argument(parser)


def add_metric_argument(parser):
    parser.add_argument(
        '--metric',
        choices=MetricKind.values,
        help='Metric to search under (defaults to the generator or file default)'
    )


def add_seed_argument(parser):
    parser.add_argument(
        '--seed',
        type=int,
        default=0,
        help='64-bit unsigned seed (default 0)'
    )


def dataset_from_options(options):
    """Load or generate the dataset named by add_dataset_arguments options."""
    if options.get('data'):
        return load_ascii(options['data'], metric=options.get('metric') or MetricKind.EUCLIDEAN)
    if not options.get('generator'):
        raise CommandError('Give --data PATH or --generator with --d and --n')
    if options.get('d') is None or options.get('n') is None:
        raise CommandError('--generator needs --d and --n')
    return generate(options['generator'], options['d'], options['n'], options['seed'], metric=options.get('metric'))
