"""
Generate a synthetic dataset in the ASCII normal form.

Usage:
    python manage.py gen cube --d 8 --n 1000 --seed 7 --out cube8.txt
    python manage.py gen hamming --d 64 --n 10000
"""

from apps.datasets.generators import GENERATOR_CHOICES, generate
from apps.datasets.io import write_ascii
from common.commands import BenchCommand, add_seed_argument


class Command(BenchCommand):
    help = 'Generate a uniform cube, sphere or Hamming dataset'

    def add_bench_arguments(self, parser):
        parser.add_argument('generator', choices=GENERATOR_CHOICES)
        parser.add_argument('--d', type=int, required=True, help='Dimension')
        parser.add_argument('--n', type=int, required=True, help='Number of points')
        add_seed_argument(parser)

    def run(self, **options):
        ds = generate(options['generator'], options['d'], options['n'], options['seed'])
        with self.output(options) as stream:
            write_ascii(ds, stream)
