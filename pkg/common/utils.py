"""
Common Utility Functions

Shared helper functions used across multiple apps: seeded random streams,
worker pools, medians and CSV output.
"""

import csv
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exceptions import ValidationError

SEED_MAX = 2**64 - 1

# Logical random streams. Each one is an independent Philox key derived from
# the user seed, so adding draws to one stream never shifts another.
STREAM_DATASET = 1
STREAM_PAIRS = 2
STREAM_CANDIDATES = 3
STREAM_PIVOTS = 4
STREAM_QUERIES = 5
STREAM_PROBES = 6
STREAM_CENTERS = 7
STREAM_START = 8


def check_seed(seed):
    """Validate a 64-bit unsigned seed and return it as int."""
    seed = int(seed)
    if seed < 0 or seed > SEED_MAX:
        raise ValidationError(f'seed must be a 64-bit unsigned integer, got {seed}')
    return seed


def make_rng(seed, *stream):
    """
    Return a numpy Generator for one logical stream of a seed.

    Uses the counter-based Philox bit generator keyed through SeedSequence,
    so (seed, stream) always yields the same sequence on every platform.
    """
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(sequence))


def worker_count():
    """Number of worker threads, capped by PIVOTBENCH_THREADS."""
    from django.conf import settings

    raw = os.environ.get('PIVOTBENCH_THREADS')
    if raw is None:
        raw = getattr(settings, 'PIVOTBENCH_THREADS', 1)
    try:
        workers = int(raw)
    except (TypeError, ValueError):
        raise ValidationError(f'PIVOTBENCH_THREADS must be an integer, got {raw!r}')
    return max(1, workers)


def parallel_map(func, items, workers=None):
    """Apply func to items on a thread pool; results keep input order."""
    items = list(items)
    workers = workers or worker_count()
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def lower_median(values):
    """Median of a sample; for even length the lower middle element."""
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        raise ValidationError('median of an empty sample')
    return float(ordered[(ordered.size - 1) // 2])


def format_real(value, digits=17):
    """Format a number for CSV: integers as-is, reals with 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f'.{digits}g')
    return str(value)


def csv_row_writer(stream, header, digits=17):
    """
    Write the header line and return a function that writes one row.

    Each row is flushed as soon as it is written, so a failing sweep leaves
    its finished rows behind.
    """
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    flush = getattr(stream, 'flush', None)

    def write_row(row):
        writer.writerow([format_real(value, digits) for value in row])
        if flush is not None:
            flush()

    return write_row


def write_csv(stream, header, rows, digits=17):
    """Write a header line and rows as comma-separated text."""
    write_row = csv_row_writer(stream, header, digits)
    for row in rows:
        write_row(row)
