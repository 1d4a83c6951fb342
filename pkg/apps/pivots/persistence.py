"""
pivotbench Pivots App - Index Files

Index layout:

    <k> <n>
    p_1 p_2 ... p_k
    rho(x_1, p_1) ... rho(x_1, p_k)
    ...
    rho(x_n, p_1) ... rho(x_n, p_k)

Pivot files hold the ids on a single line.
"""

import logging
from pathlib import Path

import numpy as np

from apps.datasets.io import format_row, read_header, read_lines, read_rows
from apps.metrics.distances import MetricKind
from common.exceptions import DatasetFormatError

from .index import PivotIndex, check_pivot_ids

logger = logging.getLogger(__name__)


def _parse_ids(text, k, path, line_no):
    tokens = text.split()
    if len(tokens) != k:
        raise DatasetFormatError(f'expected {k} pivot ids, found {len(tokens)}', path, line_no)
    try:
        return [int(token) for token in tokens]
    except ValueError:
        raise DatasetFormatError('pivot ids must be integers', path, line_no)


def write_index(idx, stream):
    stream.write(f'{idx.k} {idx.n}\n')
    stream.write(' '.join(str(int(p)) for p in idx.pivot_ids) + '\n')
    for row in idx.table:
        stream.write(format_row(row) + '\n')


def save_index(idx, path):
    path = Path(path)
    with path.open('w', encoding='ascii', newline='\n') as f:
        write_index(idx, f)
    logger.info(f'Saved {idx} to {path}')


def load_index(path, metric=MetricKind.EUCLIDEAN):
    """
    Read an index file back; the table is reproduced bit for bit.

    Raises:
        DatasetFormatError: malformed header, ids or table rows
        PivotError: duplicate or out-of-range pivot ids
    """
    path = Path(path)
    lines = read_lines(path)
    (k, n), start = read_header(lines, path, names=('k', 'n'))
    if start >= len(lines):
        raise DatasetFormatError('missing pivot id line', path, start + 1)
    ids = check_pivot_ids(_parse_ids(lines[start], k, path, start + 1), n)
    rows = read_rows(lines, start + 1, n, k, path)
    table = np.array(rows, dtype=np.float64).reshape(n, k)
    table.flags.writeable = False
    ids.flags.writeable = False
    idx = PivotIndex(ids, table, MetricKind(metric))
    logger.info(f'Loaded {idx} from {path}')
    return idx


def save_pivots(pivot_ids, path):
    """Write pivot ids as one line."""
    path = Path(path)
    with path.open('w', encoding='ascii', newline='\n') as f:
        f.write(' '.join(str(int(p)) for p in pivot_ids) + '\n')


def load_pivots(path):
    path = Path(path)
    lines = read_lines(path)
    for index, text in enumerate(lines):
        if text.startswith('#') or not text.strip():
            continue
        tokens = text.split()
        return _parse_ids(text, len(tokens), path, index + 1)
    raise DatasetFormatError('missing pivot id line', path, len(lines))
