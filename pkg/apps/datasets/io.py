"""
pivotbench Datasets App - ASCII Dataset Files

File layout:

    # optional comment lines before the header
    <n> <d>
    x_11 x_12 ... x_1d
    ...
    x_n1 x_n2 ... x_nd

Reals are written with 17 significant digits, so save then load
reproduces every double exactly.
"""

import logging
import math
from pathlib import Path

import numpy as np

from apps.metrics.distances import MetricKind
from common.exceptions import DatasetFormatError

from .generators import Dataset

logger = logging.getLogger(__name__)


def format_row(values):
    return ' '.join(format(float(v), '.17g') for v in values)


def _parse_header(text, path, line_no, names=('n', 'd')):
    tokens = text.split()
    if len(tokens) != len(names):
        raise DatasetFormatError(
            f'header must be "{" ".join(names)}", got {text.strip()!r}', path, line_no
        )
    values = []
    for name, token in zip(names, tokens):
        try:
            value = int(token)
        except ValueError:
            raise DatasetFormatError(f'header field {name} is not an integer: {token!r}', path, line_no)
        if value < 1:
            raise DatasetFormatError(f'header field {name} must be >= 1, got {value}', path, line_no)
        values.append(value)
    return values


def parse_reals(text, expected, path, line_no):
    """Parse one row of exactly `expected` finite reals."""
    tokens = text.split()
    if len(tokens) != expected:
        raise DatasetFormatError(f'expected {expected} values, found {len(tokens)}', path, line_no)
    row = []
    for token in tokens:
        try:
            value = float(token)
        except ValueError:
            raise DatasetFormatError(f'non-numeric token {token!r}', path, line_no)
        if not math.isfinite(value):
            raise DatasetFormatError(f'non-finite value {token!r}', path, line_no)
        row.append(value)
    return row


def read_header(lines, path, names=('n', 'd')):
    """
    Skip leading '#' comment lines and parse the header.

    Returns:
        (header values, index of the first line after the header)
    """
    for index, text in enumerate(lines):
        if text.startswith('#'):
            continue
        return _parse_header(text, path, index + 1, names), index + 1
    raise DatasetFormatError('missing header', path, len(lines) + 1)


def read_rows(lines, start, count, width, path):
    """Parse `count` rows of `width` reals starting at line index `start`."""
    rows = []
    index = start
    for _ in range(count):
        if index >= len(lines):
            raise DatasetFormatError(f'expected {count} rows, file ended after {len(rows)}', path, index + 1)
        rows.append(parse_reals(lines[index], width, path, index + 1))
        index += 1
    for extra in range(index, len(lines)):
        if lines[extra].strip():
            raise DatasetFormatError(f'unexpected content after {count} rows', path, extra + 1)
    return rows


def read_lines(path):
    """
    Split a file into ASCII lines.

    Raises:
        DatasetFormatError: a line holding a non-ASCII byte, naming that line
    """
    lines = []
    for index, raw in enumerate(Path(path).read_bytes().split(b'\n')):
        try:
            lines.append(raw.decode('ascii'))
        except UnicodeDecodeError as exc:
            raise DatasetFormatError(f'non-ASCII byte 0x{raw[exc.start]:02x}', path, index + 1)
    return lines


def load_ascii(path, metric=MetricKind.EUCLIDEAN, label=None):
    """
    Load a dataset from the ASCII normal form.

    Raises:
        FileNotFoundError: if the file does not exist
        DatasetFormatError: malformed header, wrong row length or bad token,
            naming the offending line
    """
    path = Path(path)
    lines = read_lines(path)
    (n, d), start = read_header(lines, path)
    rows = read_rows(lines, start, n, d, path)
    ds = Dataset(np.array(rows, dtype=np.float64).reshape(n, d), metric=metric, label=label or path.stem)
    logger.info(f'Loaded {ds} from {path}')
    return ds


def write_ascii(ds, stream):
    """Write a dataset in the ASCII normal form to an open text stream."""
    stream.write(f'{ds.n} {ds.dim}\n')
    for row in ds.points:
        stream.write(format_row(row) + '\n')


def save_ascii(ds, path):
    path = Path(path)
    with path.open('w', encoding='ascii', newline='\n') as f:
        write_ascii(ds, f)
    logger.info(f'Saved {ds} to {path}')
