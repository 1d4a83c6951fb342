"""
pivotbench Metrics App - Distance Functions

Points, metric kinds and the instrumented distance evaluator. Every metric
evaluation in the workbench goes through this module and is charged to a
DistanceCounter, which is the cost unit of all experiments.

Batch helpers reduce each row independently along the last axis, so a
distance computed inside a batch is bit-identical to the same distance
computed on its own.
"""

from dataclasses import dataclass

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from common.exceptions import DimensionMismatch, MetricDomainError, ValidationError

TRIANGLE_TOLERANCE = 1e-9
UNIT_NORM_TOLERANCE = 1e-9


class MetricKind(models.TextChoices):
    """Supported metrics."""

    EUCLIDEAN = 'euclidean', _('Euclidean (L2)')
    CHEBYSHEV = 'chebyshev', _('Chebyshev (L-infinity)')
    HAMMING_NORMALIZED = 'hamming', _('Hamming, normalized by d')
    HAMMING_RAW = 'hamming-raw', _('Hamming, mismatch count')
    GEODESIC = 'geodesic', _('Great-circle distance on the unit sphere')

    @property
    def is_hamming(self):
        return self in (MetricKind.HAMMING_NORMALIZED, MetricKind.HAMMING_RAW)


@dataclass
class DistanceCounter:
    """
    Number of metric evaluations charged so far.

    Not thread-safe: every worker owns its counter and counters are merged
    by summation at join points.
    """

    count: int = 0

    def charge(self, evaluations=1):
        self.count += int(evaluations)

    def __add__(self, other):
        return DistanceCounter(self.count + other.count)

    @classmethod
    def merged(cls, counters):
        """Sum of several counters; order does not matter."""
        return cls(sum(c.count for c in counters))


def as_point(coords, dim=None):
    """Return coords as a finite float64 vector, optionally of a given dimension."""
    point = np.asarray(coords, dtype=np.float64)
    if point.ndim != 1 or point.size == 0:
        raise ValidationError('a point must be a non-empty 1-D sequence of reals')
    if not np.all(np.isfinite(point)):
        raise MetricDomainError('point coordinates must be finite')
    if dim is not None and point.size != dim:
        raise DimensionMismatch(f'point has dimension {point.size}, expected {dim}')
    return point


def check_domain(kind, points):
    """
    Raise MetricDomainError if points fall outside the metric's domain.

    Hamming kinds need coordinates in {0, 1}; the geodesic metric needs unit
    vectors. Accepts a single point or a 2-D array of points.
    """
    kind = MetricKind(kind)
    points = np.asarray(points, dtype=np.float64)
    if kind.is_hamming:
        if not np.all((points == 0.0) | (points == 1.0)):
            raise MetricDomainError(f'{kind.value} metric requires binary coordinates')
    elif kind == MetricKind.GEODESIC:
        norms = np.sqrt(np.sum(points * points, axis=-1))
        if not np.all(np.abs(norms - 1.0) <= UNIT_NORM_TOLERANCE):
            raise MetricDomainError('geodesic metric requires unit-norm points')


def _kernel(kind, x, rows):
    """Distances from x to each row, without validation or charging."""
    diff = rows - x
    if kind == MetricKind.EUCLIDEAN:
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if kind == MetricKind.CHEBYSHEV:
        return np.max(np.abs(diff), axis=-1)
    if kind == MetricKind.HAMMING_RAW:
        return np.count_nonzero(diff, axis=-1).astype(np.float64)
    if kind == MetricKind.HAMMING_NORMALIZED:
        return np.count_nonzero(diff, axis=-1) / np.float64(x.shape[-1])
    if kind == MetricKind.GEODESIC:
        # chord form: exact zero on identical points, stable for small angles
        chord = np.sqrt(np.sum(diff * diff, axis=-1))
        return 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))
    raise ValidationError(f'unknown metric {kind!r}')


def _check_dims(x, rows):
    if x.shape[-1] != rows.shape[-1]:
        raise DimensionMismatch(
            f'dimension mismatch: {x.shape[-1]} vs {rows.shape[-1]}'
        )


def distance(kind, x, y, counter):
    """
    Evaluate rho(x, y) and charge exactly one evaluation.

    Args:
        kind: MetricKind (or its value)
        x, y: points of equal dimension
        counter: DistanceCounter to charge

    Returns:
        float: the distance
    """
    kind = MetricKind(kind)
    x = as_point(x)
    y = as_point(y)
    _check_dims(x, y)
    check_domain(kind, x)
    check_domain(kind, y)
    counter.charge(1)
    return float(_kernel(kind, x, y[np.newaxis, :])[0])


def distances_to(kind, x, rows, counter):
    """
    Distances from one point to every row of a 2-D array.

    Rows are assumed already validated for the metric domain (datasets
    validate once on construction); x is validated here. Charges len(rows).
    """
    kind = MetricKind(kind)
    x = as_point(x)
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValidationError('rows must be a 2-D array')
    _check_dims(x, rows)
    check_domain(kind, x)
    counter.charge(rows.shape[0])
    return _kernel(kind, x, rows)


def paired_distances(kind, left, right, counter):
    """Row-wise distances rho(left[i], right[i]); charges len(left)."""
    kind = MetricKind(kind)
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape or left.ndim != 2:
        raise DimensionMismatch(f'paired shapes differ: {left.shape} vs {right.shape}')
    counter.charge(left.shape[0])
    return _kernel(kind, left, right)


def triangle_check(kind, x, y, z):
    """True iff rho(x, y) <= rho(x, z) + rho(z, y) within 1e-9."""
    scratch = DistanceCounter()
    xy = distance(kind, x, y, scratch)
    xz = distance(kind, x, z, scratch)
    zy = distance(kind, z, y, scratch)
    return xy <= xz + zy + TRIANGLE_TOLERANCE


def row_distance(kind, x, row, counter):
    """
    Distance between two already-validated vectors; charges one evaluation.

    Used by the query loops, which validate the query centre once and scan
    rows of a validated dataset.
    """
    counter.charge(1)
    return float(_kernel(kind, x, row[np.newaxis, :])[0])
