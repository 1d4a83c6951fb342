"""
pivotbench Datasets App - Datasets and Seeded Generators

A Dataset is a finite sample X of an abstract space Omega: n points of
dimension d plus the metric they are searched under. The generators below
draw the synthetic spaces used throughout the workbench:

- uniform unit hypercube I^d (Euclidean by default)
- uniform unit sphere S^(d-1) embedded in R^d (Euclidean by default)
- Hamming cube {0,1}^d with the normalized mismatch distance

Generated datasets remember their DatasetSource so experiments can draw
fresh query centres from Omega rather than from X.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from apps.metrics.distances import MetricKind, check_domain
from common.exceptions import MetricDomainError, ValidationError
from common.utils import STREAM_DATASET, make_rng

logger = logging.getLogger(__name__)

GENERATOR_CUBE = 'cube'
GENERATOR_SPHERE = 'sphere'
GENERATOR_HAMMING = 'hamming'

GENERATOR_CHOICES = (GENERATOR_CUBE, GENERATOR_SPHERE, GENERATOR_HAMMING)

DEFAULT_METRICS = {
    GENERATOR_CUBE: MetricKind.EUCLIDEAN,
    GENERATOR_SPHERE: MetricKind.EUCLIDEAN,
    GENERATOR_HAMMING: MetricKind.HAMMING_NORMALIZED,
}


def _check_count(name, value, minimum=1):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ValidationError(f'{name} must be an integer >= {minimum}, got {value!r}')
    return int(value)


def _draw(generator, dim, count, rng):
    if generator == GENERATOR_CUBE:
        return rng.random((count, dim))
    if generator == GENERATOR_SPHERE:
        gauss = rng.standard_normal((count, dim))
        return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)
    if generator == GENERATOR_HAMMING:
        return rng.integers(0, 2, size=(count, dim)).astype(np.float64)
    raise ValidationError(f'unknown generator {generator!r}')


@dataclass(frozen=True)
class DatasetSource:
    """The distribution a dataset was drawn from."""

    generator: str
    dim: int

    def sample(self, count, rng):
        """Draw count fresh points of Omega from rng."""
        return _draw(self.generator, self.dim, _check_count('count', count), rng)


@dataclass(eq=False)
class Dataset:
    """
    n points of dimension d with an attached metric.

    Points are stored as a read-only float64 array; Hamming points use the
    values 0.0 and 1.0. The metric domain is validated once here rather than
    on every distance call.
    """

    points: np.ndarray
    metric: MetricKind = MetricKind.EUCLIDEAN
    label: str = ''
    source: DatasetSource = field(default=None)

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64, copy=True)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValidationError('a dataset needs n >= 1 points of dimension d >= 1')
        if not np.all(np.isfinite(points)):
            raise MetricDomainError('dataset coordinates must be finite')
        self.metric = MetricKind(self.metric)
        check_domain(self.metric, points)
        points.flags.writeable = False
        self.points = points

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __str__(self):
        return f'{self.label or "dataset"} (n={self.n}, d={self.dim}, {self.metric.value})'

    def with_metric(self, metric):
        """Same points searched under another metric."""
        return replace(self, points=self.points, metric=MetricKind(metric))

    def scaled(self, factor):
        """Every coordinate multiplied by a positive constant."""
        if factor <= 0:
            raise ValidationError('scale factor must be positive')
        return Dataset(self.points * factor, self.metric, f'{self.label} x{factor:g}')


def generate(generator, d, n, seed, metric=None):
    """Dispatch to one of the named generators."""
    if generator not in GENERATOR_CHOICES:
        raise ValidationError(f'unknown generator {generator!r}; choose from {", ".join(GENERATOR_CHOICES)}')
    d = _check_count('d', d, 2 if generator == GENERATOR_SPHERE else 1)
    n = _check_count('n', n)
    rng = make_rng(seed, STREAM_DATASET)
    points = _draw(generator, d, n, rng)
    ds = Dataset(
        points,
        metric=metric or DEFAULT_METRICS[generator],
        label=f'{generator}-d{d}',
        source=DatasetSource(generator, d),
    )
    logger.debug(f'Generated {ds} with seed {seed}')
    return ds


def gen_uniform_cube(d, n, seed):
    """n i.i.d. points uniform on [0,1]^d."""
    return generate(GENERATOR_CUBE, d, n, seed)


def gen_uniform_sphere(d, n, seed):
    """n points uniform on the unit sphere in R^d (normalized Gaussians)."""
    return generate(GENERATOR_SPHERE, d, n, seed)


def gen_hamming(d, n, seed):
    """n fair-coin binary strings of length d."""
    return generate(GENERATOR_HAMMING, d, n, seed)


def cube_side_for_fraction(fraction, d):
    """
    Side length of a sub-cube of I^d holding the given volume fraction.

    The classic illustration of the curse: 1% of the volume needs side 0.1
    when d=2 but about 0.79 when d=20.
    """
    if not 0 < fraction <= 1:
        raise ValidationError('fraction must lie in (0, 1]')
    _check_count('d', d)
    return fraction ** (1.0 / d)
