"""
pivotbench Diagnostics App - Intrinsic Dimension and Distance Distributions

The Chavez estimate d~ = E(rho)^2 / (2 Var(rho)) of the pairwise-distance
distribution grows as distances concentrate. It is scale invariant: mean and
standard deviation scale together.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.metrics.distances import DistanceCounter, distances_to, paired_distances
from apps.pivots.selection import random_pairs
from common.exceptions import ValidationError
from common.utils import STREAM_CENTERS, lower_median, make_rng, parallel_map

logger = logging.getLogger(__name__)

ANCHOR_PAIRS = 'pairs'
ANCHOR_ORIGIN = 'origin'
ANCHOR_CHOICES = (ANCHOR_PAIRS, ANCHOR_ORIGIN)


@dataclass(frozen=True)
class ChavezEstimate:
    mean: float
    variance: float
    dtilde: float
    pairs_used: int

    @property
    def is_infinite(self):
        """Zero variance: every distance equal, no metric index can help."""
        return math.isinf(self.dtilde)


@dataclass(frozen=True)
class DistanceHistogram:
    edges: np.ndarray
    counts: np.ndarray
    mean: float
    std: float
    samples: int


def _pair_distances(ds, pairs, seed, counter):
    if ds.n < 2:
        raise ValidationError('pairwise statistics need at least 2 points')
    sample = random_pairs(ds, pairs, seed)
    return paired_distances(ds.metric, ds.points[sample.left], ds.points[sample.right], counter)


def chavez_dimension(ds, pairs, seed, counter):
    """
    Estimate d~ from `pairs` random distinct-member pairs.

    Uses the Bessel-corrected sample variance; zero variance yields
    dtilde = inf.
    """
    if pairs < 2:
        raise ValidationError('the Chavez estimate needs at least 2 pairs')
    dists = _pair_distances(ds, pairs, seed, counter)
    mean = float(np.mean(dists))
    variance = float(np.var(dists, ddof=1))
    dtilde = math.inf if variance == 0 else mean * mean / (2.0 * variance)
    estimate = ChavezEstimate(mean, variance, dtilde, int(pairs))
    if estimate.is_infinite:
        logger.warning(f'All sampled distances equal on {ds}; Chavez dimension is infinite')
    logger.debug(f'Chavez estimate on {ds}: {estimate}')
    return estimate


def distance_histogram(ds, pairs, bins, normalize, seed, counter, anchor=ANCHOR_PAIRS):
    """
    Histogram of sampled distances with mean and sample standard deviation.

    anchor='pairs' samples pairwise distances; anchor='origin' measures each
    sampled point against the all-zero vertex instead (distance to a fixed
    corner of the cube, whose normalized mean tends to 1/sqrt(3)). With
    normalize set, distances are divided by sqrt(d).
    """
    if bins < 1:
        raise ValidationError('bins must be >= 1')
    if anchor not in ANCHOR_CHOICES:
        raise ValidationError(f'anchor must be one of {", ".join(ANCHOR_CHOICES)}')
    if anchor == ANCHOR_PAIRS:
        dists = _pair_distances(ds, pairs, seed, counter)
    else:
        ids = make_rng(seed, STREAM_CENTERS).integers(ds.n, size=pairs)
        dists = distances_to(ds.metric, np.zeros(ds.dim), ds.points[ids], counter)
    if normalize:
        dists = dists / math.sqrt(ds.dim)
    low, high = float(dists.min()), float(dists.max())
    if low == high:
        # all mass in a single bin
        low, high = low - 0.5, high + 0.5
    counts, edges = np.histogram(dists, bins=bins, range=(low, high))
    std = float(np.std(dists, ddof=1)) if dists.size > 1 else 0.0
    return DistanceHistogram(edges, counts, float(np.mean(dists)), std, int(dists.size))


def median_nn_distance(ds, queries, seed, counter):
    """
    Median brute-force nearest-neighbour distance from sampled centres.

    Generated datasets draw fresh centres from their source distribution;
    otherwise `queries` dataset points are resampled without replacement and
    excluded from their own search.
    """
    if ds.n < 2:
        raise ValidationError('nearest-neighbour distances need at least 2 points')
    if queries < 1:
        raise ValidationError('queries must be >= 1')
    rng = make_rng(seed, STREAM_CENTERS)
    if ds.source is not None:
        centers = ds.source.sample(queries, rng)

        def nearest(i):
            local = DistanceCounter()
            return float(np.min(distances_to(ds.metric, centers[i], ds.points, local))), local

        items = range(queries)
    else:
        ids = rng.choice(ds.n, size=min(queries, ds.n), replace=False)

        def nearest(center):
            local = DistanceCounter()
            others = np.concatenate((np.arange(center), np.arange(center + 1, ds.n)))
            dists = distances_to(ds.metric, ds.points[center], ds.points[others], local)
            return float(np.min(dists)), local

        items = ids.tolist()

    results = parallel_map(nearest, items)
    counter.charge(DistanceCounter.merged(local for _, local in results).count)
    return lower_median([value for value, _ in results])
