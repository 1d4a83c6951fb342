"""
pivotbench Pivots App - Pivot Table Index and Queries

The index stores k pivots p_1..p_k and the n x k table of distances
rho(x, p_i). For a query centre q the pivot distances induce the lower bound

    rho_k(q, x) = max_i |rho(q, p_i) - rho(x, p_i)| <= rho(q, x)

which is evaluated for free (it never calls the metric). A range query
discards every x with rho_k(q, x) > r and evaluates rho(q, x) for the rest,
so its cost is k + |X \\ C|.

Boundary convention: inclusion uses rho <= r, discarding uses rho_k > r plus
a few ulps, so a bound rounded upwards never drops a point at distance r.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from apps.metrics.distances import (
    DistanceCounter,
    as_point,
    check_domain,
    distances_to,
    row_distance,
)
from common.exceptions import PivotError, ValidationError
from common.utils import parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RangeQuery:
    """Centre q (any point of Omega) and radius r >= 0."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        radius = float(self.radius)
        if not math.isfinite(radius) or radius < 0:
            raise ValidationError(f'radius must be finite and >= 0, got {self.radius!r}')
        object.__setattr__(self, 'radius', radius)
        object.__setattr__(self, 'center', as_point(self.center))


@dataclass
class QueryReport:
    """
    Outcome of one query.

    cost is the number of metric evaluations charged during the call and
    always equals k + (n - discarded).
    """

    result_ids: np.ndarray
    discarded: int
    cost: int
    n: int
    kth_distance: float = None

    @property
    def discard_fraction(self):
        """The empirical measure of the discard set C."""
        return self.discarded / self.n

    @property
    def result_size(self):
        return len(self.result_ids)


@dataclass(eq=False)
class PivotIndex:
    """Pivot ids and the n x k distance table; immutable once built."""

    pivot_ids: np.ndarray
    table: np.ndarray
    metric: object
    build_cost: int = field(default=0)

    @property
    def k(self):
        return len(self.pivot_ids)

    @property
    def n(self):
        return self.table.shape[0]

    def __str__(self):
        return f'PivotIndex(n={self.n}, k={self.k}, {self.metric})'


def check_pivot_ids(pivot_ids, n):
    """Validate pivot ids against a dataset of size n; returns an int array."""
    ids = np.asarray(list(pivot_ids), dtype=np.int64)
    if ids.ndim != 1 or ids.size < 1:
        raise PivotError('at least one pivot is required')
    if np.any(ids < 0) or np.any(ids >= n):
        bad = ids[(ids < 0) | (ids >= n)][0]
        raise PivotError(f'pivot id {bad} out of range for n={n}')
    if np.unique(ids).size != ids.size:
        raise PivotError('pivot ids must be distinct')
    return ids


def build_index(ds, pivot_ids, counter):
    """
    Compute the n x k pivot table.

    Columns are computed independently (and in parallel when workers are
    available); the counter grows by exactly n * k.
    """
    ids = check_pivot_ids(pivot_ids, ds.n)

    def column(pivot):
        local = DistanceCounter()
        return distances_to(ds.metric, ds.points[pivot], ds.points, local), local

    columns = parallel_map(column, ids.tolist())
    table = np.column_stack([values for values, _ in columns])
    charged = DistanceCounter.merged(local for _, local in columns)
    counter.charge(charged.count)
    table.flags.writeable = False
    ids.flags.writeable = False
    index = PivotIndex(ids, table, ds.metric, build_cost=charged.count)
    logger.debug(f'Built {index} for {ds}')
    return index


def rho_k(idx, q_dists, x):
    """The pivot lower bound for dataset point x; charges nothing."""
    q_dists = np.asarray(q_dists, dtype=np.float64)
    if q_dists.shape != (idx.k,):
        raise ValidationError(f'expected {idx.k} pivot distances, got {q_dists.shape[0] if q_dists.ndim else 0}')
    return float(np.max(np.abs(q_dists - idx.table[x])))


def lower_bounds(idx, q_dists):
    """rho_k(q, x) for every dataset point at once; charges nothing."""
    return np.max(np.abs(idx.table - q_dists), axis=1)


FILTER_ULPS = 64


def rounding_allowance(scale):
    """A few ulps of scale: how far a computed bound may overshoot."""
    return FILTER_ULPS * float(np.spacing(abs(float(scale))))


def discard_threshold(radius, q_dists):
    """
    Largest lower bound that may still be kept for radius r.

    rho_k is computed in doubles and can land a few ulps above the true
    value; the allowance scales with max(r, rho(q, p_i)).
    """
    scale = max(float(radius), float(np.max(q_dists)) if len(q_dists) else 0.0)
    return float(radius) + rounding_allowance(scale)


def pivot_distances(idx, ds, center, counter):
    """rho(q, p_i) for the k pivots; charges k."""
    return distances_to(ds.metric, center, ds.points[idx.pivot_ids], counter)


def _prepare(idx, ds, center):
    if idx.n != ds.n:
        raise ValidationError(f'index covers {idx.n} points but dataset has {ds.n}')
    center = as_point(center, ds.dim)
    check_domain(ds.metric, center)
    return center


def range_query(idx, ds, query, counter):
    """
    All x with rho(q, x) <= r, using the pivot filter.

    Returns the same ids as linear_scan at cost k + |X \\ C|.
    """
    center = _prepare(idx, ds, query.center)
    start = counter.count
    q_dists = pivot_distances(idx, ds, center, counter)
    kept = np.flatnonzero(lower_bounds(idx, q_dists) <= discard_threshold(query.radius, q_dists))
    dists = distances_to(ds.metric, center, ds.points[kept], counter)
    result = kept[dists <= query.radius]
    return QueryReport(
        result_ids=result,
        discarded=ds.n - kept.size,
        cost=counter.count - start,
        n=ds.n,
    )


def knn_query(idx, ds, center, k_nn, counter):
    """
    The k_nn nearest points of X to q, ties broken by lower id.

    Points are scanned in increasing rho_k order; once k_nn candidates are
    held, the current k_nn-th best distance is the search radius and the scan
    stops at the first point whose lower bound exceeds it.
    """
    if isinstance(k_nn, bool) or int(k_nn) != k_nn or not 1 <= k_nn <= ds.n:
        raise ValidationError(f'k_nn must lie in [1, {ds.n}], got {k_nn!r}')
    k_nn = int(k_nn)
    center = _prepare(idx, ds, center)
    start = counter.count
    q_dists = pivot_distances(idx, ds, center, counter)
    bounds = lower_bounds(idx, q_dists)
    order = np.lexsort((np.arange(ds.n), bounds))

    # max-heap on (distance, id) holding the best k_nn so far
    best = []
    radius = limit = math.inf
    evaluated = 0
    for x in order.tolist():
        if bounds[x] > limit:
            break
        dist = row_distance(ds.metric, center, ds.points[x], counter)
        evaluated += 1
        entry = (-dist, -x)
        if len(best) < k_nn:
            heapq.heappush(best, entry)
        elif entry > best[0]:
            heapq.heapreplace(best, entry)
        if len(best) == k_nn:
            radius = -best[0][0]
            limit = discard_threshold(radius, q_dists)

    ids = np.sort(np.array([-x for _, x in best], dtype=np.int64))
    return QueryReport(
        result_ids=ids,
        discarded=ds.n - evaluated,
        cost=counter.count - start,
        n=ds.n,
        kth_distance=radius,
    )


def proportion_query(idx, ds, center, fraction, counter):
    """The closest ceil(fraction * n) points: a kNN query in disguise."""
    if not 0 < fraction <= 1:
        raise ValidationError(f'fraction must lie in (0, 1], got {fraction!r}')
    return knn_query(idx, ds, center, math.ceil(fraction * ds.n), counter)


def linear_scan(ds, query, counter):
    """The baseline: evaluate rho(q, x) for every x; cost n."""
    center = as_point(query.center, ds.dim)
    check_domain(ds.metric, center)
    start = counter.count
    dists = distances_to(ds.metric, center, ds.points, counter)
    return QueryReport(
        result_ids=np.flatnonzero(dists <= query.radius),
        discarded=0,
        cost=counter.count - start,
        n=ds.n,
    )


def linear_knn(ds, center, k_nn, counter):
    """
    Brute-force k nearest neighbours, ordered by (distance, id).

    Returns:
        (ids, distances) arrays of length k_nn
    """
    center = as_point(center, ds.dim)
    dists = distances_to(ds.metric, center, ds.points, counter)
    order = np.lexsort((np.arange(ds.n), dists))[:k_nn]
    return order, dists[order]
