"""
pivotbench Orchard App - Sorted Neighbour Rows and Exact 1-NN Search

Every point keeps the other n - 1 ids sorted by distance to it. A search
holds a candidate y with known rho(y, q) and walks y's row; the first z that
is closer to q becomes the new candidate and the walk restarts on z's row.
A row entry with rho(z, y) > 2 rho(y, q) (plus a few ulps for rounding) ends
the search, because every later entry z' then has rho(z', q) >= rho(z', y) - rho(y, q) > rho(y, q).

Memory is O(n^2): builds above PIVOTBENCH_ORCHARD_MAX_POINTS are refused
unless explicitly allowed.
"""

import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from apps.metrics.distances import as_point, check_domain, distances_to, row_distance
from apps.pivots.index import rounding_allowance
from common.exceptions import CapacityError, ValidationError
from common.utils import STREAM_START, make_rng

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class OrchardIndex:
    """Row x lists every other id by increasing rho(x, .), ties by lower id."""

    neighbor_ids: np.ndarray
    neighbor_dists: np.ndarray
    build_cost: int = 0

    @property
    def n(self):
        return self.neighbor_ids.shape[0]

    def row(self, x):
        """(id, distance) pairs of row x."""
        return list(zip(self.neighbor_ids[x].tolist(), self.neighbor_dists[x].tolist()))


@dataclass(frozen=True)
class OrchardResult:
    nn_id: int
    nn_dist: float
    cost: int


def orchard_capacity():
    return int(getattr(settings, 'PIVOTBENCH_ORCHARD_MAX_POINTS', 50_000))


def build_orchard(ds, counter, max_points=None, allow_large=False):
    """
    Evaluate every unordered pair once and sort each row.

    The counter grows by n (n - 1) / 2.

    Raises:
        ValidationError: n < 2
        CapacityError: n above the cap and allow_large not set
    """
    n = ds.n
    if n < 2:
        raise ValidationError('Orchard needs at least 2 points')
    cap = orchard_capacity() if max_points is None else int(max_points)
    if n > cap and not allow_large:
        logger.warning(f'Refusing Orchard build for n={n} above cap {cap}')
        raise CapacityError(f'Orchard index for n={n} exceeds the cap of {cap} points')

    full = np.zeros((n, n))
    start = counter.count
    for i in range(n - 1):
        dists = distances_to(ds.metric, ds.points[i], ds.points[i + 1:], counter)
        full[i, i + 1:] = dists
        full[i + 1:, i] = dists
    np.fill_diagonal(full, np.inf)

    ids = np.broadcast_to(np.arange(n), (n, n))
    order = np.lexsort((ids, full), axis=-1)[:, :-1]
    neighbor_dists = np.take_along_axis(full, order, axis=-1)
    order.flags.writeable = False
    neighbor_dists.flags.writeable = False
    index = OrchardIndex(order, neighbor_dists, build_cost=counter.count - start)
    logger.info(f'Built Orchard rows for {ds} at cost {index.build_cost}')
    return index


def orchard_nn(idx, ds, q, counter, start_id=None, seed=0):
    """
    Exact nearest neighbour of q, ties by lower id.

    start_id defaults to a seeded random id. Distances to q are memoized, so
    cost (fresh evaluations) never exceeds n.
    """
    if idx.n != ds.n:
        raise ValidationError(f'index covers {idx.n} points but dataset has {ds.n}')
    if start_id is None:
        start_id = int(make_rng(seed, STREAM_START).integers(ds.n))
    if isinstance(start_id, bool) or int(start_id) != start_id or not 0 <= start_id < ds.n:
        raise ValidationError(f'start id {start_id!r} out of range for n={ds.n}')
    q = as_point(q, ds.dim)
    check_domain(ds.metric, q)

    memo = {}

    def dist_to(z):
        if z not in memo:
            memo[z] = row_distance(ds.metric, q, ds.points[z], counter)
        return memo[z]

    y = int(start_id)
    dy = dist_to(y)
    moved = True
    while moved:
        moved = False
        limit = 2.0 * dy
        limit += rounding_allowance(limit)
        for z, dzy in zip(idx.neighbor_ids[y].tolist(), idx.neighbor_dists[y].tolist()):
            if dzy > limit:
                break
            dz = dist_to(z)
            if (dz, z) < (dy, y):
                y, dy = z, dz
                moved = True
                break
    return OrchardResult(nn_id=y, nn_dist=dy, cost=len(memo))
