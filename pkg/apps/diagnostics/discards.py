"""
pivotbench Diagnostics App - Discard Statistics

Empirical measure of the discard set C over a batch of range queries. As
dimension grows with the dataset, the median fraction falls towards zero
and pivot search degenerates into a linear scan.
"""

from dataclasses import dataclass

import numpy as np

from apps.metrics.distances import DistanceCounter
from apps.pivots.index import range_query
from common.utils import lower_median, parallel_map


@dataclass(frozen=True)
class DiscardStatistics:
    fractions: np.ndarray
    median: float


def discard_statistics(idx, ds, queries, counter):
    """Run every query and report |C| / n per query and its lower median."""
    queries = list(queries)

    def run(query):
        local = DistanceCounter()
        return range_query(idx, ds, query, local).discard_fraction, local

    results = parallel_map(run, queries)
    counter.charge(DistanceCounter.merged(local for _, local in results).count)
    fractions = np.array([fraction for fraction, _ in results])
    return DiscardStatistics(fractions=fractions, median=lower_median(fractions))
