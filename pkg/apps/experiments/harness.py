"""
pivotbench Experiments App - Benchmark Harness

A sweep calibrates one query radius per (dataset, target fraction), then for
every pivot count k selects pivots, builds the table and runs the same
query_count range queries, emitting one ExperimentRow per k.

Query centres are fresh draws from the dataset's generator. Datasets loaded
from files have no generator, so their centres are dataset points chosen
leave-one-out: the centre is dropped from its own result.

Every query owns its counter and its RNG stream (seed, queries, i), so rows
are identical at any worker count.
"""

import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from django.conf import settings

from apps.datasets.generators import GENERATOR_CHOICES, generate
from apps.datasets.io import load_ascii
from apps.metrics.distances import DistanceCounter, MetricKind, distances_to
from apps.pivots.index import RangeQuery, build_index, range_query
from apps.pivots.selection import SelectionConfig, select_incremental, select_random
from common.exceptions import PivotBenchException, PivotError, ValidationError
from common.utils import (
    STREAM_PROBES,
    STREAM_QUERIES,
    check_seed,
    lower_median,
    make_rng,
    parallel_map,
)

logger = logging.getLogger(__name__)

STRATEGY_RANDOM = 'random'
STRATEGY_INCREMENTAL = 'incremental'
STRATEGY_CHOICES = (STRATEGY_RANDOM, STRATEGY_INCREMENTAL)

CENTER_FRESH = 'fresh'
CENTER_LEAVE_ONE_OUT = 'leave-one-out'

CSV_HEADER = [
    'd', 'n', 'k', 'selection_mode', 'radius', 'avg_cost',
    'avg_result_size', 'median_discard_fraction', 'build_cost', 'seed',
]


@dataclass(frozen=True)
class DatasetSpec:
    """Either a generator with its parameters or an ASCII dataset path."""

    generator: str = None
    d: int = None
    n: int = None
    path: str = None
    metric: str = None

    def __post_init__(self):
        if (self.generator is None) == (self.path is None):
            raise ValidationError('give either a generator or a dataset path')
        if self.generator is not None:
            if self.generator not in GENERATOR_CHOICES:
                raise ValidationError(f'unknown generator {self.generator!r}')
            if self.d is None or self.n is None:
                raise ValidationError('generated datasets need d and n')
        if self.metric is not None:
            MetricKind(self.metric)

    def describe(self):
        if self.path is not None:
            return str(self.path)
        return f'{self.generator} d={self.d} n={self.n}'

    def materialize(self, seed):
        """Generate or load the dataset."""
        if self.path is not None:
            return load_ascii(self.path, metric=self.metric or MetricKind.EUCLIDEAN)
        return generate(self.generator, self.d, self.n, seed, metric=self.metric)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec
    k_sweep: tuple
    strategy: str = STRATEGY_RANDOM
    selection: SelectionConfig = None
    query_count: int = field(default_factory=lambda: settings.PIVOTBENCH_QUERY_COUNT)
    target_fraction: float = field(default_factory=lambda: settings.PIVOTBENCH_TARGET_FRACTION)
    probe_queries: int = field(default_factory=lambda: settings.PIVOTBENCH_PROBE_QUERIES)
    seed: int = 0

    def __post_init__(self):
        ks = tuple(int(k) for k in self.k_sweep)
        if not ks:
            raise ValidationError('k_sweep must not be empty')
        if ks[0] < 1:
            raise PivotError('pivot counts must be >= 1')
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValidationError('k_sweep must be strictly ascending')
        object.__setattr__(self, 'k_sweep', ks)
        if self.strategy not in STRATEGY_CHOICES:
            raise ValidationError(f'strategy must be one of {", ".join(STRATEGY_CHOICES)}')
        if self.query_count < 1 or self.probe_queries < 1:
            raise ValidationError('query and probe counts must be >= 1')
        if not 0 < self.target_fraction <= 1:
            raise ValidationError('target fraction must lie in (0, 1]')
        check_seed(self.seed)
        selection = self.selection or SelectionConfig(
            k=ks[-1],
            pairs=settings.PIVOTBENCH_SELECTION_PAIRS,
            candidates=settings.PIVOTBENCH_SELECTION_CANDIDATES,
            seed=self.seed,
        )
        object.__setattr__(self, 'selection', replace(selection, k=ks[-1], seed=self.seed))

    @property
    def selection_mode(self):
        if self.strategy == STRATEGY_INCREMENTAL:
            return self.selection.label
        return STRATEGY_RANDOM

    def as_dict(self):
        data = asdict(self)
        data['k_sweep'] = list(self.k_sweep)
        return data


@dataclass(frozen=True)
class ExperimentRow:
    d: int
    n: int
    k: int
    selection_mode: str
    radius: float
    avg_cost: float
    avg_result_size: float
    median_discard_fraction: float
    build_cost: int
    seed: int

    def as_csv_row(self):
        return [getattr(self, name) for name in CSV_HEADER]


@dataclass(frozen=True)
class RadiusCalibration:
    radius: float
    degenerate: bool
    center_mode: str
    probes: int


def center_mode_for(ds):
    return CENTER_FRESH if ds.source is not None else CENTER_LEAVE_ONE_OUT


def _others(center, n):
    return np.concatenate((np.arange(center), np.arange(center + 1, n)))


def calibrate_radius(ds, target_fraction, probe_queries, seed, counter):
    """
    The target_fraction quantile of probe-to-dataset distances.

    Probe centres are fresh generator draws, or dataset points without
    replacement (excluding the probe itself) for file datasets. When every
    pooled distance is equal the radius is that distance and the result is
    flagged degenerate.
    """
    if not 0 < target_fraction <= 1:
        raise ValidationError('target fraction must lie in (0, 1]')
    if probe_queries < 1:
        raise ValidationError('probe count must be >= 1')
    mode = center_mode_for(ds)
    rng = make_rng(seed, STREAM_PROBES)
    if mode == CENTER_FRESH:
        centers = ds.source.sample(probe_queries, rng)
        pooled = [distances_to(ds.metric, c, ds.points, counter) for c in centers]
    else:
        if ds.n < 2:
            raise ValidationError('leave-one-out calibration needs at least 2 points')
        ids = rng.choice(ds.n, size=min(probe_queries, ds.n), replace=False)
        pooled = [
            distances_to(ds.metric, ds.points[c], ds.points[_others(c, ds.n)], counter)
            for c in ids.tolist()
        ]
    probes = len(pooled)
    pooled = np.concatenate(pooled)
    radius = float(np.quantile(pooled, target_fraction, method='inverted_cdf'))
    degenerate = bool(pooled.min() == pooled.max())
    if degenerate:
        logger.warning(f'Degenerate calibration on {ds}: every probe distance equals {radius}')
    logger.info(f'Calibrated radius {radius:.6g} for fraction {target_fraction} on {ds} ({mode} centres)')
    return RadiusCalibration(radius, degenerate, mode, probes)


def query_centers(ds, count, seed):
    """
    Centres of the benchmark queries, one RNG stream per query number.

    Returns:
        (centres array, centre ids or None for fresh centres)
    """
    if ds.source is not None:
        centers = np.array([ds.source.sample(1, make_rng(seed, STREAM_QUERIES, i))[0] for i in range(count)])
        return centers, None
    ids = np.array([make_rng(seed, STREAM_QUERIES, i).integers(ds.n) for i in range(count)], dtype=np.int64)
    return ds.points[ids], ids


def _pivot_prefixes(ds, cfg):
    """Pivot ids and selection cost for every k of the sweep."""
    ks = cfg.k_sweep
    if ks[-1] >= ds.n:
        raise PivotError(f'k={ks[-1]} needs more than {ds.n} points')
    if cfg.strategy == STRATEGY_RANDOM:
        return {k: (select_random(ds, k, cfg.seed), 0) for k in ks}
    # greedy steps do not depend on the final k, so one run serves every prefix
    trace = []
    pivots = select_incremental(ds, cfg.selection, DistanceCounter(), trace=trace)
    return {k: (pivots[:k], trace[k - 1][2]) for k in ks}


def run_sweep(cfg, on_row=None, metadata=None):
    """
    Run the k-sweep described by cfg.

    Args:
        cfg: ExperimentConfig
        on_row: optional callable receiving each ExperimentRow as soon as it
            is complete, so finished rows survive a later failure
        metadata: optional dict filled with the calibration outcome and the
            centre mode

    Returns:
        list of ExperimentRow in k order
    """
    ds = cfg.dataset.materialize(cfg.seed)
    calibration = calibrate_radius(ds, cfg.target_fraction, cfg.probe_queries, cfg.seed, DistanceCounter())
    centers, center_ids = query_centers(ds, cfg.query_count, cfg.seed)
    logger.info(f'Sweep on {ds}: {calibration.center_mode} centres, {cfg.query_count} queries per row')
    if metadata is not None:
        metadata.update({
            'dataset': cfg.dataset.describe(),
            'center_mode': calibration.center_mode,
            'radius': calibration.radius,
            'degenerate': calibration.degenerate,
            'selection_mode': cfg.selection_mode,
        })

    prefixes = _pivot_prefixes(ds, cfg)
    rows = []
    for k in cfg.k_sweep:
        pivot_ids, selection_cost = prefixes[k]
        idx = build_index(ds, pivot_ids, DistanceCounter())

        def run(i):
            local = DistanceCounter()
            report = range_query(idx, ds, RangeQuery(centers[i], calibration.radius), local)
            size = report.result_size
            if center_ids is not None:
                size -= 1
            return report.cost, local.count, size, report.discard_fraction

        results = parallel_map(run, range(cfg.query_count))
        reported = sum(r[0] for r in results)
        charged = sum(r[1] for r in results)
        if reported != charged:
            raise PivotBenchException(f'cost audit failed at k={k}: reported {reported}, counted {charged}')

        row = ExperimentRow(
            d=ds.dim,
            n=ds.n,
            k=k,
            selection_mode=cfg.selection_mode,
            radius=calibration.radius,
            avg_cost=charged / cfg.query_count,
            avg_result_size=sum(r[2] for r in results) / cfg.query_count,
            median_discard_fraction=lower_median([r[3] for r in results]),
            build_cost=selection_cost + idx.build_cost,
            seed=cfg.seed,
        )
        logger.info(f'k={k}: avg cost {row.avg_cost:.2f} of n={ds.n}, median discard {row.median_discard_fraction:.4f}')
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return rows
