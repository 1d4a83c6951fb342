"""
pivotbench Pivots App - Test Cases

Tests for the pivot table index, its queries, persistence and pivot selection.
"""

import math

import numpy as np
import pytest

from apps.datasets.generators import Dataset, generate
from apps.metrics.distances import DistanceCounter, MetricKind, distance, distances_to
from apps.pivots.index import (
    RangeQuery,
    build_index,
    discard_threshold,
    knn_query,
    linear_knn,
    linear_scan,
    lower_bounds,
    pivot_distances,
    proportion_query,
    range_query,
    rho_k,
)
from apps.pivots.persistence import load_index, load_pivots, save_index, save_pivots
from apps.pivots.selection import (
    PAIRS_SMART,
    PairSample,
    SelectionConfig,
    best_candidate,
    jth_neighbour,
    pair_objective,
    random_pairs,
    score_candidates,
    select_incremental,
    select_random,
    smart_pairs,
)
from common.exceptions import DatasetFormatError, PivotError, ValidationError

GENERATOR_FOR_METRIC = {
    MetricKind.EUCLIDEAN: 'cube',
    MetricKind.CHEBYSHEV: 'cube',
    MetricKind.HAMMING_NORMALIZED: 'hamming',
    MetricKind.GEODESIC: 'sphere',
}


def fresh_center(ds, rng):
    return ds.source.sample(1, rng)[0]


# ============================================================================
# Index Construction Tests
# ============================================================================

@pytest.mark.unit
class TestBuildIndex:
    """Test cases for build_index."""

    def test_table_matches_fresh_evaluations(self, make_cube, counter):
        """Test that every table entry equals rho(x, p)."""
        ds = make_cube(d=4, n=60)
        idx = build_index(ds, [3, 17, 42], counter)
        for x in range(ds.n):
            for slot, p in enumerate(idx.pivot_ids):
                assert idx.table[x, slot] == distance(ds.metric, ds.points[x], ds.points[p], DistanceCounter())

    def test_build_charges_n_times_k(self, make_cube, counter):
        """Test that the build charges exactly n * k."""
        ds = make_cube(n=200)
        idx = build_index(ds, [0, 1, 2, 3, 4], counter)
        assert counter.count == 200 * 5
        assert idx.build_cost == 1000

    def test_schedule_independent(self, make_cube, monkeypatch):
        """Test that the table does not depend on the worker count."""
        ds = make_cube(n=300)
        monkeypatch.setenv('PIVOTBENCH_THREADS', '1')
        one = build_index(ds, range(8), DistanceCounter()).table
        monkeypatch.setenv('PIVOTBENCH_THREADS', '4')
        four = build_index(ds, range(8), DistanceCounter()).table
        assert np.array_equal(one, four)

    def test_duplicate_pivots_rejected(self, make_cube, counter):
        """Test that duplicate pivot ids are rejected."""
        with pytest.raises(PivotError):
            build_index(make_cube(n=10), [1, 1], counter)

    def test_out_of_range_pivot_rejected(self, make_cube, counter):
        """Test that out-of-range pivot ids are rejected."""
        with pytest.raises(PivotError):
            build_index(make_cube(n=10), [10], counter)

    def test_empty_pivot_set_rejected(self, make_cube, counter):
        """Test that k = 0 is rejected."""
        with pytest.raises(PivotError):
            build_index(make_cube(n=10), [], counter)


# ============================================================================
# Range Query Tests
# ============================================================================

@pytest.mark.unit
class TestRangeQuery:
    """Test cases for range_query and linear_scan."""

    def test_hand_evaluated_line(self, make_line, counter):
        """Test {0, 1, 10} with pivot 0, q = 0.4, r = 0.5."""
        ds = make_line()
        idx = build_index(ds, [0], DistanceCounter())
        report = range_query(idx, ds, RangeQuery([0.4], 0.5), counter)
        assert report.result_ids.tolist() == [0]
        assert report.discarded == 2
        assert report.cost == 2
        assert counter.count == 2

    def test_large_radius_returns_everything(self, make_cube, counter):
        """Test that r above the diameter returns all of X at cost k + n."""
        ds = make_cube(d=3, n=100)
        idx = build_index(ds, [0, 1, 2], DistanceCounter())
        report = range_query(idx, ds, RangeQuery(np.full(3, 0.5), 10.0), counter)
        assert report.result_size == 100
        assert report.cost == 103

    def test_query_at_pivot_scans_only_the_ball(self, make_cube, counter):
        """Test that a pivot centre makes the filter exact."""
        ds = make_cube(d=5, n=400)
        idx = build_index(ds, [7, 8], DistanceCounter())
        report = range_query(idx, ds, RangeQuery(ds.points[7], 0.6), counter)
        assert report.cost == idx.k + report.result_size

    def test_boundary_point_is_included(self, make_line, counter):
        """Test the inclusive rho <= r convention."""
        ds = make_line([0.0, 1.0, 2.0])
        idx = build_index(ds, [2], DistanceCounter())
        report = range_query(idx, ds, RangeQuery([0.0], 1.0), counter)
        assert report.result_ids.tolist() == [0, 1]

    def test_rounded_bound_keeps_boundary_point(self):
        """Test a Hamming point at exactly r whose rho_k rounds above r."""
        points = np.zeros((2, 20))
        points[1, :8] = 1.0
        ds = Dataset(points, MetricKind.HAMMING_NORMALIZED, 'hamming20')
        idx = build_index(ds, [0], DistanceCounter())
        center = np.zeros(20)
        center[:2] = 1.0
        q_dists = pivot_distances(idx, ds, center, DistanceCounter())
        assert rho_k(idx, q_dists, 1) > 6 / 20
        query = RangeQuery(center, 6 / 20)
        report = range_query(idx, ds, query, DistanceCounter())
        assert report.result_ids.tolist() == linear_scan(ds, query, DistanceCounter()).result_ids.tolist() == [0, 1]
        assert knn_query(idx, ds, center, 2, DistanceCounter()).result_ids.tolist() == [0, 1]

    def test_discard_threshold_is_a_few_ulps_above_r(self):
        """Test that the allowance is tiny next to the radius."""
        threshold = discard_threshold(0.3, np.array([0.1, 0.4]))
        assert 0.3 < threshold < 0.3 + 1e-13
        assert discard_threshold(0.0, np.array([0.0])) >= 0.0

    def test_negative_radius_rejected(self):
        """Test RangeQuery validation."""
        with pytest.raises(ValidationError):
            RangeQuery([0.0], -0.1)

    def test_linear_scan_cost(self, make_cube, counter):
        """Test that the baseline costs n."""
        ds = make_cube(n=1000)
        report = linear_scan(ds, RangeQuery(np.zeros(8), 0.5), counter)
        assert report.cost == 1000

    def test_linear_scan_zero_radius(self, make_cube, counter):
        """Test that r = 0 at a dataset point returns only that point."""
        ds = make_cube(n=50)
        report = linear_scan(ds, RangeQuery(ds.points[13], 0.0), counter)
        assert report.result_ids.tolist() == [13]

    def test_dimension_mismatch(self, make_cube, counter):
        """Test that a query of the wrong dimension is rejected."""
        ds = make_cube(d=3, n=10)
        idx = build_index(ds, [0], DistanceCounter())
        with pytest.raises(ValidationError):
            range_query(idx, ds, RangeQuery([0.0, 0.0], 1.0), counter)

    @pytest.mark.parametrize('metric', list(GENERATOR_FOR_METRIC))
    @pytest.mark.parametrize('d', [2, 8, 20, 64])
    def test_oracle_equivalence(self, metric, d):
        """Test range_query against linear_scan over random configurations."""
        rng = np.random.default_rng(d * 31 + len(metric))
        for trial in range(64):
            ds = generate(GENERATOR_FOR_METRIC[metric], d, int(rng.integers(20, 200)), trial, metric=metric)
            k = int(rng.integers(1, 9))
            pivots = rng.choice(ds.n, size=k, replace=False)
            idx = build_index(ds, pivots, DistanceCounter())
            center = fresh_center(ds, rng) if trial % 2 else ds.points[int(rng.integers(ds.n))]
            dists = distances_to(ds.metric, center, ds.points, DistanceCounter())
            radius = float(np.quantile(dists, rng.random()))
            counter = DistanceCounter()
            report = range_query(idx, ds, RangeQuery(center, radius), counter)
            oracle = linear_scan(ds, RangeQuery(center, radius), DistanceCounter())
            assert report.result_ids.tolist() == oracle.result_ids.tolist()
            assert report.cost == counter.count == k + ds.n - report.discarded

    def test_more_pivots_never_scan_more(self, make_cube):
        """Test that adding pivots can only grow the discard set."""
        ds = make_cube(d=6, n=500)
        center = np.full(6, 0.3)
        query = RangeQuery(center, 0.4)
        scanned = []
        for k in (1, 2, 4, 8, 16):
            idx = build_index(ds, range(k), DistanceCounter())
            scanned.append(ds.n - range_query(idx, ds, query, DistanceCounter()).discarded)
        assert scanned == sorted(scanned, reverse=True)


# ============================================================================
# Filter Soundness Tests
# ============================================================================

@pytest.mark.parametrize('metric', list(GENERATOR_FOR_METRIC))
class TestFilterSoundness:
    """rho_k(q, x) <= rho(q, x) for random queries and points."""

    def test_lower_bound_holds(self, metric):
        """Test the pivot lower bound on 10^5 (q, x) pairs."""
        ds = generate(GENERATOR_FOR_METRIC[metric], 8, 1000, 5, metric=metric)
        idx = build_index(ds, range(0, 1000, 125), DistanceCounter())
        rng = np.random.default_rng(9)
        for _ in range(100):
            q = fresh_center(ds, rng)
            bounds = lower_bounds(idx, pivot_distances(idx, ds, q, DistanceCounter()))
            true = distances_to(ds.metric, q, ds.points, DistanceCounter())
            assert np.all(bounds <= true + 1e-9)

    def test_scalar_matches_vector(self, metric):
        """Test rho_k against the vectorized bounds."""
        ds = generate(GENERATOR_FOR_METRIC[metric], 4, 50, 1, metric=metric)
        idx = build_index(ds, [0, 5, 9], DistanceCounter())
        q_dists = pivot_distances(idx, ds, ds.points[20], DistanceCounter())
        vector = lower_bounds(idx, q_dists)
        assert [rho_k(idx, q_dists, x) for x in range(ds.n)] == vector.tolist()


# ============================================================================
# Nearest Neighbour Query Tests
# ============================================================================

@pytest.mark.unit
class TestKnnQuery:
    """Test cases for knn_query and proportion_query."""

    def test_nearest_on_line(self, make_line, counter):
        """Test k_nn = 1 on {0, 1, 10} with q = 0.4."""
        ds = make_line()
        idx = build_index(ds, [0], DistanceCounter())
        assert knn_query(idx, ds, [0.4], 1, counter).result_ids.tolist() == [0]

    def test_all_points(self, make_cube, counter):
        """Test k_nn = n returns all ids at cost k + n."""
        ds = make_cube(n=80)
        idx = build_index(ds, [0, 1], DistanceCounter())
        report = knn_query(idx, ds, np.full(8, 0.5), 80, counter)
        assert report.result_ids.tolist() == list(range(80))
        assert report.cost == 82

    def test_matches_brute_force(self, make_cube):
        """Test 100 random queries against a brute-force sort."""
        ds = make_cube(d=8, n=1000, seed=3)
        idx = build_index(ds, range(0, 1000, 100), DistanceCounter())
        rng = np.random.default_rng(0)
        for _ in range(100):
            q = fresh_center(ds, rng)
            k_nn = int(rng.integers(1, 30))
            report = knn_query(idx, ds, q, k_nn, DistanceCounter())
            ids, dists = linear_knn(ds, q, k_nn, DistanceCounter())
            assert report.result_ids.tolist() == sorted(ids.tolist())
            assert report.kth_distance == dists[-1]

    def test_ties_broken_by_lower_id(self, make_line, counter):
        """Test that equidistant points resolve to the lower id."""
        ds = make_line([2.0, 0.0, 4.0, 2.0])
        idx = build_index(ds, [1], DistanceCounter())
        report = knn_query(idx, ds, [3.0], 1, counter)
        assert report.result_ids.tolist() == [0]

    def test_consistent_with_range_query(self, make_cube):
        """Test that the kth distance is the smallest radius returning k_nn points."""
        ds = make_cube(d=5, n=300, seed=4)
        idx = build_index(ds, [0, 1, 2, 3], DistanceCounter())
        q = np.full(5, 0.25)
        report = knn_query(idx, ds, q, 10, DistanceCounter())
        at = range_query(idx, ds, RangeQuery(q, report.kth_distance), DistanceCounter())
        below = range_query(idx, ds, RangeQuery(q, np.nextafter(report.kth_distance, 0)), DistanceCounter())
        assert at.result_size >= 10
        assert below.result_size < 10

    @pytest.mark.parametrize('k_nn', [0, 81])
    def test_out_of_range(self, make_cube, counter, k_nn):
        """Test that k_nn outside [1, n] is rejected."""
        ds = make_cube(n=80)
        idx = build_index(ds, [0], DistanceCounter())
        with pytest.raises(ValidationError):
            knn_query(idx, ds, np.zeros(8), k_nn, counter)

    def test_proportion_query(self, make_cube, counter):
        """Test that a fraction of 5% returns ceil(0.05 n) points."""
        ds = make_cube(n=210)
        idx = build_index(ds, [0, 1], DistanceCounter())
        report = proportion_query(idx, ds, np.full(8, 0.5), 0.05, counter)
        assert report.result_size == math.ceil(0.05 * 210)


# ============================================================================
# Persistence Tests
# ============================================================================

@pytest.mark.unit
class TestPersistence:
    """Test cases for index and pivot files."""

    def test_index_round_trip(self, make_cube, tmp_path):
        """Test that a saved index loads back bit for bit."""
        ds = make_cube(d=5, n=40)
        idx = build_index(ds, [4, 2, 9], DistanceCounter())
        path = tmp_path / 'cube.idx'
        save_index(idx, path)
        assert path.read_text().splitlines()[:2] == ['3 40', '4 2 9']
        loaded = load_index(path)
        assert loaded.pivot_ids.tolist() == [4, 2, 9]
        assert np.array_equal(loaded.table, idx.table)

    def test_index_with_duplicate_pivots_rejected(self, tmp_path):
        """Test that a file with duplicate pivot ids is rejected."""
        path = tmp_path / 'bad.idx'
        path.write_text('2 2\n0 0\n0 0\n1 1\n')
        with pytest.raises(PivotError):
            load_index(path)

    def test_index_with_short_row_rejected(self, tmp_path):
        """Test that a short table row names its line."""
        path = tmp_path / 'bad.idx'
        path.write_text('2 2\n0 1\n0 1\n1\n')
        with pytest.raises(DatasetFormatError) as exc:
            load_index(path)
        assert exc.value.line == 4

    def test_index_with_non_ascii_byte_rejected(self, tmp_path):
        """Test that a non-ASCII byte in the table names its line."""
        path = tmp_path / 'bad.idx'
        path.write_bytes(b'1 2\n0\n0\n\xff\n')
        with pytest.raises(DatasetFormatError) as exc:
            load_index(path)
        assert exc.value.line == 4

    def test_pivots_file(self, tmp_path):
        """Test that pivot ids are one ASCII line."""
        path = tmp_path / 'pivots.txt'
        save_pivots([5, 1, 3], path)
        assert path.read_text() == '5 1 3\n'
        assert load_pivots(path) == [5, 1, 3]


# ============================================================================
# Pair Sampling Tests
# ============================================================================

@pytest.mark.unit
class TestPairSampling:
    """Test cases for random_pairs and smart_pairs."""

    def test_random_pairs_are_valid(self, make_cube):
        """Test that pairs join two distinct valid ids."""
        ds = make_cube(n=40_000, d=2)
        pairs = random_pairs(ds, 5000, 3)
        assert len(pairs) == 5000
        assert np.all(pairs.left != pairs.right)
        assert pairs.left.max() < ds.n and pairs.right.max() < ds.n

    def test_two_points_force_the_pair(self, make_line):
        """Test that n = 2 only yields (0, 1) and (1, 0)."""
        pairs = random_pairs(make_line([0.0, 1.0]), 100, 0)
        assert set(pairs.pairs) <= {(0, 1), (1, 0)}

    def test_random_pairs_deterministic(self, make_cube):
        """Test the seeding contract."""
        ds = make_cube(n=100)
        assert random_pairs(ds, 50, 9).pairs == random_pairs(ds, 50, 9).pairs

    def test_single_point_rejected(self, make_line):
        """Test that n < 2 is rejected."""
        with pytest.raises(ValidationError):
            random_pairs(make_line([0.0]), 5, 0)

    def test_nearest_neighbour_on_line(self, make_line, counter):
        """Test that on {0, 1, 3} point 3 pairs with 1."""
        ds = make_line([0.0, 1.0, 3.0])
        assert jth_neighbour(ds, 2, 1, counter) == 1
        assert counter.count == 2

    def test_smart_pair_rank(self, make_cube, counter):
        """Test that exactly j - 1 points are strictly closer than the partner."""
        ds = make_cube(d=3, n=300)
        pairs = smart_pairs(ds, 50, 5, 1, counter)
        for x, y in pairs.pairs:
            dists = distances_to(ds.metric, ds.points[x], ds.points, DistanceCounter())
            dists[x] = np.inf
            closer = np.flatnonzero((dists < dists[y]) | ((dists == dists[y]) & (np.arange(ds.n) < y)))
            assert len(closer) == 4

    def test_smart_rank_too_large(self, make_line, counter):
        """Test that j >= n is rejected."""
        with pytest.raises(ValidationError):
            smart_pairs(make_line(), 5, 3, 0, counter)

    def test_explicit_pairs_validated(self):
        """Test that a self pair is rejected."""
        with pytest.raises(ValidationError):
            PairSample.from_pairs([(1, 1)], 3)


# ============================================================================
# Pivot Selection Tests
# ============================================================================

@pytest.mark.unit
class TestSelection:
    """Test cases for random and incremental selection."""

    def test_random_selection_permutation(self, make_cube):
        """Test that k = n yields a permutation."""
        assert sorted(select_random(make_cube(n=30), 30, 0)) == list(range(30))

    def test_random_selection_distinct(self, make_cube):
        """Test distinctness over many draws."""
        ds = make_cube(n=100)
        for seed in range(1000):
            assert len(set(select_random(ds, 10, seed))) == 10

    def test_random_selection_too_many(self, make_cube):
        """Test that k > n is rejected."""
        with pytest.raises(PivotError):
            select_random(make_cube(n=5), 6, 0)

    def test_hand_evaluated_candidate_means(self, make_line, counter):
        """Test candidate means 9.5, 8.5, 9.5 on {0, 1, 10}."""
        ds = make_line()
        pairs = PairSample.from_pairs([(0, 2), (1, 2)], ds.n)
        scores = score_candidates(ds, pairs, np.zeros(2), [0, 1, 2], counter)
        assert {c: s[0] for c, s in scores.items()} == {0: 9.5, 1: 8.5, 2: 9.5}
        assert counter.count == 3 * 2 * 2

    def test_tie_goes_to_lowest_id(self, make_line, counter):
        """Test that pivot 0 wins the 9.5 tie against 10."""
        ds = make_line([0.0, 1.0, 10.0, 20.0])
        pairs = PairSample.from_pairs([(0, 2), (1, 2)], ds.n)
        scores = score_candidates(ds, pairs, np.zeros(2), [2, 0, 1], counter)
        assert best_candidate(scores) == 0

    def test_single_candidate_is_random_selection(self, make_cube, counter):
        """Test that N = 1 still yields k distinct pivots."""
        ds = make_cube(n=200)
        pivots = select_incremental(ds, SelectionConfig(k=5, pairs=100, candidates=1, seed=2), counter)
        assert len(set(pivots)) == 5

    def test_objective_non_decreasing(self, make_cube, counter):
        """Test that the mean lower bound never drops as pivots are added."""
        ds = make_cube(d=6, n=500)
        trace = []
        select_incremental(ds, SelectionConfig(k=8, pairs=500, candidates=10, seed=1), counter, trace=trace)
        objectives = [objective for _, objective, _ in trace]
        assert objectives == sorted(objectives)

    def test_charging_bound(self, make_cube):
        """Test that selection charges at most 2 A N k + A."""
        ds = make_cube(n=400)
        cfg = SelectionConfig(k=4, pairs=200, candidates=10, seed=3)
        counter = DistanceCounter()
        select_incremental(ds, cfg, counter)
        assert counter.count <= 2 * 200 * 10 * 4 + 200

    def test_charging_exact_without_repeats(self, make_cube):
        """Test the exact charge when every step draws one candidate."""
        ds = make_cube(n=400)
        counter = DistanceCounter()
        select_incremental(ds, SelectionConfig(k=3, pairs=100, candidates=1, seed=0), counter)
        assert counter.count == 2 * 100 * 1 * 3 + 100

    def test_k_not_below_n_rejected(self, make_line, counter):
        """Test that k >= n is rejected."""
        with pytest.raises(PivotError):
            select_incremental(make_line(), SelectionConfig(k=3, pairs=5, candidates=2), counter)

    def test_zero_candidates_rejected(self):
        """Test that N = 0 is rejected."""
        with pytest.raises(ValidationError):
            SelectionConfig(k=2, candidates=0)

    def test_deterministic_across_threads(self, make_cube, monkeypatch):
        """Test that the chosen pivots do not depend on the worker count."""
        ds = make_cube(n=300)
        cfg = SelectionConfig(k=4, pairs=300, candidates=8, seed=5)
        monkeypatch.setenv('PIVOTBENCH_THREADS', '1')
        one = select_incremental(ds, cfg, DistanceCounter())
        monkeypatch.setenv('PIVOTBENCH_THREADS', '4')
        assert select_incremental(ds, cfg, DistanceCounter()) == one

    def test_smart_pair_mode(self, make_cube, counter):
        """Test incremental selection over 20-NN pairs."""
        ds = make_cube(d=3, n=200)
        cfg = SelectionConfig(k=3, pairs=50, candidates=5, pair_mode=PAIRS_SMART, neighbour_rank=20)
        assert len(select_incremental(ds, cfg, counter)) == 3
        assert cfg.label == 'incremental-smart20'

    def test_pair_objective_prefixes(self, make_cube, counter):
        """Test that prefix means grow and stay below the true mean."""
        ds = make_cube(d=4, n=300)
        pairs = random_pairs(ds, 400, 0)
        means, true_mean = pair_objective(ds, pairs, [0, 1, 2, 3], counter)
        assert means == sorted(means)
        assert means[-1] <= true_mean + 1e-12
        assert counter.count == 400 + 2 * 400 * 4


@pytest.mark.slow
class TestSelectionQuality:
    """Incremental selection against random selection on the 8-d cube."""

    def test_incremental_not_worse_than_random(self, settings):
        """Test average query cost per k across seeds."""
        from apps.experiments.harness import DatasetSpec, ExperimentConfig, run_sweep

        spec = DatasetSpec(generator='cube', d=8, n=10_000)
        totals = {'random': np.zeros(4), 'incremental': np.zeros(4)}
        for seed in range(5):
            for strategy in totals:
                cfg = ExperimentConfig(
                    dataset=spec, k_sweep=(4, 8, 16, 32), strategy=strategy,
                    selection=SelectionConfig(k=32, pairs=5000, candidates=40),
                    query_count=1000, target_fraction=0.001, seed=seed,
                )
                totals[strategy] += [row.avg_cost for row in run_sweep(cfg)]
        assert np.all(totals['incremental'] <= totals['random'] * 1.02)

    def test_smart_pairs_close_to_random_pairs(self):
        """Test that 20-NN pairs land within 10% of random pairs for ~40-point queries."""
        from apps.experiments.harness import DatasetSpec, ExperimentConfig, run_sweep

        spec = DatasetSpec(generator='cube', d=8, n=10_000)
        costs = {'random': np.zeros(4), 'smart': np.zeros(4)}
        for seed in range(3):
            for mode in costs:
                cfg = ExperimentConfig(
                    dataset=spec, k_sweep=(4, 8, 16, 32), strategy='incremental',
                    selection=SelectionConfig(k=32, pairs=5000, candidates=40, pair_mode=mode, neighbour_rank=20),
                    query_count=1000, target_fraction=0.004, seed=seed,
                )
                costs[mode] += [row.avg_cost for row in run_sweep(cfg)]
        assert np.all(np.abs(costs['smart'] - costs['random']) <= 0.1 * costs['random'])
