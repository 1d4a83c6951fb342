"""
pivotbench Orchard App - Test Cases
"""

import numpy as np
import pytest

from apps.datasets.generators import generate
from apps.metrics.distances import DistanceCounter
from apps.orchard.index import build_orchard, orchard_nn
from apps.pivots.index import linear_knn
from common.exceptions import CapacityError, ValidationError


# ============================================================================
# Build Tests
# ============================================================================

@pytest.mark.unit
class TestBuildOrchard:
    """Test cases for build_orchard."""

    def test_rows_sorted_with_ties_by_id(self, make_line, counter):
        """Test row order on a small line with a tie."""
        idx = build_orchard(make_line([0.0, 1.0, 2.0, 3.0]), counter)
        assert idx.row(1) == [(0, 1.0), (2, 1.0), (3, 2.0)]
        assert idx.row(3) == [(2, 1.0), (1, 2.0), (0, 3.0)]

    def test_build_charges_each_pair_once(self, make_cube, counter):
        """Test that the build costs n (n - 1) / 2."""
        idx = build_orchard(make_cube(n=60), counter)
        assert counter.count == 60 * 59 // 2
        assert idx.build_cost == counter.count

    def test_capacity_error(self, make_cube, counter):
        """Test that builds above the cap are refused."""
        with pytest.raises(CapacityError):
            build_orchard(make_cube(n=20), counter, max_points=10)
        assert counter.count == 0

    def test_capacity_override(self, make_cube, counter):
        """Test that allow_large lifts the cap."""
        idx = build_orchard(make_cube(n=20), counter, max_points=10, allow_large=True)
        assert idx.n == 20

    def test_single_point_rejected(self, make_line, counter):
        """Test that n < 2 is rejected."""
        with pytest.raises(ValidationError):
            build_orchard(make_line([0.0]), counter)


# ============================================================================
# Search Tests
# ============================================================================

@pytest.mark.unit
class TestOrchardSearch:
    """Test cases for orchard_nn."""

    @pytest.mark.parametrize('start', [0, 1, 2])
    def test_collinear_points(self, make_line, start):
        """Test {0, 1, 3} with q = 2.4 from every start."""
        ds = make_line([0.0, 1.0, 3.0])
        idx = build_orchard(ds, DistanceCounter())
        counter = DistanceCounter()
        result = orchard_nn(idx, ds, [2.4], counter, start_id=start)
        assert result.nn_id == 2
        assert result.nn_dist == pytest.approx(0.6)
        assert result.cost == counter.count <= 3

    def test_walk_from_far_end_costs_three(self, make_line, counter):
        """Test that starting at 0 on {0, 1, 3} charges exactly 3."""
        ds = make_line([0.0, 1.0, 3.0])
        idx = build_orchard(ds, DistanceCounter())
        orchard_nn(idx, ds, [2.4], counter, start_id=0)
        assert counter.count == 3

    def test_query_at_dataset_point(self, make_cube, counter):
        """Test that a centre equal to a point finds it at distance 0."""
        ds = make_cube(d=4, n=200)
        idx = build_orchard(ds, DistanceCounter())
        result = orchard_nn(idx, ds, ds.points[57], counter, start_id=3)
        assert (result.nn_id, result.nn_dist) == (57, 0.0)

    def test_tie_goes_to_lower_id(self, make_line, counter):
        """Test that equidistant neighbours resolve to the lower id."""
        ds = make_line([0.0, 2.0, 4.0])
        idx = build_orchard(ds, DistanceCounter())
        assert orchard_nn(idx, ds, [3.0], counter, start_id=2).nn_id == 1

    def test_entry_at_twice_the_distance_is_walked(self, make_line, counter):
        """Test that a row entry at exactly 2 rho(y, q) is still evaluated."""
        ds = make_line([0.0, 2.0])
        idx = build_orchard(ds, DistanceCounter())
        result = orchard_nn(idx, ds, [1.0], counter, start_id=1)
        assert (result.nn_id, result.cost) == (0, 2)

    def test_matches_brute_force(self, make_cube):
        """Test 200 random queries against a linear scan."""
        ds = make_cube(d=6, n=400, seed=2)
        idx = build_orchard(ds, DistanceCounter())
        rng = np.random.default_rng(1)
        for i in range(200):
            q = ds.source.sample(1, rng)[0]
            counter = DistanceCounter()
            result = orchard_nn(idx, ds, q, counter, seed=i)
            ids, dists = linear_knn(ds, q, 1, DistanceCounter())
            assert result.nn_id == int(ids[0])
            assert result.nn_dist == dists[0]
            assert result.cost <= ds.n

    def test_start_out_of_range(self, make_line, counter):
        """Test that a bad start id is rejected."""
        ds = make_line()
        idx = build_orchard(ds, DistanceCounter())
        with pytest.raises(ValidationError):
            orchard_nn(idx, ds, [0.0], counter, start_id=3)

    def test_seeded_start_is_deterministic(self, make_cube):
        """Test that the default start follows the seed."""
        ds = make_cube(n=100)
        idx = build_orchard(ds, DistanceCounter())
        q = np.full(8, 0.5)
        first = orchard_nn(idx, ds, q, DistanceCounter(), seed=4)
        second = orchard_nn(idx, ds, q, DistanceCounter(), seed=4)
        assert first == second


@pytest.mark.slow
@pytest.mark.parametrize('d', [2, 8, 20])
def test_exact_on_two_thousand_points(d):
    """Test 1000 random queries per dimension against a linear scan."""
    ds = generate('cube', d, 2000, d)
    idx = build_orchard(ds, DistanceCounter())
    rng = np.random.default_rng(d)
    mismatches = 0
    for i, q in enumerate(ds.source.sample(1000, rng)):
        result = orchard_nn(idx, ds, q, DistanceCounter(), seed=i)
        ids, _ = linear_knn(ds, q, 1, DistanceCounter())
        mismatches += result.nn_id != int(ids[0])
        assert result.cost <= ds.n
    assert mismatches == 0
