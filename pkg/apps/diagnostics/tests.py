"""
pivotbench Diagnostics App - Test Cases

Tests for intrinsic dimension, histograms, concentration and the bound
calculators.
"""

import math

import numpy as np
import pytest

from apps.datasets.generators import generate
from apps.diagnostics.bounds import (
    BoundInputs,
    SpaceKind,
    hoeffding_bound,
    sample_size_bound,
    vc_bound,
)
from apps.diagnostics.concentration import (
    levy_bound,
    lipschitz_deviation,
    sphere_concentration,
    sphere_gaussian_bound,
)
from apps.diagnostics.dimension import (
    ANCHOR_ORIGIN,
    chavez_dimension,
    distance_histogram,
    median_nn_distance,
)
from apps.diagnostics.discards import discard_statistics
from apps.metrics.distances import DistanceCounter, MetricKind
from apps.pivots.index import RangeQuery, build_index
from apps.pivots.selection import select_random
from common.exceptions import ValidationError


# ============================================================================
# Chavez Dimension Tests
# ============================================================================

@pytest.mark.unit
class TestChavezDimension:
    """Test cases for chavez_dimension."""

    def test_equal_distances_give_infinity(self, make_line, counter):
        """Test that zero variance yields an infinite estimate."""
        estimate = chavez_dimension(make_line([0.0, 1.0]), 100, 0, counter)
        assert estimate.variance == 0.0
        assert estimate.is_infinite

    def test_charges_one_per_pair(self, make_cube, counter):
        """Test that the estimate charges exactly the pair count."""
        chavez_dimension(make_cube(n=100), 500, 0, counter)
        assert counter.count == 500

    def test_scale_invariant(self, make_cube):
        """Test that scaling every coordinate leaves the estimate unchanged."""
        ds = make_cube(d=10, n=1000)
        plain = chavez_dimension(ds, 5000, 3, DistanceCounter())
        doubled = chavez_dimension(ds.scaled(2.0), 5000, 3, DistanceCounter())
        assert doubled.dtilde == pytest.approx(plain.dtilde, rel=1e-12)
        assert doubled.mean == pytest.approx(2 * plain.mean, rel=1e-12)

    def test_grows_with_dimension(self):
        """Test that the estimate increases with the cube dimension."""
        values = [
            chavez_dimension(generate('cube', d, 2000, 0), 20_000, 0, DistanceCounter()).dtilde
            for d in (2, 8, 32)
        ]
        assert values == sorted(values)

    def test_too_few_pairs(self, make_cube, counter):
        """Test that fewer than 2 pairs are rejected."""
        with pytest.raises(ValidationError):
            chavez_dimension(make_cube(), 1, 0, counter)


@pytest.mark.slow
class TestChavezTable:
    """Empirical Chavez dimension of cubes and spheres."""

    @pytest.mark.parametrize('generator,d,metric,expected', [
        ('cube', 20, MetricKind.EUCLIDEAN, 27.6),
        ('sphere', 20, MetricKind.GEODESIC, 20.8),
        ('sphere', 100, MetricKind.GEODESIC, 139.5),
    ])
    def test_reference_values(self, generator, d, metric, expected):
        """Test that most seeds land within 15% of the reference value."""
        passed = 0
        for seed in range(3):
            ds = generate(generator, d, 10_000, seed, metric=metric)
            estimate = chavez_dimension(ds, 100_000, seed, DistanceCounter())
            passed += abs(estimate.dtilde - expected) <= 0.15 * expected
        assert passed >= 2


# ============================================================================
# Distance Histogram Tests
# ============================================================================

@pytest.mark.unit
class TestDistanceHistogram:
    """Test cases for distance_histogram."""

    def test_counts_sum_to_samples(self, make_cube, counter):
        """Test that every sampled distance lands in a bin."""
        hist = distance_histogram(make_cube(n=300), 2000, 25, False, 0, counter)
        assert hist.counts.sum() == 2000
        assert len(hist.edges) == 26
        assert counter.count == 2000

    def test_degenerate_single_bin(self, make_line, counter):
        """Test that equal distances fall into one bin."""
        hist = distance_histogram(make_line([0.0, 1.0]), 50, 5, False, 0, counter)
        assert hist.counts.max() == 50
        assert hist.std == 0.0

    def test_bad_bins(self, make_cube, counter):
        """Test that zero bins are rejected."""
        with pytest.raises(ValidationError):
            distance_histogram(make_cube(), 10, 0, False, 0, counter)

    @pytest.mark.parametrize('d,expected', [(3, 0.14), (30, 0.044), (300, 0.014)])
    def test_normalized_std_shrinks(self, d, expected):
        """Test the hypercube std table of normalized distances."""
        ds = generate('cube', d, 10_000, 1)
        hist = distance_histogram(ds, 100_000, 50, True, 1, DistanceCounter())
        assert hist.std == pytest.approx(expected, rel=0.2)

    def test_normalized_pairwise_mean(self):
        """Test that pairwise distances over sqrt(d) approach 1/sqrt(6)."""
        ds = generate('cube', 300, 5000, 2)
        hist = distance_histogram(ds, 100_000, 50, True, 2, DistanceCounter())
        assert hist.mean == pytest.approx(1 / math.sqrt(6), rel=0.01)

    def test_normalized_corner_mean(self):
        """Test that distances to the origin corner over sqrt(d) approach 1/sqrt(3)."""
        ds = generate('cube', 300, 5000, 2)
        hist = distance_histogram(ds, 100_000, 50, True, 2, DistanceCounter(), anchor=ANCHOR_ORIGIN)
        assert hist.mean == pytest.approx(1 / math.sqrt(3), rel=0.01)


# ============================================================================
# Nearest Neighbour Distance Tests
# ============================================================================

@pytest.mark.unit
class TestMedianNearestNeighbour:
    """Test cases for median_nn_distance."""

    def test_leave_one_out_on_line(self, make_line, counter):
        """Test {0, 1, 3}: nearest distances 1, 1, 2 have median 1."""
        assert median_nn_distance(make_line([0.0, 1.0, 3.0]), 3, 0, counter) == 1.0
        assert counter.count == 6

    def test_fresh_centres_charge_n_each(self, make_cube, counter):
        """Test that generated datasets query fresh centres against all of X."""
        median_nn_distance(make_cube(n=100), 7, 0, counter)
        assert counter.count == 700

    def test_single_point_rejected(self, make_line, counter):
        """Test that n < 2 is rejected."""
        with pytest.raises(ValidationError):
            median_nn_distance(make_line([0.0]), 3, 0, counter)

    @pytest.mark.slow
    def test_hamming_stays_away_from_zero(self):
        """Test that the median NN distance on the 64-cube stays in [0.1, 0.5]."""
        ds = generate('hamming', 64, 10_000, 0)
        for seed in range(3):
            assert 0.1 <= median_nn_distance(ds, 500, seed, DistanceCounter()) <= 0.5


# ============================================================================
# Concentration Tests
# ============================================================================

@pytest.mark.unit
class TestSphereConcentration:
    """Test cases for sphere_concentration and the Levy bound."""

    @pytest.mark.parametrize('d', [2, 3, 10, 50, 100])
    def test_half_at_zero(self, d):
        """Test alpha_d(0) = 1/2 exactly."""
        assert sphere_concentration(d, 0.0) == 0.5

    def test_circle_closed_form(self):
        """Test alpha_2(pi/4) = 1/4."""
        assert sphere_concentration(2, math.pi / 4) == pytest.approx(0.25, abs=1e-9)

    def test_two_sphere_closed_form(self):
        """Test alpha_3(eps) = (1 - sin eps) / 2."""
        for eps in (0.1, 0.5, 1.0):
            assert sphere_concentration(3, eps) == pytest.approx((1 - math.sin(eps)) / 2, abs=1e-9)

    def test_zero_at_quarter_turn(self):
        """Test that nothing lies beyond pi/2 of a half-sphere."""
        assert sphere_concentration(10, math.pi / 2) == 0.0

    @pytest.mark.parametrize('d', [3, 10, 30, 100])
    @pytest.mark.parametrize('eps', [0.1, 0.3, 0.5])
    def test_below_gaussian_bound(self, d, eps):
        """Test alpha_d(eps) <= exp(-(d - 1) eps^2 / 2)."""
        assert sphere_concentration(d, eps) <= sphere_gaussian_bound(d, eps)

    def test_monotone_on_grid(self):
        """Test that alpha decreases in eps and in d."""
        eps_grid = np.linspace(0.05, 1.5, 20)
        dims = [2, 3, 5, 10, 20, 30, 50, 70, 100, 200]
        table = np.array([[sphere_concentration(d, eps) for eps in eps_grid] for d in dims])
        assert np.all(np.diff(table, axis=1) <= 1e-12)
        assert np.all(np.diff(table, axis=0) <= 1e-12)
        assert np.all((table >= 0) & (table <= 0.5))

    def test_large_dimension_does_not_underflow(self):
        """Test that very large d stays finite and positive for small eps."""
        value = sphere_concentration(10_000, 0.01)
        assert 0.0 < value < 0.5

    @pytest.mark.parametrize('d,eps', [(1, 0.1), (3, -0.1), (3, 2.0)])
    def test_out_of_domain(self, d, eps):
        """Test that bad d or eps are rejected."""
        with pytest.raises(ValidationError):
            sphere_concentration(d, eps)

    def test_levy_bound(self):
        """Test C = 1, c = 1/2, d = 99, eps = 0.3."""
        bound = levy_bound(1, 0.5, 99, 0.3)
        assert bound.raw == pytest.approx(0.01163, rel=1e-3)
        assert bound.reported == bound.raw

    def test_levy_bound_capped_at_half(self):
        """Test that values above 1/2 are reported as 1/2."""
        bound = levy_bound(2, 0.5, 1, 0.0)
        assert (bound.raw, bound.reported) == (2.0, 0.5)


@pytest.mark.unit
class TestLipschitzDeviation:
    """Test cases for lipschitz_deviation."""

    def test_constant_pivot_distances(self, make_line, counter):
        """Test a line where the other points are 1 from the pivot."""
        ds = make_line([1.0, 0.0, 2.0])
        report = lipschitz_deviation(ds, 0, 0.5, counter)
        assert report.median == 1.0
        assert report.deviation_fraction == pytest.approx(1 / 3)
        assert math.isnan(report.bound)
        assert counter.count == 3

    def test_explicit_alpha(self, make_cube, counter):
        """Test that a caller-supplied alpha is doubled."""
        assert lipschitz_deviation(make_cube(), 0, 0.1, counter, alpha=0.2).bound == 0.4

    def test_bad_pivot(self, make_cube, counter):
        """Test that an out-of-range pivot is rejected."""
        with pytest.raises(ValidationError):
            lipschitz_deviation(make_cube(n=10), 10, 0.1, counter)

    @pytest.mark.slow
    @pytest.mark.parametrize('d', [10, 30, 100])
    @pytest.mark.parametrize('eps', [0.2, 0.4])
    def test_sphere_deviation_below_bound(self, d, eps):
        """Test that the empirical deviation respects twice the concentration."""
        ds = generate('sphere', d, 100_000, d, metric=MetricKind.GEODESIC)
        report = lipschitz_deviation(ds, 0, eps, DistanceCounter())
        assert report.bound == pytest.approx(2 * sphere_concentration(d, eps))
        assert report.deviation_fraction <= report.bound + 0.01


# ============================================================================
# Bound Calculator Tests
# ============================================================================

@pytest.mark.unit
class TestBounds:
    """Test cases for the closed-form calculators."""

    def test_vc_bound_reference_value(self):
        """Test l2, d = 20, k = 50."""
        assert vc_bound(SpaceKind.L2, 20, 50) == pytest.approx(49053, abs=1)

    def test_vc_bound_spaces(self):
        """Test the linf and Hamming widths."""
        assert vc_bound('linf', 1, 1) == pytest.approx(20 * math.log(6))
        assert vc_bound('hamming', 2, 1) == pytest.approx(28 * math.log(6))

    def test_vc_bound_unknown_space(self):
        """Test that an unknown space is rejected."""
        with pytest.raises(ValueError):
            vc_bound('l1', 3, 3)

    def test_sample_size_reference_value(self):
        """Test delta = 1, eps = eta = 1/2."""
        assert sample_size_bound(BoundInputs(delta=1, eps=0.5, eta=0.5)) == pytest.approx(3153.6, abs=1)

    @pytest.mark.parametrize('delta,eps,eta', [(0, 0.5, 0.5), (1, 0.0, 0.5), (1, 0.5, 1.0)])
    def test_sample_size_inputs_validated(self, delta, eps, eta):
        """Test that out-of-range inputs are rejected."""
        with pytest.raises(ValidationError):
            BoundInputs(delta=delta, eps=eps, eta=eta)

    def test_hoeffding_reference_value(self):
        """Test n = 200, eps = 0.1."""
        assert hoeffding_bound(200, 0.1) == pytest.approx(0.03663, rel=1e-3)

    def test_hoeffding_reported_raw(self):
        """Test that n = 0 gives the raw value 2."""
        assert hoeffding_bound(0, 0.1) == 2.0


# ============================================================================
# Discard Statistics Tests
# ============================================================================

@pytest.mark.unit
class TestDiscardStatistics:
    """Test cases for discard_statistics."""

    def test_line_fractions(self, make_line, counter):
        """Test {0, 1, 10} with pivot 0 and two queries."""
        ds = make_line()
        idx = build_index(ds, [0], DistanceCounter())
        stats = discard_statistics(idx, ds, [RangeQuery([0.4], 0.5), RangeQuery([0.0], 20.0)], counter)
        assert stats.fractions.tolist() == pytest.approx([2 / 3, 0.0])
        assert stats.median == 0.0
        assert counter.count == 2 + 4

    @pytest.mark.slow
    def test_discards_fall_with_dimension(self):
        """Test that the median discard fraction drops as d grows."""
        from apps.experiments.harness import calibrate_radius

        medians = []
        for d in (2, 8, 32):
            ds = generate('cube', d, 5000, 0)
            idx = build_index(ds, select_random(ds, 16, 0), DistanceCounter())
            radius = calibrate_radius(ds, 0.01, 50, 0, DistanceCounter()).radius
            centers = ds.source.sample(200, np.random.default_rng(d))
            stats = discard_statistics(idx, ds, [RangeQuery(c, radius) for c in centers], DistanceCounter())
            medians.append(stats.median)
        assert medians[0] > medians[1] >= medians[2]
        assert medians[0] > medians[2]

    @pytest.mark.slow
    def test_incremental_pivots_degenerate_to_scan(self):
        """Test the median discard trend for 16 incremental pivots up to d = 256."""
        from apps.experiments.harness import DatasetSpec, ExperimentConfig, run_sweep
        from apps.pivots.selection import SelectionConfig

        rows = []
        for d in (4, 16, 64, 256):
            cfg = ExperimentConfig(
                dataset=DatasetSpec(generator='cube', d=d, n=20_000),
                k_sweep=(16,), strategy='incremental',
                selection=SelectionConfig(k=16, pairs=5000, candidates=40),
                query_count=200, probe_queries=200, target_fraction=0.001, seed=0,
            )
            rows.extend(run_sweep(cfg))
        medians = [row.median_discard_fraction for row in rows]
        assert medians == sorted(medians, reverse=True)
        assert medians[-1] < 0.05
        assert rows[-1].avg_cost / rows[-1].n > 0.9
