"""
pivotbench Metrics App - Test Cases

Tests for the metric kinds, distance evaluation and counting.
"""

import math

import numpy as np
import pytest

from apps.metrics.distances import (
    DistanceCounter,
    MetricKind,
    as_point,
    check_domain,
    distance,
    distances_to,
    paired_distances,
    row_distance,
    triangle_check,
)
from common.exceptions import DimensionMismatch, MetricDomainError, ValidationError


def sample_points(kind, count, d, rng):
    """Random points inside the domain of a metric."""
    if MetricKind(kind).is_hamming:
        return rng.integers(0, 2, size=(count, d)).astype(float)
    if kind == MetricKind.GEODESIC:
        g = rng.standard_normal((count, d))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    return rng.random((count, d))


# ============================================================================
# Single Evaluation Tests
# ============================================================================

@pytest.mark.unit
class TestDistance:
    """Test cases for distance()."""

    def test_euclidean_three_four_five(self, counter):
        """Test the 3-4-5 triangle."""
        assert distance(MetricKind.EUCLIDEAN, [0, 0], [3, 4], counter) == 5.0

    def test_chebyshev(self, counter):
        """Test the largest coordinate difference."""
        assert distance(MetricKind.CHEBYSHEV, [0, 0, 0], [1, -3, 2], counter) == 3.0

    def test_hamming_normalized_and_raw(self, counter):
        """Test both Hamming normalizations."""
        x, y = [0, 1, 1, 0], [1, 1, 0, 0]
        assert distance(MetricKind.HAMMING_NORMALIZED, x, y, counter) == 0.5
        assert distance(MetricKind.HAMMING_RAW, x, y, counter) == 2.0

    def test_geodesic_orthogonal(self, counter):
        """Test that orthogonal unit vectors are pi/2 apart."""
        assert distance(MetricKind.GEODESIC, [1, 0, 0], [0, 1, 0], counter) == pytest.approx(math.pi / 2)

    def test_geodesic_antipodal(self, counter):
        """Test that antipodal points are pi apart."""
        assert distance(MetricKind.GEODESIC, [0, 1], [0, -1], counter) == pytest.approx(math.pi)

    def test_charges_exactly_one(self, counter):
        """Test that one call charges one evaluation."""
        distance(MetricKind.EUCLIDEAN, [0], [1], counter)
        assert counter.count == 1

    def test_dimension_mismatch(self, counter):
        """Test that points of different dimension are rejected."""
        with pytest.raises(DimensionMismatch):
            distance(MetricKind.EUCLIDEAN, [0, 0], [0, 0, 0], counter)

    def test_non_binary_hamming_rejected(self, counter):
        """Test the Hamming domain check."""
        with pytest.raises(MetricDomainError):
            distance(MetricKind.HAMMING_NORMALIZED, [0, 2], [0, 1], counter)

    def test_non_unit_geodesic_rejected(self, counter):
        """Test the sphere domain check."""
        with pytest.raises(MetricDomainError):
            distance(MetricKind.GEODESIC, [2, 0], [0, 1], counter)

    def test_non_finite_rejected(self, counter):
        """Test that NaN coordinates are rejected before charging."""
        with pytest.raises(MetricDomainError):
            distance(MetricKind.EUCLIDEAN, [math.nan], [0], counter)
        assert counter.count == 0

    def test_unknown_metric(self, counter):
        """Test that an unknown metric name is rejected."""
        with pytest.raises(ValueError):
            distance('manhattan', [0], [1], counter)

    def test_empty_point(self):
        """Test that an empty point is rejected."""
        with pytest.raises(ValidationError):
            as_point([])


# ============================================================================
# Metric Axiom Tests
# ============================================================================

@pytest.mark.parametrize('kind', list(MetricKind))
class TestMetricAxioms:
    """Symmetry, identity and the triangle inequality on random samples."""

    def test_symmetry_is_exact(self, kind, counter):
        """Test rho(x, y) == rho(y, x) bit for bit."""
        rng = np.random.default_rng(1)
        x = sample_points(kind, 10_000, 6, rng)
        y = sample_points(kind, 10_000, 6, rng)
        forward = paired_distances(kind, x, y, counter)
        backward = paired_distances(kind, y, x, counter)
        assert np.array_equal(forward, backward)

    def test_identity(self, kind, counter):
        """Test rho(x, x) == 0."""
        rng = np.random.default_rng(2)
        x = sample_points(kind, 1000, 6, rng)
        assert np.all(paired_distances(kind, x, x, counter) == 0.0)

    def test_triangle_inequality(self, kind, counter):
        """Test rho(x, y) <= rho(x, z) + rho(z, y) on random triples."""
        rng = np.random.default_rng(3)
        x, y, z = (sample_points(kind, 10_000, 5, rng) for _ in range(3))
        xy = paired_distances(kind, x, y, counter)
        xz = paired_distances(kind, x, z, counter)
        zy = paired_distances(kind, z, y, counter)
        assert np.all(xy <= xz + zy + 1e-9)

    def test_triangle_check_helper(self, kind):
        """Test the single-triple helper."""
        rng = np.random.default_rng(4)
        x, y, z = sample_points(kind, 3, 4, rng)
        assert triangle_check(kind, x, y, z)


# ============================================================================
# Batch and Counter Tests
# ============================================================================

@pytest.mark.unit
class TestBatchEvaluation:
    """Test cases for the batch helpers."""

    @pytest.mark.parametrize('kind', list(MetricKind))
    def test_batch_matches_single(self, kind):
        """Test that batch distances are bit-identical to single calls."""
        rng = np.random.default_rng(5)
        rows = sample_points(kind, 50, 7, rng)
        x = rows[0]
        batch = distances_to(kind, x, rows, DistanceCounter())
        single = [distance(kind, x, row, DistanceCounter()) for row in rows]
        assert batch.tolist() == single
        assert [row_distance(kind, x, row, DistanceCounter()) for row in rows] == single

    def test_distances_to_charges_rows(self, counter):
        """Test that a batch charges one evaluation per row."""
        distances_to(MetricKind.EUCLIDEAN, [0, 0], np.zeros((17, 2)), counter)
        assert counter.count == 17

    def test_counter_exactness(self, counter):
        """Test that m calls leave count == m."""
        for i in range(25):
            distance(MetricKind.CHEBYSHEV, [i], [0], counter)
        assert counter.count == 25

    def test_counter_merge(self):
        """Test merging counters by summation."""
        merged = DistanceCounter.merged([DistanceCounter(3), DistanceCounter(4)])
        assert merged.count == 7
        assert (DistanceCounter(1) + DistanceCounter(2)).count == 3

    def test_check_domain_accepts_binary(self):
        """Test that binary arrays pass the Hamming check."""
        check_domain(MetricKind.HAMMING_RAW, np.array([[0.0, 1.0], [1.0, 1.0]]))
