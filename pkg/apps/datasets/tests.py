"""
pivotbench Datasets App - Test Cases

Tests for generators, ASCII dataset files and projections.
"""

import math

import numpy as np
import pytest

from apps.datasets.generators import (
    Dataset,
    cube_side_for_fraction,
    gen_hamming,
    gen_uniform_cube,
    gen_uniform_sphere,
    generate,
)
from apps.datasets.io import load_ascii, save_ascii
from apps.datasets.projection import project2d, projected_spread
from apps.metrics.distances import MetricKind, paired_distances
from apps.pivots.selection import random_pairs
from common.exceptions import DatasetFormatError, MetricDomainError, ValidationError


# ============================================================================
# Generator Tests
# ============================================================================

@pytest.mark.unit
class TestGenerators:
    """Test cases for the seeded generators."""

    def test_cube_shape_and_range(self):
        """Test that cube points lie in [0, 1)^d."""
        ds = gen_uniform_cube(5, 1000, 1)
        assert (ds.n, ds.dim) == (1000, 5)
        assert ds.points.min() >= 0.0
        assert ds.points.max() < 1.0
        assert ds.metric == MetricKind.EUCLIDEAN

    def test_same_seed_same_points(self):
        """Test the seeding contract."""
        assert np.array_equal(gen_uniform_cube(8, 100, 7).points, gen_uniform_cube(8, 100, 7).points)
        assert not np.array_equal(gen_uniform_cube(8, 100, 7).points, gen_uniform_cube(8, 100, 8).points)

    def test_sphere_points_are_unit(self):
        """Test that sphere points have unit norm."""
        ds = gen_uniform_sphere(10, 500, 3)
        assert np.allclose(np.linalg.norm(ds.points, axis=1), 1.0, atol=1e-12)

    def test_sphere_needs_two_dimensions(self):
        """Test that S^0 is rejected."""
        with pytest.raises(ValidationError):
            gen_uniform_sphere(1, 10, 0)

    def test_hamming_is_binary(self):
        """Test Hamming points and default metric."""
        ds = gen_hamming(16, 200, 0)
        assert set(np.unique(ds.points)) <= {0.0, 1.0}
        assert ds.metric == MetricKind.HAMMING_NORMALIZED

    def test_hamming_mean_distance_is_half(self, counter):
        """Test that the mean normalized Hamming distance is about 1/2."""
        ds = gen_hamming(64, 5000, 2)
        pairs = random_pairs(ds, 100_000, 2)
        dists = paired_distances(ds.metric, ds.points[pairs.left], ds.points[pairs.right], counter)
        assert abs(dists.mean() - 0.5) < 0.01

    def test_hamming_d2_has_four_points(self):
        """Test that {0,1}^2 only holds four distinct strings."""
        ds = gen_hamming(2, 1000, 0)
        assert len({tuple(p) for p in ds.points.tolist()}) == 4

    @pytest.mark.parametrize('d,n', [(0, 10), (3, 0), (-1, 5)])
    def test_zero_sizes_rejected(self, d, n):
        """Test that zero or negative d or n are rejected."""
        with pytest.raises(ValidationError):
            gen_uniform_cube(d, n, 0)

    def test_unknown_generator(self):
        """Test that an unknown generator is rejected."""
        with pytest.raises(ValidationError):
            generate('torus', 3, 10, 0)

    def test_generated_dataset_knows_its_source(self):
        """Test that fresh points can be drawn from the source."""
        ds = gen_uniform_sphere(4, 10, 0)
        fresh = ds.source.sample(5, np.random.default_rng(0))
        assert fresh.shape == (5, 4)

    def test_points_are_read_only(self):
        """Test that datasets are immutable."""
        ds = gen_uniform_cube(2, 3, 0)
        with pytest.raises(ValueError):
            ds.points[0, 0] = 5.0

    def test_hamming_dataset_rejects_non_binary(self):
        """Test the domain check at construction."""
        with pytest.raises(MetricDomainError):
            Dataset(np.array([[0.0, 0.5]]), metric=MetricKind.HAMMING_RAW)

    def test_cube_side_for_fraction(self):
        """Test the small-neighbourhood illustration of the curse."""
        assert cube_side_for_fraction(0.01, 2) == pytest.approx(0.1)
        assert cube_side_for_fraction(0.01, 20) == pytest.approx(0.794, abs=1e-3)


# ============================================================================
# ASCII File Tests
# ============================================================================

@pytest.mark.unit
class TestAsciiFiles:
    """Test cases for load_ascii and save_ascii."""

    def test_save_then_load_is_exact(self, tmp_path):
        """Test that 17 significant digits reproduce every double."""
        ds = gen_uniform_sphere(6, 50, 11)
        path = tmp_path / 'sphere.txt'
        save_ascii(ds, path)
        loaded = load_ascii(path)
        assert np.array_equal(loaded.points, ds.points)

    def test_comment_lines_before_header(self, tmp_path):
        """Test that leading comment lines are skipped."""
        path = tmp_path / 'small.txt'
        path.write_text('# made by hand\n# two points\n2 3\n0 0 0\n1 2 3\n')
        ds = load_ascii(path)
        assert ds.points.tolist() == [[0, 0, 0], [1, 2, 3]]
        assert ds.label == 'small'

    def test_short_row_names_line(self, tmp_path):
        """Test that a short row reports its line number."""
        path = tmp_path / 'bad.txt'
        path.write_text('2 3\n0 0 0\n1 2\n')
        with pytest.raises(DatasetFormatError) as exc:
            load_ascii(path)
        assert exc.value.line == 3
        assert 'line 3' in str(exc.value)
        assert str(path) in str(exc.value)

    def test_non_numeric_token(self, tmp_path):
        """Test that a non-numeric token is rejected."""
        path = tmp_path / 'bad.txt'
        path.write_text('1 2\n0 abc\n')
        with pytest.raises(DatasetFormatError):
            load_ascii(path)

    def test_non_ascii_byte_names_line(self, tmp_path):
        """Test that a non-ASCII byte is a format error on its own line."""
        path = tmp_path / 'bad.txt'
        path.write_bytes('2 1\n0\n1½\n'.encode('utf-8'))
        with pytest.raises(DatasetFormatError) as exc:
            load_ascii(path)
        assert exc.value.line == 3
        assert str(path) in str(exc.value)

    def test_missing_rows(self, tmp_path):
        """Test that a truncated file is rejected."""
        path = tmp_path / 'bad.txt'
        path.write_text('3 1\n0\n1\n')
        with pytest.raises(DatasetFormatError):
            load_ascii(path)

    def test_bad_header(self, tmp_path):
        """Test that a malformed header is rejected."""
        path = tmp_path / 'bad.txt'
        path.write_text('three 1\n0\n')
        with pytest.raises(DatasetFormatError) as exc:
            load_ascii(path)
        assert exc.value.line == 1

    def test_trailing_content(self, tmp_path):
        """Test that rows beyond n are rejected."""
        path = tmp_path / 'bad.txt'
        path.write_text('1 1\n0\n5\n')
        with pytest.raises(DatasetFormatError):
            load_ascii(path)

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_ascii(tmp_path / 'nope.txt')


# ============================================================================
# Projection Tests
# ============================================================================

@pytest.mark.unit
class TestProjection:
    """Test cases for project2d."""

    def test_sphere_projection_inside_disc(self):
        """Test that projected sphere points stay inside the unit disc."""
        proj = project2d(gen_uniform_sphere(3, 2000, 0), 0, 1)
        assert proj.shape == (2000, 2)
        assert np.max(np.hypot(proj[:, 0], proj[:, 1])) <= 1.0 + 1e-12

    def test_projection_keeps_order(self):
        """Test that projections follow dataset order."""
        ds = Dataset(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
        assert project2d(ds, 2, 0).tolist() == [[3.0, 1.0], [6.0, 4.0]]

    def test_axis_out_of_range(self):
        """Test that a bad axis is rejected."""
        with pytest.raises(ValidationError):
            project2d(gen_uniform_cube(3, 5, 0), 0, 3)

    def test_spread_shrinks_with_dimension(self):
        """Test the shrinking core of projected high-dimensional spheres."""
        low = projected_spread(project2d(gen_uniform_sphere(3, 5000, 0), 0, 1))
        high = projected_spread(project2d(gen_uniform_sphere(300, 5000, 0), 0, 1))
        assert high[0] < low[0] / 5
        assert high[0] == pytest.approx(1 / math.sqrt(300), rel=0.1)
