"""
pivotbench Common - Test Cases

Tests for seeded streams, the worker pool and CSV helpers.
"""

from importlib import import_module
from io import StringIO

import numpy as np
import pytest

from common.exceptions import DatasetFormatError, ValidationError
from common.utils import (
    SEED_MAX,
    STREAM_PAIRS,
    STREAM_QUERIES,
    check_seed,
    format_real,
    lower_median,
    make_rng,
    parallel_map,
    worker_count,
    write_csv,
)


@pytest.mark.unit
class TestRandomStreams:
    """Test cases for make_rng and check_seed."""

    def test_same_stream_same_draws(self):
        """Test that (seed, stream) fixes the sequence."""
        assert np.array_equal(make_rng(5, STREAM_PAIRS).random(10), make_rng(5, STREAM_PAIRS).random(10))

    def test_streams_are_independent(self):
        """Test that different streams and query numbers differ."""
        assert not np.array_equal(make_rng(5, STREAM_PAIRS).random(10), make_rng(5, STREAM_QUERIES).random(10))
        assert not np.array_equal(make_rng(5, STREAM_QUERIES, 0).random(10), make_rng(5, STREAM_QUERIES, 1).random(10))

    def test_full_seed_range(self):
        """Test that 0 and 2^64 - 1 are accepted."""
        assert check_seed(0) == 0
        assert check_seed(SEED_MAX) == SEED_MAX

    @pytest.mark.parametrize('seed', [-1, SEED_MAX + 1])
    def test_out_of_range_seed(self, seed):
        """Test that seeds outside 64 bits are rejected."""
        with pytest.raises(ValidationError):
            check_seed(seed)


@pytest.mark.unit
class TestWorkers:
    """Test cases for worker_count and parallel_map."""

    def test_environment_wins(self, monkeypatch):
        """Test that PIVOTBENCH_THREADS overrides settings."""
        monkeypatch.setenv('PIVOTBENCH_THREADS', '3')
        assert worker_count() == 3

    def test_bad_environment_value(self, monkeypatch):
        """Test that a non-integer thread count is rejected."""
        monkeypatch.setenv('PIVOTBENCH_THREADS', 'many')
        with pytest.raises(ValidationError):
            worker_count()

    def test_parallel_map_keeps_order(self, four_threads):
        """Test that results follow input order."""
        assert parallel_map(lambda x: x * x, range(50)) == [x * x for x in range(50)]


@pytest.mark.unit
class TestHelpers:
    """Test cases for medians and CSV output."""

    def test_lower_median(self):
        """Test odd and even lengths."""
        assert lower_median([3, 1, 2]) == 2.0
        assert lower_median([4, 1, 3, 2]) == 2.0

    def test_lower_median_empty(self):
        """Test that an empty sample is rejected."""
        with pytest.raises(ValidationError):
            lower_median([])

    def test_format_real(self):
        """Test that reals keep 17 significant digits and ints stay ints."""
        assert format_real(0.1) == '0.10000000000000001'
        assert format_real(np.int64(7)) == '7'
        assert format_real('random') == 'random'

    def test_write_csv(self):
        """Test header and rows."""
        out = StringIO()
        write_csv(out, ['k', 'avg_cost'], [[4, 0.5], [8, 0.25]])
        assert out.getvalue() == 'k,avg_cost\n4,0.5\n8,0.25\n'

    def test_format_error_message(self):
        """Test that format errors name the file and line."""
        error = DatasetFormatError('bad token', 'data.txt', 7)
        assert 'data.txt' in str(error)
        assert 'line 7' in str(error)


@pytest.mark.unit
@pytest.mark.parametrize('module', ['config.settings.local', 'config.settings.production'])
def test_settings_carry_no_http_hosts(module):
    """Test that no settings module configures a web surface."""
    assert 'ALLOWED_HOSTS' not in vars(import_module(module))
