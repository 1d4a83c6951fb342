"""
pivotbench - Pytest Configuration and Fixtures

This module contains shared fixtures for all tests.
"""

import numpy as np
import pytest


@pytest.fixture
def counter():
    """Return a fresh distance counter."""
    from apps.metrics.distances import DistanceCounter
    return DistanceCounter()


@pytest.fixture
def make_line():
    """Factory fixture to create 1-D datasets from a list of coordinates."""
    from apps.datasets.generators import Dataset

    def _make_line(values=(0.0, 1.0, 10.0), metric='euclidean', label='line'):
        return Dataset(np.asarray(values, dtype=float).reshape(-1, 1), metric=metric, label=label)

    return _make_line


@pytest.fixture
def make_cube():
    """Factory fixture to create uniform cube datasets."""
    from apps.datasets.generators import gen_uniform_cube

    def _make_cube(d=8, n=500, seed=0):
        return gen_uniform_cube(d, n, seed)

    return _make_cube


@pytest.fixture
def make_dataset():
    """Factory fixture to create datasets from any generator."""
    from apps.datasets.generators import generate

    def _make_dataset(generator='cube', d=8, n=500, seed=0, metric=None):
        return generate(generator, d, n, seed, metric=metric)

    return _make_dataset


@pytest.fixture
def single_thread(monkeypatch):
    """Pin the worker pool to one thread."""
    monkeypatch.setenv('PIVOTBENCH_THREADS', '1')


@pytest.fixture
def four_threads(monkeypatch):
    """Run worker pools with four threads."""
    monkeypatch.setenv('PIVOTBENCH_THREADS', '4')
