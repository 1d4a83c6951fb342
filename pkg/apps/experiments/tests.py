"""
pivotbench Experiments App - Test Cases

Tests for radius calibration, the sweep harness, recorded runs and the
pivotbench command line.
"""

from io import StringIO

import numpy as np
import pytest
from django.core.management import call_command

from apps.datasets.generators import Dataset
from apps.datasets.io import save_ascii
from apps.experiments.cli import cli_dispatch
from apps.experiments.harness import (
    CENTER_FRESH,
    CENTER_LEAVE_ONE_OUT,
    CSV_HEADER,
    DatasetSpec,
    ExperimentConfig,
    calibrate_radius,
    query_centers,
    run_sweep,
)
from apps.experiments.models import ExperimentResult, ExperimentRun
from apps.metrics.distances import DistanceCounter
from apps.pivots.selection import SelectionConfig
from common.exceptions import PivotError, ValidationError


def small_config(**overrides):
    params = dict(
        dataset=DatasetSpec(generator='cube', d=4, n=500),
        k_sweep=(2, 4, 8),
        query_count=40,
        probe_queries=10,
        target_fraction=0.05,
        seed=3,
    )
    params.update(overrides)
    return ExperimentConfig(**params)


# ============================================================================
# Radius Calibration Tests
# ============================================================================

@pytest.mark.unit
class TestCalibrateRadius:
    """Test cases for calibrate_radius."""

    def test_collinear_integers(self, make_line, counter):
        """Test the 10% quantile of all leave-one-out distances on 0..100."""
        ds = make_line(np.arange(101))
        calibration = calibrate_radius(ds, 0.1, 101, 0, counter)
        assert calibration.radius == 6.0
        assert calibration.center_mode == CENTER_LEAVE_ONE_OUT
        assert not calibration.degenerate
        assert counter.count == 101 * 100

    def test_probe_count_capped_by_n(self, make_line, counter):
        """Test that leave-one-out probes never exceed n."""
        assert calibrate_radius(make_line(), 0.5, 50, 0, counter).probes == 3

    def test_degenerate_distances_flagged(self, make_line, counter):
        """Test that identical probe distances are flagged."""
        calibration = calibrate_radius(make_line([0.0, 1.0]), 0.01, 2, 0, counter)
        assert calibration.degenerate
        assert calibration.radius == 1.0

    def test_fresh_centres_for_generated_data(self, make_cube, counter):
        """Test that generated datasets calibrate from fresh draws."""
        calibration = calibrate_radius(make_cube(n=200), 0.01, 5, 0, counter)
        assert calibration.center_mode == CENTER_FRESH
        assert counter.count == 5 * 200

    def test_radius_grows_with_fraction(self, make_cube):
        """Test that larger target fractions give larger radii."""
        ds = make_cube(n=500)
        radii = [calibrate_radius(ds, f, 20, 0, DistanceCounter()).radius for f in (0.001, 0.01, 0.1, 0.5)]
        assert radii == sorted(radii)

    @pytest.mark.parametrize('fraction', [0.0, 1.5])
    def test_bad_fraction(self, make_cube, counter, fraction):
        """Test that fractions outside (0, 1] are rejected."""
        with pytest.raises(ValidationError):
            calibrate_radius(make_cube(), fraction, 5, 0, counter)


# ============================================================================
# Sweep Tests
# ============================================================================

@pytest.mark.unit
class TestRunSweep:
    """Test cases for run_sweep and its configuration."""

    def test_one_row_per_k(self):
        """Test row shape and the random-selection build cost."""
        rows = run_sweep(small_config())
        assert [row.k for row in rows] == [2, 4, 8]
        assert len({row.radius for row in rows}) == 1
        for row in rows:
            assert row.selection_mode == 'random'
            assert row.build_cost == 500 * row.k
            assert row.k <= row.avg_cost <= row.k + 500
            assert 0.0 <= row.median_discard_fraction <= 1.0
            assert len(row.as_csv_row()) == len(CSV_HEADER)

    def test_identical_across_thread_counts(self, monkeypatch):
        """Test that rows do not depend on the worker count."""
        cfg = small_config(strategy='incremental', selection=SelectionConfig(k=8, pairs=200, candidates=5))
        monkeypatch.setenv('PIVOTBENCH_THREADS', '1')
        single = run_sweep(cfg)
        monkeypatch.setenv('PIVOTBENCH_THREADS', '4')
        assert run_sweep(cfg) == single

    def test_same_seed_same_rows(self):
        """Test the seeding contract of a sweep."""
        assert run_sweep(small_config()) == run_sweep(small_config())

    def test_incremental_build_cost_includes_selection(self):
        """Test that selection charges land in build_cost."""
        cfg = small_config(strategy='incremental', selection=SelectionConfig(k=8, pairs=100, candidates=3))
        rows = run_sweep(cfg)
        assert all(row.selection_mode == 'incremental' for row in rows)
        assert all(row.build_cost > 500 * row.k for row in rows)
        assert [row.build_cost for row in rows] == sorted(row.build_cost for row in rows)

    def test_on_row_and_metadata(self):
        """Test that rows are streamed and calibration recorded."""
        seen, metadata = [], {}
        rows = run_sweep(small_config(), on_row=seen.append, metadata=metadata)
        assert seen == rows
        assert metadata['center_mode'] == CENTER_FRESH
        assert metadata['radius'] == rows[0].radius
        assert metadata['degenerate'] is False

    def test_file_dataset_uses_leave_one_out(self, tmp_path):
        """Test that loaded datasets query their own points, excluded from results."""
        path = tmp_path / 'points.txt'
        save_ascii(Dataset(np.random.default_rng(0).random((300, 3))), path)
        metadata = {}
        rows = run_sweep(small_config(dataset=DatasetSpec(path=str(path))), metadata=metadata)
        assert metadata['center_mode'] == CENTER_LEAVE_ONE_OUT
        assert all(row.avg_result_size >= 0 for row in rows)

    def test_query_centres_are_dataset_points(self, make_line):
        """Test leave-one-out centres for a dataset without a generator."""
        ds = make_line(np.arange(10))
        centers, ids = query_centers(ds, 5, 0)
        assert np.array_equal(centers, ds.points[ids])

    def test_k_not_below_n(self):
        """Test that a pivot count reaching n is rejected."""
        with pytest.raises(PivotError):
            run_sweep(small_config(dataset=DatasetSpec(generator='cube', d=2, n=8)))

    @pytest.mark.parametrize('k_sweep', [(), (4, 2), (2, 2)])
    def test_k_sweep_validated(self, k_sweep):
        """Test that empty or non-ascending sweeps are rejected."""
        with pytest.raises(ValidationError):
            small_config(k_sweep=k_sweep)

    def test_dataset_spec_needs_one_source(self):
        """Test that a dataset description names exactly one of generator and path."""
        with pytest.raises(ValidationError):
            DatasetSpec()
        with pytest.raises(ValidationError):
            DatasetSpec(generator='cube', d=2, n=5, path='x.txt')


# ============================================================================
# Recorded Run Tests
# ============================================================================

@pytest.mark.django_db
class TestRecordedSweeps:
    """Test cases for sweep --record."""

    def test_record_persists_rows(self):
        """Test that a recorded sweep stores one result per k."""
        out, err = StringIO(), StringIO()
        call_command(
            'sweep', '--generator', 'cube', '--d', '3', '--n', '200',
            '--k-sweep', '2', '4', '--queries', '10', '--probes', '5',
            '--record', '--label', 'smoke',
            stdout=out, stderr=err,
        )
        run = ExperimentRun.objects.get()
        assert run.label == 'smoke'
        assert run.center_mode == CENTER_FRESH
        assert ExperimentResult.objects.filter(run=run).count() == 2

        lines = out.getvalue().strip().split('\n')
        assert lines[0] == ','.join(CSV_HEADER)
        assert len(lines) == 3
        assert [row[2] for row in run.to_rows()] == [2, 4]

    def test_without_record_nothing_stored(self):
        """Test that plain sweeps leave the database alone."""
        call_command(
            'sweep', '--generator', 'cube', '--d', '3', '--n', '200',
            '--k-sweep', '2', '--queries', '5', '--probes', '5',
            stdout=StringIO(), stderr=StringIO(),
        )
        assert ExperimentRun.objects.count() == 0


# ============================================================================
# Command Line Tests
# ============================================================================

@pytest.mark.integration
class TestCommandLine:
    """Test cases for cli_dispatch exit codes and outputs."""

    def test_help(self):
        """Test that help lists the subcommands and exits 0."""
        out = StringIO()
        assert cli_dispatch(['--help'], stdout=out) == 0
        assert 'orchard-bench' in out.getvalue()

    def test_unknown_subcommand(self):
        """Test that an unknown subcommand is a usage error."""
        err = StringIO()
        assert cli_dispatch(['frobnicate'], stdout=StringIO(), stderr=err) == 2
        assert 'frobnicate' in err.getvalue()

    def test_missing_subcommand(self):
        """Test that no arguments is a usage error."""
        assert cli_dispatch([], stdout=StringIO(), stderr=StringIO()) == 2

    def test_bad_option_is_usage_error(self, capsys):
        """Test that argparse failures exit 2."""
        assert cli_dispatch(['gen', 'torus', '--d', '2', '--n', '3'], stdout=StringIO(), stderr=StringIO()) == 2

    def test_missing_dataset_file(self, tmp_path):
        """Test that a missing --data file exits 1 and names the path."""
        missing = tmp_path / 'nope.txt'
        err = StringIO()
        code = cli_dispatch(
            ['sweep', '--data', str(missing), '--k-sweep', '2'],
            stdout=StringIO(), stderr=err,
        )
        assert code == 1
        assert str(missing) in err.getvalue()

    def test_gen_is_deterministic(self):
        """Test that gen with one seed prints the same file twice."""
        first, second = StringIO(), StringIO()
        assert cli_dispatch(['gen', 'sphere', '--d', '3', '--n', '5', '--seed', '9'], stdout=first) == 0
        assert cli_dispatch(['gen', 'sphere', '--d', '3', '--n', '5', '--seed', '9'], stdout=second) == 0
        assert first.getvalue() == second.getvalue()
        assert first.getvalue().split('\n')[0] == '5 3'

    def test_gen_writes_out_file(self, tmp_path):
        """Test that --out writes the dataset file."""
        path = tmp_path / 'cube.txt'
        assert cli_dispatch(['gen', 'cube', '--d', '2', '--n', '4', '--out', str(path)],
                            stdout=StringIO(), stderr=StringIO()) == 0
        assert path.read_text().startswith('4 2\n')

    def test_bounds_vc(self):
        """Test the VC bound row."""
        out = StringIO()
        assert cli_dispatch(['bounds', 'vc', '--space', 'l2', '--d', '20', '--k', '50'], stdout=out) == 0
        header, row = out.getvalue().strip().split('\n')
        assert header == 'space,d,k,value'
        assert abs(float(row.split(',')[-1]) - 49053) <= 1

    def test_bounds_missing_flag(self):
        """Test that a missing calculator input exits 1."""
        err = StringIO()
        assert cli_dispatch(['bounds', 'hoeffding', '--n', '5'], stdout=StringIO(), stderr=err) == 1
        assert '--eps' in err.getvalue()

    def test_sweep_csv(self):
        """Test a small sweep through the command line."""
        out, err = StringIO(), StringIO()
        code = cli_dispatch(
            ['sweep', '--generator', 'cube', '--d', '3', '--n', '300', '--k-sweep', '2', '4',
             '--queries', '10', '--probes', '5'],
            stdout=out, stderr=err,
        )
        assert code == 0
        assert 'center_mode=fresh' in err.getvalue()
        lines = out.getvalue().strip().split('\n')
        assert lines[0].split(',') == CSV_HEADER
        assert [line.split(',')[2] for line in lines[1:]] == ['2', '4']

    def test_sweep_on_file_reports_leave_one_out(self, tmp_path):
        """Test that a file-backed sweep names its centre mode on stderr."""
        path = tmp_path / 'points.txt'
        save_ascii(Dataset(np.random.default_rng(1).random((200, 3))), path)
        err = StringIO()
        code = cli_dispatch(
            ['sweep', '--data', str(path), '--k-sweep', '2', '--queries', '10', '--probes', '5'],
            stdout=StringIO(), stderr=err,
        )
        assert code == 0
        assert 'center_mode=leave-one-out' in err.getvalue()

    def test_non_ascii_dataset_names_line(self, tmp_path):
        """Test that a non-ASCII byte exits 1 with the path and line."""
        path = tmp_path / 'bad.txt'
        path.write_bytes('2 1\n0\n1½\n'.encode('utf-8'))
        err = StringIO()
        assert cli_dispatch(['dim', '--data', str(path)], stdout=StringIO(), stderr=err) == 1
        assert str(path) in err.getvalue()
        assert 'line 3' in err.getvalue()

    def test_dim(self):
        """Test the intrinsic dimension row."""
        out = StringIO()
        assert cli_dispatch(['dim', '--generator', 'cube', '--d', '4', '--n', '300', '--pairs', '1000'],
                            stdout=out, stderr=StringIO()) == 0
        header, row = out.getvalue().strip().split('\n')
        fields = dict(zip(header.split(','), row.split(',')))
        assert (fields['n'], fields['d'], fields['metric']) == ('300', '4', 'euclidean')
        assert float(fields['dtilde']) > 0

    def test_hist(self):
        """Test the histogram and summary outputs."""
        out = StringIO()
        assert cli_dispatch(['hist', '--generator', 'cube', '--d', '4', '--n', '300',
                             '--pairs', '500', '--bins', '10'], stdout=out, stderr=StringIO()) == 0
        lines = out.getvalue().strip().split('\n')
        assert lines[0] == 'bin_low,bin_high,count'
        assert len(lines) == 11

        out = StringIO()
        assert cli_dispatch(['hist', '--generator', 'cube', '--d', '4', '--n', '300',
                             '--pairs', '500', '--summary'], stdout=out, stderr=StringIO()) == 0
        header, row = out.getvalue().strip().split('\n')
        assert header == 'd,n,samples,normalized,anchor,mean,std'

    def test_project(self):
        """Test one projected pair per dataset point."""
        out = StringIO()
        assert cli_dispatch(['project', '--generator', 'sphere', '--d', '3', '--n', '20'],
                            stdout=out, stderr=StringIO()) == 0
        lines = out.getvalue().strip().split('\n')
        assert lines[0] == 'x,y'
        assert len(lines) == 21

    def test_conc_sphere(self):
        """Test alpha at eps = 0 and the evenly spaced grid."""
        out = StringIO()
        assert cli_dispatch(['conc-sphere', '--d', '3', '--eps', '0'], stdout=out, stderr=StringIO()) == 0
        header, row = out.getvalue().strip().split('\n')
        assert header == 'd,eps,alpha,gaussian_bound'
        assert float(row.split(',')[2]) == 0.5

        out = StringIO()
        assert cli_dispatch(['conc-sphere', '--d', '3', '10', '--eps-steps', '4'],
                            stdout=out, stderr=StringIO()) == 0
        assert len(out.getvalue().strip().split('\n')) == 1 + 2 * 5

    def test_build(self, tmp_path):
        """Test that build writes the index and the pivot ids."""
        out = StringIO()
        pivots = tmp_path / 'pivots.txt'
        assert cli_dispatch(['build', '--generator', 'cube', '--d', '3', '--n', '50', '--k', '4',
                             '--pivots-out', str(pivots)], stdout=out, stderr=StringIO()) == 0
        lines = out.getvalue().strip().split('\n')
        assert lines[0] == '4 50'
        assert len(lines) == 2 + 50
        assert lines[1].split() == pivots.read_text().split()

    def test_orchard_bench(self):
        """Test that Orchard agrees with the linear scan through the command line."""
        out = StringIO()
        assert cli_dispatch(['orchard-bench', '--generator', 'cube', '--d', '3', '--n', '100',
                             '--queries', '20'], stdout=out, stderr=StringIO()) == 0
        header, row = out.getvalue().strip().split('\n')
        fields = dict(zip(header.split(','), row.split(',')))
        assert fields['mismatches'] == '0'
        assert fields['build_cost'] == str(100 * 99 // 2)
