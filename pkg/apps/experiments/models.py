"""
pivotbench Experiments App - Recorded Sweeps

This module contains models for persisted benchmark runs:
- ExperimentRun: one sweep invocation with its configuration
- ExperimentResult: one CSV row of a sweep
"""

from django.db import models
from django.utils.translation import gettext_lazy as _

from common.models import BaseModel


class CenterMode(models.TextChoices):
    FRESH = 'fresh', _('Fresh draws from the generator')
    LEAVE_ONE_OUT = 'leave-one-out', _('Dataset points, excluded from their own results')


class ExperimentRun(BaseModel):
    """
    A recorded sweep.

    config holds the full ExperimentConfig; metadata holds the calibrated
    radius, the degenerate-calibration flag and the centre mode decision.
    """

    label = models.CharField(
        _('label'),
        max_length=255,
        blank=True,
        default='',
        help_text=_('Free-form name for the run')
    )
    dataset = models.CharField(
        _('dataset'),
        max_length=500,
        help_text=_('Generator description or dataset file path')
    )
    center_mode = models.CharField(
        _('center mode'),
        max_length=20,
        choices=CenterMode.choices,
        help_text=_('How query centres were drawn')
    )
    seed = models.DecimalField(
        _('seed'),
        max_digits=20,
        decimal_places=0,
        help_text=_('64-bit unsigned seed of the run')
    )
    target_fraction = models.FloatField(
        _('target fraction'),
        help_text=_('Desired result-set fraction used for radius calibration')
    )
    query_count = models.PositiveIntegerField(
        _('query count'),
        help_text=_('Range queries per sweep row')
    )
    config = models.JSONField(
        _('config'),
        default=dict,
        help_text=_('Full experiment configuration')
    )
    metadata = models.JSONField(
        _('metadata'),
        default=dict,
        blank=True,
        help_text=_('Calibration outcome and centre mode decision')
    )

    class Meta:
        db_table = 'experiment_runs'
        verbose_name = _('experiment run')
        verbose_name_plural = _('experiment runs')
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['dataset'], name='idx_runs_dataset'),
        ]

    def __str__(self):
        return f'{self.label or self.dataset} (seed {self.seed})'

    def to_rows(self):
        """The run's results as CSV rows in schema order."""
        return [result.as_row() for result in self.results.order_by('k', 'selection_mode')]


class ExperimentResult(BaseModel):
    """One (k, selection mode) row of a sweep."""

    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name='results',
        help_text=_('The sweep this row belongs to')
    )
    d = models.PositiveIntegerField(_('dimension'))
    n = models.PositiveIntegerField(_('dataset size'))
    k = models.PositiveIntegerField(_('pivot count'))
    selection_mode = models.CharField(_('selection mode'), max_length=50)
    radius = models.FloatField(_('radius'))
    avg_cost = models.FloatField(
        _('average cost'),
        help_text=_('Mean distance computations per query')
    )
    avg_result_size = models.FloatField(_('average result size'))
    median_discard_fraction = models.FloatField(_('median discard fraction'))
    build_cost = models.BigIntegerField(
        _('build cost'),
        help_text=_('Selection plus table distance computations')
    )

    class Meta:
        db_table = 'experiment_results'
        verbose_name = _('experiment result')
        verbose_name_plural = _('experiment results')
        ordering = ['run', 'k']
        constraints = [
            models.UniqueConstraint(
                fields=['run', 'k', 'selection_mode'],
                name='unique_result_per_run_k_mode'
            ),
        ]

    def __str__(self):
        return f'k={self.k} {self.selection_mode}: {self.avg_cost:.2f}'

    def as_row(self):
        return [
            self.d, self.n, self.k, self.selection_mode, self.radius, self.avg_cost,
            self.avg_result_size, self.median_discard_fraction, self.build_cost, int(self.run.seed),
        ]
