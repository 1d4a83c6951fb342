# Generated by Django 6.0 on 2026-10-19 09:12

import django.db.models.deletion
import django.utils.timezone
import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, help_text='Unique identifier', primary_key=True, serialize=False)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now, help_text='When the record was written', verbose_name='created at')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='updated at')),
                ('label', models.CharField(blank=True, default='', help_text='Free-form name for the run', max_length=255, verbose_name='label')),
                ('dataset', models.CharField(help_text='Generator description or dataset file path', max_length=500, verbose_name='dataset')),
                ('center_mode', models.CharField(choices=[('fresh', 'Fresh draws from the generator'), ('leave-one-out', 'Dataset points, excluded from their own results')], help_text='How query centres were drawn', max_length=20, verbose_name='center mode')),
                ('seed', models.DecimalField(decimal_places=0, help_text='64-bit unsigned seed of the run', max_digits=20, verbose_name='seed')),
                ('target_fraction', models.FloatField(help_text='Desired result-set fraction used for radius calibration', verbose_name='target fraction')),
                ('query_count', models.PositiveIntegerField(help_text='Range queries per sweep row', verbose_name='query count')),
                ('config', models.JSONField(default=dict, help_text='Full experiment configuration', verbose_name='config')),
                ('metadata', models.JSONField(blank=True, default=dict, help_text='Calibration outcome and centre mode decision', verbose_name='metadata')),
            ],
            options={
                'verbose_name': 'experiment run',
                'verbose_name_plural': 'experiment runs',
                'db_table': 'experiment_runs',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['dataset'], name='idx_runs_dataset')],
            },
        ),
        migrations.CreateModel(
            name='ExperimentResult',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, help_text='Unique identifier', primary_key=True, serialize=False)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now, help_text='When the record was written', verbose_name='created at')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='updated at')),
                ('d', models.PositiveIntegerField(verbose_name='dimension')),
                ('n', models.PositiveIntegerField(verbose_name='dataset size')),
                ('k', models.PositiveIntegerField(verbose_name='pivot count')),
                ('selection_mode', models.CharField(max_length=50, verbose_name='selection mode')),
                ('radius', models.FloatField(verbose_name='radius')),
                ('avg_cost', models.FloatField(help_text='Mean distance computations per query', verbose_name='average cost')),
                ('avg_result_size', models.FloatField(verbose_name='average result size')),
                ('median_discard_fraction', models.FloatField(verbose_name='median discard fraction')),
                ('build_cost', models.BigIntegerField(help_text='Selection plus table distance computations', verbose_name='build cost')),
                ('run', models.ForeignKey(help_text='The sweep this row belongs to', on_delete=django.db.models.deletion.CASCADE, related_name='results', to='experiments.experimentrun')),
            ],
            options={
                'verbose_name': 'experiment result',
                'verbose_name_plural': 'experiment results',
                'db_table': 'experiment_results',
                'ordering': ['run', 'k'],
                'constraints': [models.UniqueConstraint(fields=('run', 'k', 'selection_mode'), name='unique_result_per_run_k_mode')],
            },
        ),
    ]
