"""
Django settings for pivotbench - Base Settings

pivotbench: metric-space similarity search workbench
- pivot table indexes with exact distance-computation accounting
- Orchard's algorithm
- intrinsic dimension and concentration-of-measure diagnostics
- seeded benchmark sweeps emitting CSV

These settings are common to all environments.
Override in local.py or production.py as needed.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
# BASE_DIR is two levels up: config/settings/base.py → project root
BASE_DIR = Path(__file__).resolve().parent.parent.parent


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # pivotbench Apps (in apps/ folder)
    'apps.metrics.apps.MetricsConfig',
    'apps.datasets.apps.DatasetsConfig',
    'apps.pivots.apps.PivotsConfig',
    'apps.orchard.apps.OrchardConfig',
    'apps.diagnostics.apps.DiagnosticsConfig',
    'apps.experiments.apps.ExperimentsConfig',
]

MIDDLEWARE = []


# Internationalization
# https://docs.djangoproject.com/en/6.0/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/6.0/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Workbench defaults
# Every value can be overridden per command with the matching flag.

# Worker threads for queries, index columns and candidate scoring.
# The PIVOTBENCH_THREADS environment variable takes precedence at call time.
PIVOTBENCH_THREADS = int(os.environ.get('PIVOTBENCH_THREADS', '1'))

# Orchard keeps an n x n matrix; refuse larger builds without --allow-large
PIVOTBENCH_ORCHARD_MAX_POINTS = 50_000

PIVOTBENCH_HISTOGRAM_BINS = 100

# Radius calibration probes and benchmark queries per sweep row
PIVOTBENCH_PROBE_QUERIES = 200
PIVOTBENCH_QUERY_COUNT = 1000
PIVOTBENCH_TARGET_FRACTION = 0.001

# Incremental selection: pair sample size A and candidates per step N
PIVOTBENCH_SELECTION_PAIRS = 5000
PIVOTBENCH_SELECTION_CANDIDATES = 40

# Significant digits of reals in CSV output
PIVOTBENCH_CSV_DIGITS = 17
