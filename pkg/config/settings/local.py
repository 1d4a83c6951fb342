"""
Django settings for pivotbench - Local Development

Use this for running benchmarks on your machine.
"""

from .base import *  # noqa
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-pivotbench-local-only')

DEBUG = True


PIVOTBENCH_THREADS = int(os.getenv('PIVOTBENCH_THREADS', PIVOTBENCH_THREADS))  # noqa F405


# Database
# https://docs.djangoproject.com/en/6.0/ref/settings/#databases

# Recorded sweeps go to SQLite unless a PostgreSQL database is configured
if os.getenv('PGDATABASE'):
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.postgresql',
            'NAME': os.getenv('PGDATABASE'),
            'USER': os.getenv('PGUSER', 'pivotbench'),
            'PASSWORD': os.getenv('PGPASSWORD', ''),
            'HOST': os.getenv('PGHOST', 'localhost'),
            'PORT': os.getenv('PGPORT', '5432'),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': BASE_DIR / 'pivotbench.sqlite3',
        }
    }


# Logging
# Console output goes to stderr so CSV on stdout stays clean
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'apps': {  # Our apps logging
            'handlers': ['console'],
            'level': os.getenv('PIVOTBENCH_LOG_LEVEL', 'DEBUG'),
            'propagate': False,
        },
    },
}
