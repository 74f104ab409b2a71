"""
Django settings for the coarse_lab project.

The project has no web surface: Django supplies the management-command CLI,
the settings layer, logging configuration, the certificate ledger and the
test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
import sys
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('LAB_SECRET_KEY', 'django-insecure-coarse-lab-local-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'verification',
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'lab.sqlite3',
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LAB_LOG_LEVEL = os.environ.get('LAB_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'verification': {
            'handlers': ['console'],
            'level': LAB_LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Lab settings
LAB_DEFAULT_SEED = 20240611  # printed by every sampling command
LAB_DEFAULT_NODE_LIMIT = 2_000_000  # search-tree nodes per search
LAB_EXHAUSTIVE_CANDIDATE_CAP = 250_000  # separator candidates before exhaustive mode is refused
LAB_GRAPH_SIZE_CAP = 50_000  # vertices; derive_params flags anything larger
LAB_QI_CHECK_LIMIT = 1_000  # vertices; larger maps need an explicit assume_qi
LAB_DEFAULT_JOBS = 1  # worker threads for candidate sweeps
LAB_CERTIFICATE_SCHEMA_VERSION = 1  # bump on any certificate layout change

# Quieter, smaller limits for the test runner
if 'test' in sys.argv:
    LOGGING['loggers']['verification']['level'] = 'WARNING'
    LAB_DEFAULT_NODE_LIMIT = 500_000
