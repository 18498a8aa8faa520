"""
Django settings for curriculum_project project.

The project has no web surface and no database: Django provides the settings layer,
the app registry and the management command framework used by the `cli` app.
For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
from pathlib import Path

import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration
from sentry_sdk.integrations.logging import LoggingIntegration

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

VERSION = '1.0.0'

SENTRY_DSN = os.environ.get('SENTRY_DSN')
if SENTRY_DSN:
    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[DjangoIntegration(), LoggingIntegration()],
        release=f'curriculum-project@{VERSION}',
        # Runs are batch jobs, errors only.
        traces_sample_rate=0.0,
        send_default_pii=False,
    )

# Only used to satisfy Django's startup checks: nothing is signed.
SECRET_KEY = 'curriculum-project-not-a-web-service'

DEBUG = False
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'corpus',
    'scoring',
    'toymodel',
    'samplers',
    'trainer',
    'cli',
]

DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

LOG_LEVEL = os.environ.get('CURRICULUM_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('corpus', 'scoring', 'toymodel', 'samplers', 'trainer', 'cli')
    },
}

# Built-in defaults, lowest precedence (flag > config file > these).
# Keys are flat and dotted, the same names the --config YAML file uses.
CURRICULUM_CONFIG_VERSION = 1

CURRICULUM_DEFAULTS = {
    'data.format': 'jsonl',
    'data.class_count': 2,
    'data.split': [0.8, 0.1, 0.1],
    'data.split_seed': 0,
    'data.max_tokens': None,
    'data.preset': None,
    'model.dim': 2 ** 16,
    'optim.kind': 'adamw',
    # None: toymodel.models.DEFAULT_LR of optim.kind (0.1 for sgd, 0.01 for adamw)
    'optim.lr': None,
    'optim.weight_decay': 0.01,
    'optim.beta1': 0.9,
    'optim.beta2': 0.999,
    'optim.eps': 1e-8,
    'train.strategy': 'Random',
    'train.epochs': 5,
    'train.batch_size': 16,
    'train.partition': [9, 7],
    'train.checkpoint_fraction': 0.1,
    'train.seeds': [66, 88, 99],
    'scores.path': None,
    'probe.fraction': 0.1,
    'probe.epochs': 1,
    'analysis.rescore': False,
    'analysis.split': 'train',
    'analysis.bins': 20,
    'fewshot.k': 64,
    'compare.strategies': ['Random', 'Length', 'E2D', 'D2E', 'SME', 'SMD', 'PME', 'PMD'],
    'compare.jobs': 1,
}
