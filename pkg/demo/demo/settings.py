"""
Settings of a minimal project running the copulasurv management commands:

    python demo/manage.py simulate --copula gumbel --theta 0.5 --out /tmp/sim
    python demo/manage.py fit --data /tmp/sim/dataset-000.csv --copula gumbel --method two-stage
    python demo/manage.py replicate --scenario clayton-0.5-k50-c25 --replicates 20
"""

import os

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = 'demo-only-copulasurv-key'

DEBUG = True

INSTALLED_APPS = [
    # Demo app
    'demo',

    # Copula survival models
    'demo.apps.CopulaSurvDemoConfig',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.path.join(BASE_DIR, 'db.sqlite3'),
    }
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'copulasurv': {
            'handlers': ['console'],
            'level': os.environ.get('COPULASURV_LOG_LEVEL', 'INFO'),
        },
    },
}
