"""
``copulasurv`` console script: runs the fit / simulate / replicate
management commands without a Django project.
"""
import os
import sys

import django
from django.conf import settings

COMMANDS = ('fit', 'simulate', 'replicate')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {'format': '%(levelname)s %(name)s: %(message)s'},
    },
    'handlers': {
        'console': {'class': 'logging.StreamHandler', 'formatter': 'plain'},
    },
    'loggers': {
        'copulasurv': {'handlers': ['console'], 'level': os.environ.get('COPULASURV_LOG_LEVEL', 'WARNING')},
    },
}


def setup():
    if not settings.configured and 'DJANGO_SETTINGS_MODULE' not in os.environ:
        settings.configure(INSTALLED_APPS=['copulasurv'], LOGGING=LOGGING)
    django.setup()


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    if len(argv) < 2 or argv[1] not in COMMANDS:
        sys.stderr.write('usage: copulasurv {%s} [options]\n' % ','.join(COMMANDS))
        return 1
    setup()

    from django.core.management import execute_from_command_line
    execute_from_command_line(['copulasurv'] + argv[1:])
    return 0


if __name__ == '__main__':
    sys.exit(main())
