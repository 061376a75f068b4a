import logging
from collections import OrderedDict

from django.core.management.base import BaseCommand, CommandError

from copulasurv.exceptions import (ConvergenceError, DataFormatError, DomainError, IdentifiabilityError,
                                   NumericalError, ReplicationError, TableSizeError)
from copulasurv.reports import resolve_config

logger = logging.getLogger(__name__)

EXIT_INPUT = 1
EXIT_CONVERGENCE = 2

INPUT_ERRORS = (DomainError, DataFormatError, IdentifiabilityError, TableSizeError, IOError, OSError)
FIT_ERRORS = (ConvergenceError, NumericalError, ReplicationError)


def positive_int(value):
    value = int(value)
    if value < 1:
        raise ValueError('expected a positive integer, got %d' % value)
    return value


class CopulaSurvCommand(BaseCommand):
    """
    Shared plumbing: --config resolution and the exit-code contract
    (1 for input errors, 2 for convergence failures)
    """

    def run_defaults(self):
        """
        OrderedDict of every RunConfig key with its built-in default
        """
        return OrderedDict()

    def add_arguments(self, parser):
        parser.add_argument('--config', dest='config', default=None,
                            help='JSON file of flag values; explicit flags override it')

    def resolve(self, options):
        defaults = self.run_defaults()
        cli_values = dict((key, options.get(key)) for key in defaults)
        return resolve_config(cli_values, defaults, options.get('config'))

    def require(self, resolved, *keys):
        for key in keys:
            if resolved.get(key) in (None, ''):
                raise DomainError('--%s is required' % key.replace('_', '-'))

    def require_choice(self, resolved, key, choices):
        if resolved[key] not in choices:
            raise DomainError('--%s must be one of %s, got "%s"' %
                              (key.replace('_', '-'), ', '.join(choices), resolved[key]))

    def write_json(self, text, path=None):
        if path:
            with open(path, 'w') as handle:
                handle.write(text)
        else:
            self.stdout.write(text, ending='')

    def handle(self, *args, **options):
        try:
            return self.run(options)
        except INPUT_ERRORS as error:
            logger.debug('Input error', exc_info=True)
            raise CommandError(str(error), returncode=EXIT_INPUT)
        except FIT_ERRORS as error:
            logger.debug('Fit error', exc_info=True)
            raise CommandError('%s: %s' % (error.__class__.__name__, error), returncode=EXIT_CONVERGENCE)

    def run(self, options):
        raise NotImplementedError
