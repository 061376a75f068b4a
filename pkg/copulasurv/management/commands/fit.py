from collections import OrderedDict

from django.core.management.base import CommandError

from copulasurv.apps import FAMILIES, METHODS
from copulasurv.config import default_threads, get_config
from copulasurv.datafiles import read_dataset
from copulasurv.estimators import fit
from copulasurv.management.base import EXIT_CONVERGENCE, CopulaSurvCommand, positive_int
from copulasurv.reports import fit_payload, render_json


class Command(CopulaSurvCommand):
    help = 'Fit an Archimedean copula model to clustered right-censored data (CSV) and print a JSON report'

    def run_defaults(self):
        return OrderedDict([
            ('data', None),
            ('copula', None),
            ('method', None),
            ('jackknife_groups', get_config('jackknife_groups')),
            ('seed', get_config('default_seed')),
            ('threads', default_threads()),
            ('json_out', None),
        ])

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--data', help='CSV file with header cluster,time,status,<covariates>')
        parser.add_argument('--copula', choices=FAMILIES)
        parser.add_argument('--method', choices=METHODS)
        parser.add_argument('--jackknife-groups', dest='jackknife_groups', type=positive_int,
                            help='Number of cluster groups for semiparametric jackknife SEs (default: one per cluster)')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--threads', type=positive_int)
        parser.add_argument('--json-out', dest='json_out', help='Write the report here instead of standard output')

    def run(self, options):
        resolved = self.resolve(options)
        self.require(resolved, 'data', 'copula', 'method')
        self.require_choice(resolved, 'copula', FAMILIES)
        self.require_choice(resolved, 'method', METHODS)

        data = read_dataset(resolved['data'])
        report = fit(resolved['method'], resolved['copula'], data,
                     jackknife_groups=resolved['jackknife_groups'], threads=resolved['threads'])
        self.write_json(render_json(fit_payload(report, data, resolved)), resolved['json_out'])
        if not report.converged:
            raise CommandError('Fit did not converge: %s' % '; '.join(report.warnings), returncode=EXIT_CONVERGENCE)
