import os
from collections import OrderedDict

from copulasurv.apps import CLAYTON, FAMILIES
from copulasurv.config import get_config
from copulasurv.datafiles import write_dataset
from copulasurv.management.base import CopulaSurvCommand, positive_int
from copulasurv.margins import WeibullMargin
from copulasurv.reports import render_json
from copulasurv.simulation import SimulationConfig, generate_dataset

MANIFEST = 'manifest.json'


def dataset_filename(replicate, replicates):
    return 'dataset-%0*d.csv' % (max(3, len(str(replicates - 1))), replicate)


class Command(CopulaSurvCommand):
    help = 'Simulate clustered survival datasets from an Archimedean copula with Weibull margins'

    def run_defaults(self):
        return OrderedDict([
            ('copula', CLAYTON),
            ('theta', 0.5),
            ('clusters', 200),
            ('size_min', 2),
            ('size_max', 50),
            ('lambda', 0.0316),
            ('rho', 1.5),
            ('beta', 3.0),
            ('covariate_probability', get_config('covariate_probability')),
            ('censor_lambda', None),
            ('censor_rho', 1.5),
            ('seed', get_config('default_seed')),
            ('replicates', 1),
            ('out', None),
        ])

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--copula', choices=FAMILIES)
        parser.add_argument('--theta', type=float)
        parser.add_argument('--clusters', type=positive_int)
        parser.add_argument('--size-min', dest='size_min', type=positive_int)
        parser.add_argument('--size-max', dest='size_max', type=positive_int)
        parser.add_argument('--lambda', dest='lambda', type=float, help='Weibull scale of the margin')
        parser.add_argument('--rho', type=float, help='Weibull shape of the margin')
        parser.add_argument('--beta', type=float, help='Effect of the dichotomous covariate')
        parser.add_argument('--covariate-probability', dest='covariate_probability', type=float)
        parser.add_argument('--censor-lambda', dest='censor_lambda', type=float,
                            help='Weibull censoring scale; no censoring when omitted')
        parser.add_argument('--censor-rho', dest='censor_rho', type=float)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--replicates', type=positive_int)
        parser.add_argument('--out', help='Output directory')

    def simulation_config(self, resolved):
        censoring = None
        if resolved['censor_lambda'] is not None:
            censoring = (resolved['censor_lambda'], resolved['censor_rho'])
        return SimulationConfig(
            resolved['copula'], resolved['theta'], n_clusters=resolved['clusters'],
            size_min=resolved['size_min'], size_max=resolved['size_max'],
            margin=WeibullMargin(resolved['lambda'], resolved['rho'], [resolved['beta']]),
            covariate_probability=resolved['covariate_probability'], censoring=censoring,
            seed=resolved['seed'], replicates=resolved['replicates'])

    def run(self, options):
        resolved = self.resolve(options)
        self.require(resolved, 'out')
        self.require_choice(resolved, 'copula', FAMILIES)
        cfg = self.simulation_config(resolved)

        out = resolved['out']
        if not os.path.isdir(out):
            os.makedirs(out)
        files = []
        for replicate in range(cfg.replicates):
            data = generate_dataset(cfg, replicate)
            name = dataset_filename(replicate, cfg.replicates)
            write_dataset(data, os.path.join(out, name))
            files.append(OrderedDict([
                ('file', name),
                ('replicate', replicate),
                ('clusters', data.n_clusters),
                ('subjects', data.n_subjects),
                ('events', data.n_events),
                ('censoring_rate', data.censoring_rate),
            ]))
            if options.get('verbosity', 1) > 1:
                self.stdout.write('%s: %d subjects, %.1f%% censored' %
                                  (name, data.n_subjects, 100 * data.censoring_rate))
        manifest = render_json(OrderedDict([
            ('schema_version', get_config('schema_version')),
            ('files', files),
            ('resolved_config', resolved),
        ]))
        with open(os.path.join(out, MANIFEST), 'w') as handle:
            handle.write(manifest)
        self.stdout.write(manifest, ending='')
