import json
from collections import OrderedDict

from copulasurv.apps import METHODS
from copulasurv.config import default_threads, get_config
from copulasurv.exceptions import DomainError
from copulasurv.management.base import CopulaSurvCommand, positive_int
from copulasurv.reports import format_replication_table, render_json, replication_cell, replication_payload
from copulasurv.scenarios import SCENARIOS, get_scenario
from copulasurv.simulation import SimulationConfig, run_replication

# execution-only keys, not echoed in the report
EXECUTION_KEYS = ('threads', 'json_out')


def read_grid(path):
    """
    Scenario names from a JSON list or an object with a "scenarios" list
    """
    try:
        with open(path) as handle:
            grid = json.load(handle)
    except ValueError as error:
        raise DomainError('Grid file %s is not valid JSON: %s' % (path, error))
    if isinstance(grid, dict):
        grid = grid.get('scenarios')
    if not isinstance(grid, list) or not grid:
        raise DomainError('Grid file %s must list scenario names' % path)
    return [get_scenario(name) for name in grid]


def parse_methods(value):
    if isinstance(value, (list, tuple)):
        methods = list(value)
    else:
        methods = [item.strip() for item in str(value).split(',') if item.strip()]
    unknown = [method for method in methods if method not in METHODS]
    if unknown or not methods:
        raise DomainError('Methods must be a comma-separated subset of %s, got "%s"' % (','.join(METHODS), value))
    return methods


class Command(CopulaSurvCommand):
    help = 'Replicate cells of the simulation study and print mean estimate, (mean SE; coverage) per method'

    def run_defaults(self):
        return OrderedDict([
            ('scenario', None),
            ('grid', None),
            ('replicates', 100),
            ('methods', ','.join(METHODS)),
            ('jackknife_groups', get_config('jackknife_groups')),
            ('threads', default_threads()),
            ('seed', get_config('default_seed')),
            ('json_out', None),
        ])

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--scenario', help='Built-in cell, e.g. clayton-0.5-k200-c0')
        parser.add_argument('--grid', help='JSON file listing scenario names')
        parser.add_argument('--replicates', type=positive_int)
        parser.add_argument('--methods', help='Comma-separated subset of %s' % ','.join(METHODS))
        parser.add_argument('--jackknife-groups', dest='jackknife_groups', type=positive_int)
        parser.add_argument('--threads', type=positive_int)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--json-out', dest='json_out', help='Write the JSON report here instead of standard error')
        parser.add_argument('--list', action='store_true', dest='list_scenarios',
                            help='List the built-in scenario names and exit')

    def run(self, options):
        if options.get('list_scenarios'):
            self.stdout.write('\n'.join(SCENARIOS))
            return
        resolved = self.resolve(options)
        if bool(resolved['scenario']) == bool(resolved['grid']):
            raise DomainError('Give exactly one of --scenario or --grid; scenarios: %s' % ', '.join(SCENARIOS))
        scenarios = [get_scenario(resolved['scenario'])] if resolved['scenario'] else read_grid(resolved['grid'])
        methods = parse_methods(resolved['methods'])

        cells = []
        for scenario in scenarios:
            cfg = SimulationConfig.from_scenario(scenario, seed=resolved['seed'], replicates=resolved['replicates'])
            summary = run_replication(cfg, methods, threads=resolved['threads'],
                                      jackknife_groups=resolved['jackknife_groups'])
            cells.append(replication_cell(summary, scenario))
        echoed = OrderedDict((key, value) for key, value in resolved.items() if key not in EXECUTION_KEYS)
        payload = replication_payload(cells, echoed)
        # JSON report alongside the table: to --json-out, else standard error
        if resolved['json_out']:
            self.write_json(render_json(payload), resolved['json_out'])
        else:
            self.stderr.write(render_json(payload), style_func=str, ending='')
        self.stdout.write(format_replication_table(payload))
