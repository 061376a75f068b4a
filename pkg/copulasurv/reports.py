"""
Machine-readable JSON reports, their fixed-width table rendering, and
RunConfig resolution (built-in defaults < --config file < command-line flags).
"""
import json
import logging
import math
from collections import OrderedDict

import numpy as np

from copulasurv.config import get_config
from copulasurv.exceptions import DomainError

logger = logging.getLogger(__name__)

NOT_AVAILABLE = 'n/a'


def _normalize_key(key):
    return str(key).replace('-', '_')


def load_run_config(path, allowed):
    """
    Flat JSON object whose keys mirror long command-line flags
    """
    try:
        with open(path) as handle:
            values = json.load(handle, object_pairs_hook=OrderedDict)
    except (IOError, OSError) as error:
        raise DomainError('Cannot read config file %s: %s' % (path, error))
    except ValueError as error:
        raise DomainError('Config file %s is not valid JSON: %s' % (path, error))
    if not isinstance(values, dict):
        raise DomainError('Config file %s must hold a JSON object' % path)
    values = OrderedDict((_normalize_key(key), value) for key, value in values.items())
    unknown = [key for key in values if key not in allowed]
    if unknown:
        raise DomainError('Unknown config keys: %s; valid keys: %s' % (', '.join(unknown), ', '.join(allowed)))
    return values


def resolve_config(options, defaults, config_path=None):
    """
    :type options: dict, command-line values with None for flags not given
    :type defaults: OrderedDict
    :rtype: OrderedDict
    """
    file_values = load_run_config(config_path, defaults) if config_path else {}
    resolved = OrderedDict()
    for key, default in defaults.items():
        value = options.get(key)
        if value is None:
            value = file_values.get(key, default)
        resolved[key] = value
    return resolved


def _plain(value):
    if isinstance(value, dict):
        return OrderedDict((str(key), _plain(item)) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_json(payload):
    return json.dumps(_plain(payload), indent=2, allow_nan=False) + '\n'


def fit_payload(report, data, resolved_config):
    """
    :type report: copulasurv.estimators.FitReport
    :type data: copulasurv.data.Dataset
    """
    payload = OrderedDict([('schema_version', get_config('schema_version'))])
    payload.update(report.as_dict())
    payload['n_clusters'] = data.n_clusters
    payload['n_subjects'] = data.n_subjects
    payload['events'] = data.n_events
    payload['resolved_config'] = resolved_config
    return _plain(payload)


def replication_cell(summary, scenario=None):
    """
    :type summary: copulasurv.simulation.ReplicationSummary
    :type scenario: copulasurv.scenarios.Scenario or None
    """
    cell = OrderedDict()
    cell['scenario'] = scenario.name if scenario is not None else None
    cell.update(summary.as_dict())
    published = scenario.published if scenario is not None else {}
    cell['published'] = OrderedDict((method, values._asdict()) for method, values in published.items())
    return cell


def replication_payload(cells, resolved_config):
    return _plain(OrderedDict([
        ('schema_version', get_config('schema_version')),
        ('cells', cells),
        ('resolved_config', resolved_config),
    ]))


def _number(value, digits=3):
    return NOT_AVAILABLE if value is None else '%.*f' % (digits, value)


def _se_coverage(se, coverage):
    if se is None:
        return NOT_AVAILABLE
    return '(%.3f;%s)' % (se, NOT_AVAILABLE if coverage is None else '%d%%' % int(round(100 * coverage)))


def format_replication_table(payload, width=16):
    """
    Fixed-width rendering of a replication payload: per cell a row of mean
    estimates, a row of (mean SE; coverage), the empirical SD and, when
    known, the published values
    """
    lines = []
    for cell in payload['cells']:
        methods = [entry['method'] for entry in cell['methods']]
        label = cell['scenario'] or '%s-%g' % (cell['config']['copula'], cell['config']['theta'])
        label_width = max(len(label), 12) + 2
        lines.append(''.ljust(label_width) + ''.join(method.ljust(width) for method in methods))
        lines.append(label.ljust(label_width) + ''.join(_number(entry['mean']).ljust(width)
                                                        for entry in cell['methods']))
        lines.append(''.ljust(label_width) + ''.join(_se_coverage(entry['mean_se'], entry['coverage']).ljust(width)
                                                     for entry in cell['methods']))
        lines.append('  sd'.ljust(label_width) + ''.join(_number(entry['empirical_sd']).ljust(width)
                                                         for entry in cell['methods']))
        lines.append('  failures'.ljust(label_width) + ''.join(
            ('%d/%d' % (entry['failures'], entry['replicates'])).ljust(width) for entry in cell['methods']))
        published = cell.get('published') or {}
        if published:
            lines.append('  published'.ljust(label_width) + ''.join(
                _number(published[method]['mean']).ljust(width) if method in published else NOT_AVAILABLE.ljust(width)
                for method in methods))
            lines.append(''.ljust(label_width) + ''.join(
                _se_coverage(published[method]['se'], published[method]['coverage']).ljust(width)
                if method in published else NOT_AVAILABLE.ljust(width) for method in methods))
        lines.append('')
    return '\n'.join(line.rstrip() for line in lines)
