import os

from django.apps import apps
from django.core.exceptions import AppRegistryNotReady, ImproperlyConfigured
from copulasurv.apps import CopulaSurvConfig
from copulasurv.exceptions import DomainError

#: :type: CopulaSurvConfig()
copulasurv_config_cls = CopulaSurvConfig

THREADS_ENV = 'COPULASURV_THREADS'

TUNABLES = (
    'max_iterations', 'param_tolerance', 'score_tolerance', 'fd_step', 'theta_grid_size',
    'theta_search_bounds', 'survival_floor', 'jackknife_groups', 'jackknife_failure_limit',
    'replicate_failure_limit', 'threads', 'time_digits', 'schema_version', 'default_seed',
    'covariate_probability',
)

# values installed in worker processes, where the app registry is not ready
_installed_values = {}


def get_config_instance(app_name=None):
    """
    Installed config, or None when Django is not set up (e.g. spawned workers)
    :rtype: CopulaSurvConfig()
    """
    try:
        config = apps.get_app_config(app_name or 'copulasurv')
        if isinstance(config, CopulaSurvConfig):
            return config
    except (LookupError, AppRegistryNotReady, ImproperlyConfigured):
        pass
    return None


def get_config(param=None):
    config = get_config_instance()

    if param:
        if config is not None:
            value = getattr(config, param, None)
        else:
            value = _installed_values.get(param)
        if value is None:
            value = getattr(copulasurv_config_cls, param, None)
        return value

    return config


def config_snapshot():
    """
    Current value of every tunable, for installing in worker processes
    """
    return dict((name, get_config(name)) for name in TUNABLES)


def install_config(values):
    """
    Process pool initializer: make get_config answer with the parent's values
    """
    _installed_values.clear()
    _installed_values.update(values)


def default_threads():
    """
    Worker count: environment variable first, then the config
    """
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            threads = int(value)
        except ValueError:
            threads = 0
        if threads < 1:
            raise DomainError('%s must be a positive integer, got "%s"' % (THREADS_ENV, value))
        return threads
    return get_config('threads') or 1


def set_config_value(name, value):
    config = get_config()
    if config is None:
        raise LookupError('copulasurv is not installed or Django is not set up')
    # Store previous value to reset later if needed
    prev_value_key = '_%s' % name
    if not hasattr(config, prev_value_key):
        setattr(config, prev_value_key, getattr(config, name))
    setattr(config, name, value)


def reset_config_value(name):
    config = get_config()
    if config is None:
        return
    prev_value_key = '_%s' % name
    if hasattr(config, prev_value_key):
        setattr(config, name, getattr(config, prev_value_key))
        del config.__dict__[prev_value_key]
