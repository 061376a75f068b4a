import os

from django.test import SimpleTestCase

from copulasurv.apps import CLAYTON, CopulaSurvConfig
from copulasurv.config import (THREADS_ENV, TUNABLES, config_snapshot, default_threads, get_config,
                               get_config_instance, reset_config_value, set_config_value)
from copulasurv.exceptions import DomainError


class ConfigTestCase(SimpleTestCase):
    def tearDown(self):
        reset_config_value('max_iterations')
        os.environ.pop(THREADS_ENV, None)

    def test_installed_config(self):
        self.assertIsInstance(get_config_instance(), CopulaSurvConfig)
        self.assertIsInstance(get_config(), CopulaSurvConfig)

    def test_unknown_app_has_no_config(self):
        self.assertIsNone(get_config_instance('no_such_app'))

    def test_defaults(self):
        self.assertEqual(get_config('max_iterations'), 200)
        self.assertEqual(get_config('fd_step'), 1e-5)
        self.assertEqual(get_config('theta_search_bounds')[CLAYTON], (1e-3, 20.0))
        self.assertIsNone(get_config('jackknife_groups'))

    def test_set_and_reset(self):
        set_config_value('max_iterations', 5)
        self.assertEqual(get_config('max_iterations'), 5)
        set_config_value('max_iterations', 7)
        reset_config_value('max_iterations')
        self.assertEqual(get_config('max_iterations'), 200)

    def test_snapshot_carries_overrides(self):
        set_config_value('max_iterations', 5)
        snapshot = config_snapshot()
        self.assertEqual(sorted(snapshot), sorted(TUNABLES))
        self.assertEqual(snapshot['max_iterations'], 5)
        self.assertEqual(snapshot['fd_step'], 1e-5)

    def test_threads_environment_wins(self):
        os.environ[THREADS_ENV] = '3'
        self.assertEqual(default_threads(), 3)
        for value in ('many', '0', '-2'):
            os.environ[THREADS_ENV] = value
            with self.assertRaises(DomainError):
                default_threads()
        del os.environ[THREADS_ENV]
        self.assertEqual(default_threads(), 1)
