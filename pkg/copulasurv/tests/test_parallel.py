import multiprocessing

from django.test import SimpleTestCase

from copulasurv.config import get_config, reset_config_value, set_config_value
from copulasurv.exceptions import NumericalError
from copulasurv.parallel import Failure, ordered_map


def reciprocal(x):
    if x == 0:
        raise NumericalError('no reciprocal of zero')
    return 1.0 / x


def misspelled(x):
    return x.no_such_attribute


class OrderedMapTestCase(SimpleTestCase):
    def tearDown(self):
        reset_config_value('fd_step')
        reset_config_value('theta_grid_size')

    def test_order_and_captured_failures(self):
        for threads in (1, 3):
            results = ordered_map(reciprocal, [1, 0, 4, 2], threads)
            self.assertEqual([results[0], results[2], results[3]], [1.0, 0.25, 0.5])
            self.assertIsInstance(results[1], Failure)
            self.assertEqual(results[1].index, 1)
            self.assertEqual(results[1].message, 'NumericalError: no reciprocal of zero')

    def test_programming_errors_propagate(self):
        for threads in (1, 2):
            with self.assertRaises(AttributeError):
                ordered_map(misspelled, [1, 2], threads)

    def test_workers_get_overridden_tunables(self):
        set_config_value('fd_step', 5e-2)
        set_config_value('theta_grid_size', 2)
        for method in ('spawn', 'fork'):
            if method not in multiprocessing.get_all_start_methods():
                continue
            context = multiprocessing.get_context(method)
            results = ordered_map(get_config, ['fd_step', 'theta_grid_size'], threads=2, mp_context=context)
            self.assertEqual(results, [5e-2, 2], method)
