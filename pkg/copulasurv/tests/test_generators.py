import math
import time

import numpy as np
from django.test import SimpleTestCase

from copulasurv.apps import CLAYTON, GUMBEL, INVGAUSS
from copulasurv.exceptions import DomainError, SingularPointError, TableSizeError
from copulasurv.generators import (GeneratorFamily, kendall_tau, log_abs_phi_deriv, log_neg_phi_prime, log_phi,
                                   phi, phi_deriv_k, phi_inv, phi_inv_log, pvf_coefficients, pvf_log_deriv,
                                   table_for, theta_from_free, theta_jacobian, theta_to_free)


def clayton_oracle(theta, s, k):
    """
    log|phi^(k)(s)| = log prod_{j<k}(1 + j theta) - (1/theta + k) log(1 + theta s)
    """
    return sum(math.log(1.0 + j * theta) for j in range(k)) - (1.0 / theta + k) * math.log1p(theta * s)


def numeric_derivative(gen, s, k, h=1e-3):
    """
    k-th derivative by repeated central differences of lower-order analytic derivatives
    """
    lower = phi_deriv_k(gen, s + h, k - 1).value - phi_deriv_k(gen, s - h, k - 1).value
    return lower / (2.0 * h)


class GeneratorFamilyTestCase(SimpleTestCase):
    def test_domain(self):
        with self.assertRaises(DomainError):
            GeneratorFamily(CLAYTON, 0.0)
        with self.assertRaises(DomainError):
            GeneratorFamily(GUMBEL, 1.0)
        with self.assertRaises(DomainError):
            GeneratorFamily('frank', 1.0)
        self.assertEqual(GeneratorFamily(GUMBEL, 0.5).with_theta(0.25).theta, 0.25)

    def test_pvf_params(self):
        self.assertEqual(GeneratorFamily(CLAYTON, 0.5).pvf_params, (0.0, 2.0, 2.0))
        self.assertEqual(GeneratorFamily(GUMBEL, 0.3).pvf_params, (0.3, 0.3, 0.0))
        alpha, delta, gamma = GeneratorFamily(INVGAUSS, 2.0).pvf_params
        self.assertEqual(alpha, 0.5)
        self.assertAlmostEqual(delta, 0.5)
        self.assertAlmostEqual(gamma, 0.25)

    def test_free_scale(self):
        for kind, theta in ((CLAYTON, 1.7), (GUMBEL, 0.8), (INVGAUSS, 0.3)):
            x = theta_to_free(kind, theta)
            self.assertAlmostEqual(theta_from_free(kind, x), theta, places=12)
            h = 1e-6
            slope = (theta_from_free(kind, x + h) - theta_from_free(kind, x - h)) / (2 * h)
            self.assertAlmostEqual(theta_jacobian(kind, x), slope, places=6)
            self.assertEqual(GeneratorFamily.from_free(kind, x).kind, kind)

    def test_phi_endpoints_and_inverse(self):
        for gen in (GeneratorFamily(CLAYTON, 1.5), GeneratorFamily(GUMBEL, 0.4), GeneratorFamily(INVGAUSS, 0.8)):
            self.assertEqual(phi(gen, 0.0), 1.0)
            self.assertLess(phi(gen, 1e6), 1e-3)
            for u in (1e-12, 0.1, 0.5, 0.999):
                self.assertAlmostEqual(phi(gen, phi_inv(gen, u)) / u, 1.0, places=10)
            s = np.array([0.0, 0.5, 2.0, 40.0])
            np.testing.assert_allclose(phi_inv_log(gen, log_phi(gen, s)), s, rtol=1e-10, atol=1e-14)

    def test_inverse_round_trip_on_log_grid(self):
        u = np.logspace(-12, 0, 97)
        for gen in (GeneratorFamily(CLAYTON, 0.01), GeneratorFamily(CLAYTON, 5.0), GeneratorFamily(GUMBEL, 0.2),
                    GeneratorFamily(GUMBEL, 0.95), GeneratorFamily(INVGAUSS, 0.1), GeneratorFamily(INVGAUSS, 5.0)):
            np.testing.assert_allclose(phi(gen, phi_inv(gen, u)), u, rtol=1e-9, err_msg=str(gen))

    def test_clayton_closed_form(self):
        gen = GeneratorFamily(CLAYTON, 1.0)
        self.assertAlmostEqual(phi(gen, 1.0), 0.5)
        self.assertAlmostEqual(phi_inv(gen, 0.5), 1.0)


class CoefficientTableTestCase(SimpleTestCase):
    def test_low_orders(self):
        alpha = 0.3
        table = pvf_coefficients(3, alpha)
        self.assertEqual(table.coefficient(1, 1), 1.0)
        self.assertAlmostEqual(table.coefficient(2, 1), 1 - alpha)
        self.assertEqual(table.coefficient(2, 2), 1.0)
        self.assertAlmostEqual(table.coefficient(3, 1), (1 - alpha) * (2 - alpha))
        self.assertAlmostEqual(table.coefficient(3, 2), 3 * (1 - alpha))
        self.assertEqual(table.coefficient(3, 3), 1.0)

    def test_gamma_limit_gives_stirling_numbers(self):
        table = pvf_coefficients(4, 0.0)
        # unsigned Stirling numbers of the first kind, row 4
        for j, expected in zip(range(1, 5), (6, 11, 6, 1)):
            self.assertAlmostEqual(table.coefficient(4, j), expected)

    def test_read_only_and_bounds(self):
        table = pvf_coefficients(5, 0.5)
        with self.assertRaises(ValueError):
            table.entries[1, 1] = 2.0
        with self.assertRaises(TableSizeError):
            table.log_coefficient(6, 1)
        with self.assertRaises(DomainError):
            pvf_coefficients(3, 1.0)
        with self.assertRaises(DomainError):
            pvf_coefficients(0, 0.5)

    def test_high_orders_are_finite_and_positive(self):
        for alpha in (0.0, 0.25, 0.5, 0.9):
            table = pvf_coefficients(200, alpha)
            for k in range(1, 201):
                # log-coefficients: finite means positive
                row = table.entries[k, 1:k + 1]
                self.assertTrue(np.all(np.isfinite(row)), 'alpha=%g k=%d' % (alpha, k))
                self.assertAlmostEqual(table.coefficient(k, k), 1.0, places=10)

    def test_cached(self):
        self.assertIs(pvf_coefficients(7, 0.25), pvf_coefficients(7, 0.25))


class DerivativeTestCase(SimpleTestCase):
    def test_clayton_pvf_path_matches_product_oracle(self):
        table = pvf_coefficients(60, 0.0)
        for theta in (0.2, 1.0, 1.5):
            params = GeneratorFamily(CLAYTON, theta).pvf_params
            for s in (0.0, 0.5, 2.0):
                k = np.arange(1, 61)
                pvf = pvf_log_deriv(params, np.full(60, s), k, table)
                oracle = np.array([clayton_oracle(theta, s, int(order)) for order in k])
                np.testing.assert_allclose(pvf, oracle, rtol=1e-10, atol=1e-12)
                closed = log_abs_phi_deriv(GeneratorFamily(CLAYTON, theta), np.full(60, s), k)
                np.testing.assert_allclose(closed, oracle, rtol=1e-10, atol=1e-12)

    def test_signs_alternate(self):
        for gen in (GeneratorFamily(CLAYTON, 0.7), GeneratorFamily(GUMBEL, 0.5), GeneratorFamily(INVGAUSS, 1.2)):
            for s in (0.05, 0.8, 10.0):
                for k in range(0, 51):
                    value = phi_deriv_k(gen, s, k)
                    self.assertEqual(value.sign, (-1) ** k, '%s s=%g k=%d' % (gen, s, k))
                    self.assertTrue(np.isfinite(value.log_magnitude))

    def test_finite_differences(self):
        for gen in (GeneratorFamily(GUMBEL, 0.3), GeneratorFamily(GUMBEL, 0.8),
                    GeneratorFamily(INVGAUSS, 0.5), GeneratorFamily(INVGAUSS, 2.0)):
            for s in (0.5, 2.0):
                for k in range(1, 5):
                    exact = phi_deriv_k(gen, s, k).value
                    numeric = numeric_derivative(gen, s, k, h=1e-4 * s)
                    self.assertAlmostEqual(numeric / exact, 1.0, delta=1e-5,
                                           msg='%s k=%d s=%g' % (gen, k, s))

    def test_first_derivative_companion(self):
        for gen in (GeneratorFamily(CLAYTON, 0.7), GeneratorFamily(GUMBEL, 0.5), GeneratorFamily(INVGAUSS, 1.2)):
            s = np.array([0.1, 1.0, 5.0])
            np.testing.assert_allclose(log_neg_phi_prime(gen, s), log_abs_phi_deriv(gen, s, np.ones(3, dtype=int)),
                                       rtol=1e-12)

    def test_gumbel_singular_at_zero(self):
        gen = GeneratorFamily(GUMBEL, 0.5)
        with self.assertRaises(SingularPointError):
            phi_deriv_k(gen, 0.0, 1)
        with self.assertRaises(SingularPointError):
            log_neg_phi_prime(gen, 0.0)
        self.assertEqual(phi_deriv_k(gen, 0.0, 0).value, 1.0)

    def test_table_too_small(self):
        gen = GeneratorFamily(INVGAUSS, 1.0)
        with self.assertRaises(TableSizeError):
            phi_deriv_k(gen, 1.0, 4, table_for(gen, 3))
        with self.assertRaises(DomainError):
            phi_deriv_k(gen, 1.0, 2, pvf_coefficients(3, 0.25))

    def test_high_order_clayton_stays_finite(self):
        gen = GeneratorFamily(CLAYTON, 0.2)
        start = time.time()
        value = phi_deriv_k(gen, 174 * 0.3, 174)
        self.assertTrue(np.isfinite(value.log_magnitude))
        self.assertEqual(value.sign, 1)
        self.assertLess(time.time() - start, 0.1)

    def test_high_order_pvf_stays_finite(self):
        for gen in (GeneratorFamily(GUMBEL, 0.5), GeneratorFamily(INVGAUSS, 0.5)):
            value = phi_deriv_k(gen, 60.0, 174)
            self.assertTrue(np.isfinite(value.log_magnitude))


class KendallTauTestCase(SimpleTestCase):
    def test_closed_forms(self):
        for theta in (0.2, 1.0, 2.0):
            self.assertAlmostEqual(kendall_tau(GeneratorFamily(CLAYTON, theta)), theta / (theta + 2.0), places=6)
        for theta in (0.2, 0.5, 0.8):
            self.assertAlmostEqual(kendall_tau(GeneratorFamily(GUMBEL, theta)), 1.0 - theta, places=6)

    def test_near_independence(self):
        self.assertAlmostEqual(kendall_tau(GeneratorFamily(CLAYTON, 1e-6)), 0.0, places=6)

    def test_inverse_gaussian_range(self):
        low = kendall_tau(GeneratorFamily(INVGAUSS, 0.1))
        high = kendall_tau(GeneratorFamily(INVGAUSS, 5.0))
        self.assertTrue(0.0 < low < high < 0.5)
