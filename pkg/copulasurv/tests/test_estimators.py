from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from copulasurv.apps import CLAYTON, GUMBEL, ONE_STAGE, SEMIPARAM, TWO_STAGE
from copulasurv.data import Cluster, Dataset, Subject
from copulasurv.estimators import (InformationBlocks, fit, fit_one_stage, fit_two_stage_parametric,
                                   fit_two_stage_semiparametric, grouped_jackknife_se, jackknife_groups,
                                   one_stage_variance, two_stage_variance)
from copulasurv.exceptions import (BoundaryError, ConvergenceError, DomainError, IdentifiabilityError, NumericalError,
                                   SingularityError)
from copulasurv.generators import theta_jacobian, theta_to_free
from copulasurv.margins import fit_weibull_independence
from copulasurv.tests.utils import simulated


def cluster_mean_time(data):
    return np.mean([np.mean([s.time for s in cluster]) for cluster in data])


def flaky_refitter(data):
    if 'c00' not in data.cluster_ids:
        raise NumericalError('refit failed')
    return cluster_mean_time(data)


def broken_refitter(data):
    return cluster_mean_time(data) + None


class VarianceFormulaTestCase(SimpleTestCase):
    def test_one_stage_equals_inverse_information(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            q = rng.integers(1, 6)
            a = rng.normal(size=(q + 1, q + 1))
            information = a.dot(a.T) + (q + 1) * np.eye(q + 1)
            blocks = InformationBlocks.from_hessian(-information)
            expected = np.linalg.inv(information)[-1, -1]
            self.assertAlmostEqual(one_stage_variance(blocks), expected, delta=1e-10 * max(1.0, expected))

    def test_blocks_round_trip(self):
        information = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
        blocks = InformationBlocks.from_hessian(-information)
        self.assertEqual(blocks.I_tt, 2.0)
        np.testing.assert_array_equal(blocks.I_bt, [0.5, 0.2])
        np.testing.assert_array_equal(blocks.full(), information)

    def test_two_stage_without_cross_information(self):
        sandwich = np.array([[2.0, 0.3], [0.3, 1.0]])
        self.assertEqual(two_stage_variance(4.0, np.zeros(2), sandwich), 0.25)

    def test_two_stage_correction(self):
        sandwich = np.array([[2.0, 0.0], [0.0, 1.0]])
        self.assertAlmostEqual(two_stage_variance(2.0, np.array([1.0, 2.0]), sandwich), 0.5 + 6.0 / 4.0)

    def test_singular(self):
        with self.assertRaises(SingularityError):
            two_stage_variance(0.0, np.zeros(1), np.eye(1))
        with self.assertRaises(SingularityError):
            one_stage_variance(InformationBlocks(np.zeros((2, 2)), np.zeros(2), 1.0))


class JackknifeTestCase(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(8)
        clusters = [Cluster('c%02d' % i, [Subject(t, 1) for t in rng.exponential(size=rng.integers(1, 5))])
                    for i in range(30)]
        self.data = Dataset(clusters)

    def test_linear_statistic_matches_standard_error(self):
        means = np.array([np.mean([s.time for s in cluster]) for cluster in self.data])
        result = grouped_jackknife_se(cluster_mean_time, self.data)
        expected = means.std(ddof=1) / np.sqrt(len(means))
        self.assertAlmostEqual(result.se, expected, places=10)
        self.assertEqual(len(result.replicates), 30)
        self.assertEqual(result.failures, [])

    def test_groups(self):
        groups = jackknife_groups(10, 3)
        self.assertEqual([list(g) for g in groups], [[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]])
        self.assertEqual(len(jackknife_groups(10, None)), 10)
        with self.assertRaises(DomainError):
            jackknife_groups(10, 11)
        with self.assertRaises(DomainError):
            jackknife_groups(10, 1)

    def test_grouped_deletion(self):
        result = grouped_jackknife_se(cluster_mean_time, self.data, g=6)
        self.assertEqual(len(result.replicates), 6)
        self.assertGreater(result.se, 0.0)

    def test_failures_above_limit(self):
        # deleting cluster c00 fails: one failure in three groups
        with self.assertRaises(ConvergenceError):
            grouped_jackknife_se(flaky_refitter, self.data, g=3)

    def test_rare_failures_are_excluded(self):
        result = grouped_jackknife_se(flaky_refitter, self.data)
        self.assertEqual(len(result.failures), 1)
        self.assertEqual(len(result.replicates), 29)
        self.assertEqual(len(result.warnings), 1)

    def test_vector_statistic(self):
        result = grouped_jackknife_se(lambda d: [cluster_mean_time(d), 2.0 * cluster_mean_time(d)], self.data)
        self.assertEqual(result.se.shape, (2,))
        self.assertAlmostEqual(result.se[1], 2.0 * result.se[0])

    def test_programming_errors_propagate(self):
        with self.assertRaises(TypeError):
            grouped_jackknife_se(broken_refitter, self.data)


class FitTestCase(SimpleTestCase):
    theta0 = 0.5

    @classmethod
    def setUpClass(cls):
        super(FitTestCase, cls).setUpClass()
        cls.data = simulated(CLAYTON, cls.theta0, n_clusters=100, seed=99)

    def assertNearTruth(self, report, z=4.0):
        self.assertTrue(report.converged, report.warnings)
        self.assertGreater(report.theta_se, 0.0)
        self.assertLess(abs(report.theta - self.theta0), z * report.theta_se,
                        '%s theta=%g se=%g' % (report.method, report.theta, report.theta_se))

    def test_two_stage_parametric(self):
        report = fit_two_stage_parametric(CLAYTON, self.data)
        self.assertNearTruth(report)
        self.assertEqual(report.method, TWO_STAGE)
        self.assertEqual(report.se_method, 'sandwich')
        self.assertEqual(list(report.estimates), ['lambda', 'rho', 'beta_z', 'theta'])
        self.assertAlmostEqual(report.estimates['rho'], 1.5, delta=0.15)
        self.assertAlmostEqual(report.estimates['beta_z'], 3.0, delta=0.4)
        self.assertAlmostEqual(report.hazard_ratios['z']['estimate'], np.exp(report.estimates['beta_z']))
        self.assertLess(abs(report.diagnostics['theta_score']), 1e-2)
        tau = report.diagnostics['kendall_tau']
        self.assertAlmostEqual(tau, report.theta / (report.theta + 2.0), places=5)
        self.assertGreater(report.diagnostics['theta_information'], 0.0)

    def test_one_stage(self):
        report = fit_one_stage(CLAYTON, self.data)
        self.assertNearTruth(report)
        self.assertEqual(report.method, ONE_STAGE)
        self.assertTrue(report.diagnostics['negative_definite'])
        two_stage = fit_two_stage_parametric(CLAYTON, self.data)
        self.assertGreaterEqual(report.loglik, two_stage.loglik - 1e-6)

    def test_one_stage_from_given_start(self):
        init = {'lambda': 0.05, 'rho': 1.2, 'beta_z': 2.0, 'theta': 1.0}
        report = fit_one_stage(CLAYTON, self.data, init=init)
        reference = fit_one_stage(CLAYTON, self.data)
        self.assertAlmostEqual(report.theta, reference.theta, places=4)

    def test_semiparametric(self):
        report = fit_two_stage_semiparametric(CLAYTON, self.data, jackknife_groups=10)
        self.assertNearTruth(report)
        self.assertEqual(report.method, SEMIPARAM)
        self.assertEqual(list(report.estimates), ['beta_z', 'theta'])
        self.assertGreater(report.standard_errors['beta_z'], 0.0)
        self.assertEqual(report.diagnostics['jackknife_groups'], 10)

    def test_dispatch(self):
        self.assertEqual(fit(TWO_STAGE, CLAYTON, self.data).method, TWO_STAGE)
        with self.assertRaises(DomainError):
            fit('three-stage', CLAYTON, self.data)

    def test_permutation_invariance(self):
        clusters = [Cluster(c.id, c.subjects[::-1]) for c in reversed(self.data.clusters)]
        shuffled = Dataset(clusters, self.data.covariate_names)
        a = fit_two_stage_parametric(CLAYTON, self.data)
        b = fit_two_stage_parametric(CLAYTON, shuffled)
        self.assertAlmostEqual(a.theta, b.theta, delta=1e-8)

    def test_report_dict(self):
        report = fit_two_stage_parametric(CLAYTON, self.data).as_dict()
        for key in ('method', 'copula', 'estimates', 'standard_errors', 'loglik', 'converged', 'iterations',
                    'warnings'):
            self.assertIn(key, report)

    def test_stage_one_margin_is_the_independence_fit(self):
        independence = fit_weibull_independence(self.data)
        free = independence.margin.to_free()
        report = fit_two_stage_parametric(CLAYTON, self.data)
        self.assertEqual(report.estimates['lambda'], float(np.exp(free[0])))
        self.assertEqual(report.estimates['rho'], float(np.exp(free[1])))
        self.assertEqual(report.estimates['beta_z'], float(free[2]))
        se_free = np.sqrt(np.diag(independence.robust_covariance))
        self.assertEqual(report.standard_errors['beta_z'], float(se_free[2]))

    def test_two_stage_variance_exceeds_inverse_information(self):
        for seed in (99, 100, 101):
            report = fit_two_stage_parametric(CLAYTON, simulated(CLAYTON, self.theta0, n_clusters=100, seed=seed))
            jacobian = theta_jacobian(CLAYTON, theta_to_free(CLAYTON, report.theta))
            variance_free = (report.theta_se / jacobian) ** 2
            bound = 1.0 / report.diagnostics['theta_information']
            self.assertGreaterEqual(variance_free, bound * (1.0 - 1e-8), 'seed %d' % seed)

    def test_kendall_tau_failure_is_reported(self):
        with mock.patch('copulasurv.estimators.kendall_tau', side_effect=NumericalError('quadrature diverged')):
            report = fit_two_stage_parametric(CLAYTON, self.data).as_dict()
        self.assertIsNone(report['diagnostics']['kendall_tau'])
        self.assertTrue(any('Kendall tau unavailable' in w and 'quadrature diverged' in w
                            for w in report['warnings']), report['warnings'])

    def test_theta_score_failure_is_reported(self):
        with mock.patch('copulasurv.estimators.profile_score_theta', side_effect=BoundaryError('step leaves domain')):
            for method in (TWO_STAGE, SEMIPARAM):
                report = fit(method, CLAYTON, self.data, jackknife_groups=5).as_dict()
                self.assertNotIn('theta_score', report['diagnostics'])
                self.assertTrue(any('theta score unavailable' in w and 'step leaves domain' in w
                                    for w in report['warnings']), report['warnings'])


class GumbelFitTestCase(SimpleTestCase):
    def test_two_stage_parametric(self):
        data = simulated(GUMBEL, 0.8, n_clusters=100, seed=5, censoring=(0.0274, 1.5))
        report = fit_two_stage_parametric(GUMBEL, data)
        self.assertTrue(report.converged)
        self.assertLess(abs(report.theta - 0.8), 4.0 * report.theta_se)
        self.assertAlmostEqual(report.diagnostics['kendall_tau'], 1.0 - report.theta, places=5)


class IdentifiabilityTestCase(SimpleTestCase):
    def test_singletons_only(self):
        data = Dataset([Cluster(str(i), [Subject(1.0 + i, 1, [i % 2])]) for i in range(20)], ['z'])
        for method in (ONE_STAGE, TWO_STAGE, SEMIPARAM):
            with self.assertRaises(IdentifiabilityError):
                fit(method, CLAYTON, data)

    def test_no_events(self):
        data = Dataset([Cluster(str(i), [Subject(1.0, 0), Subject(2.0, 0)]) for i in range(5)])
        with self.assertRaises(IdentifiabilityError):
            fit(TWO_STAGE, CLAYTON, data)
