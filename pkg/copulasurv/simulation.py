"""
Clustered survival data from Archimedean copulas with Weibull margins,
drawn with the Marshall-Olkin mixture construction: W ~ G_theta, iid unit
exponentials E_j, U_j = phi_theta(E_j / W), T_j = S^-1(U_j | Z_j), and
optional independent Weibull censoring.

Randomness comes from counter-based Philox streams keyed by
(seed, replicate) for the cluster sizes and (seed, replicate, cluster) for
the cluster contents, so a dataset depends on nothing but its key.
"""
import logging
import math
from collections import OrderedDict

import numpy as np

from copulasurv.apps import CLAYTON, GUMBEL, METHODS
from copulasurv.config import get_config
from copulasurv.data import Cluster, Dataset, Subject
from copulasurv.estimators import fit
from copulasurv.exceptions import CopulaSurvError, DomainError, ReplicationError
from copulasurv.generators import GeneratorFamily, log_phi
from copulasurv.margins import WeibullMargin
from copulasurv.parallel import Failure, ordered_map

logger = logging.getLogger(__name__)

COVARIATE_NAME = 'z'
Z_975 = 1.959963984540054


def random_stream(seed, *key):
    """
    Independent numpy Generator for a (seed, key...) pair
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(key))))


class SimulationConfig(object):
    """
    One simulation design.

    :type margin: WeibullMargin
    :type censoring: (float, float) or None
    """

    def __init__(self, family, theta0, n_clusters=200, size_min=2, size_max=50, margin=None,
                 covariate_probability=None, censoring=None, seed=None, replicates=1):
        self.generator = GeneratorFamily(family, theta0)
        self.n_clusters = int(n_clusters)
        self.size_min = int(size_min)
        self.size_max = int(size_max)
        if self.n_clusters < 1:
            raise DomainError('Number of clusters must be positive, got %d' % self.n_clusters)
        if not 1 <= self.size_min <= self.size_max:
            raise DomainError('Cluster sizes need 1 <= size_min <= size_max, got %d..%d' %
                              (self.size_min, self.size_max))
        self.margin = margin if margin is not None else WeibullMargin(0.0316, 1.5, [3.0])
        if self.margin.n_covariates > 1:
            raise DomainError('Simulated margins carry at most one dichotomous covariate')
        if covariate_probability is None:
            covariate_probability = get_config('covariate_probability')
        self.covariate_probability = float(covariate_probability)
        if not 0.0 <= self.covariate_probability <= 1.0:
            raise DomainError('Covariate probability must lie in [0, 1], got %r' % self.covariate_probability)
        if censoring is not None:
            censoring = (float(censoring[0]), float(censoring[1]))
            if not censoring[0] > 0.0 or not censoring[1] > 0.0:
                raise DomainError('Censoring lambda_C and rho_C must be positive, got %r' % (censoring,))
        self.censoring = censoring
        self.seed = int(get_config('default_seed') if seed is None else seed)
        if self.seed < 0:
            raise DomainError('Seed must be nonnegative, got %d' % self.seed)
        self.replicates = int(replicates)
        if self.replicates < 1:
            raise DomainError('Replicate count must be positive, got %d' % self.replicates)

    def __repr__(self):
        return 'SimulationConfig(%s, theta0=%g, K=%d, sizes=%d..%d, censoring=%r, seed=%d, R=%d)' % (
            self.family, self.theta0, self.n_clusters, self.size_min, self.size_max,
            self.censoring, self.seed, self.replicates)

    @property
    def family(self):
        return self.generator.kind

    @property
    def theta0(self):
        return self.generator.theta

    @property
    def covariate_names(self):
        return (COVARIATE_NAME,) if self.margin.n_covariates else ()

    @classmethod
    def from_scenario(cls, scenario, **kwargs):
        """
        :type scenario: copulasurv.scenarios.Scenario or str
        """
        from copulasurv.scenarios import get_scenario
        if not hasattr(scenario, 'family'):
            scenario = get_scenario(scenario)
        return cls(scenario.family, scenario.theta0, n_clusters=scenario.n_clusters,
                   censoring=scenario.censoring, **kwargs)

    def as_dict(self):
        return OrderedDict([
            ('copula', self.family),
            ('theta', self.theta0),
            ('clusters', self.n_clusters),
            ('size_min', self.size_min),
            ('size_max', self.size_max),
            ('lambda', self.margin.lam),
            ('rho', self.margin.rho),
            ('beta', self.margin.beta.tolist()),
            ('covariate_probability', self.covariate_probability),
            ('censor_lambda', self.censoring[0] if self.censoring else None),
            ('censor_rho', self.censoring[1] if self.censoring else None),
            ('seed', self.seed),
            ('replicates', self.replicates),
        ])


def sample_mixing_variable(family, theta, rng, size=None):
    """
    Draws of W with E[exp(-tW)] = phi_theta(t): gamma(1/theta, theta) for
    Clayton, positive stable(theta) for Gumbel-Hougaard, inverse Gaussian
    with mean 1 and variance theta otherwise.

    :type rng: numpy.random.Generator
    """
    theta = GeneratorFamily(family, theta).theta
    if family == CLAYTON:
        return rng.gamma(1.0 / theta, theta, size)
    if family == GUMBEL:
        # Kanter's representation; U on (0, pi]
        u = math.pi * (1.0 - rng.random(size))
        e = rng.standard_exponential(size)
        return np.sin(theta * u) / np.sin(u) ** (1.0 / theta) * \
            (np.sin((1.0 - theta) * u) / e) ** ((1.0 - theta) / theta)
    # numpy draws the Wald distribution by transformation with rejection
    return rng.wald(1.0, 1.0 / theta, size)


def sample_log_uniforms(gen, rng, n, n_clusters=None):
    """
    log U_j = log phi(E_j / W) for n members of one cluster, or an
    (n_clusters, n) array with one W per row
    """
    w = sample_mixing_variable(gen.kind, gen.theta, rng, n_clusters)
    if n_clusters is None:
        return log_phi(gen, rng.standard_exponential(n) / w)
    return log_phi(gen, rng.standard_exponential((n_clusters, n)) / np.asarray(w)[:, None])


def event_times(cfg, log_u, covariates):
    """
    T_j = S^-1(U_j | Z_j)
    """
    times = cfg.margin.inverse_survival(log_u, covariates)
    # times stay positive
    return np.maximum(times, np.finfo(float).tiny)


def sample_cluster(cfg, n, rng, cluster_id='1'):
    """
    :type cfg: SimulationConfig
    :rtype: Cluster
    """
    if n < 1:
        raise DomainError('Cluster size must be positive, got %d' % n)
    log_u = sample_log_uniforms(cfg.generator, rng, n)
    p = cfg.margin.n_covariates
    covariates = (rng.random((n, p)) < cfg.covariate_probability).astype(float)
    times = event_times(cfg, log_u, covariates)
    status = np.ones(n, dtype=int)
    if cfg.censoring is not None:
        lam_c, rho_c = cfg.censoring
        censor = (rng.standard_exponential(n) / lam_c) ** (1.0 / rho_c)
        status = (times <= censor).astype(int)
        times = np.minimum(times, censor)
    return Cluster(cluster_id, [Subject(t, d, z) for t, d, z in zip(times, status, covariates)])


def cluster_label(index, n_clusters):
    # zero-padded so string order equals generation order
    return '%0*d' % (len(str(n_clusters)), index + 1)


def generate_dataset(cfg, replicate=0):
    """
    Dataset number ``replicate`` of the design; a pure function of
    (cfg, replicate)

    :rtype: Dataset
    """
    sizes = random_stream(cfg.seed, replicate).integers(cfg.size_min, cfg.size_max, size=cfg.n_clusters,
                                                        endpoint=True)
    clusters = [sample_cluster(cfg, int(n), random_stream(cfg.seed, replicate, i), cluster_label(i, cfg.n_clusters))
                for i, n in enumerate(sizes)]
    return Dataset(clusters, cfg.covariate_names)


class MethodSummary(object):
    """
    Replication results of one estimation method
    """

    def __init__(self, method, theta0, estimates, standard_errors, failures):
        self.method = method
        self.theta0 = theta0
        self.estimates = list(estimates)
        self.standard_errors = list(standard_errors)
        self.failures = list(failures)

    @property
    def successes(self):
        return len(self.estimates)

    @property
    def replicates(self):
        return self.successes + len(self.failures)

    @property
    def mean(self):
        return math.fsum(self.estimates) / self.successes if self.successes else None

    @property
    def mean_se(self):
        return math.fsum(self.standard_errors) / self.successes if self.successes else None

    @property
    def bias(self):
        return None if self.mean is None else self.mean - self.theta0

    @property
    def empirical_sd(self):
        """
        None when fewer than two replicates succeeded
        """
        if self.successes < 2:
            return None
        mean = self.mean
        return math.sqrt(math.fsum((x - mean) ** 2 for x in self.estimates) / (self.successes - 1))

    @property
    def coverage(self):
        if not self.successes:
            return None
        covered = sum(1 for x, se in zip(self.estimates, self.standard_errors)
                      if abs(x - self.theta0) <= Z_975 * se)
        return covered / float(self.successes)

    def as_dict(self):
        return OrderedDict([
            ('method', self.method),
            ('mean', self.mean),
            ('mean_se', self.mean_se),
            ('empirical_sd', self.empirical_sd),
            ('coverage', self.coverage),
            ('bias', self.bias),
            ('replicates', self.replicates),
            ('successes', self.successes),
            ('failures', len(self.failures)),
            ('failure_messages', list(self.failures)),
        ])


class ReplicationSummary(object):
    """
    :type methods: list of MethodSummary
    """

    def __init__(self, config, methods, warnings=None):
        self.config = config
        self.methods = methods
        self.warnings = list(warnings or [])

    def __getitem__(self, method):
        for summary in self.methods:
            if summary.method == method:
                return summary
        raise KeyError(method)

    def as_dict(self):
        return OrderedDict([
            ('config', self.config.as_dict()),
            ('methods', [summary.as_dict() for summary in self.methods]),
            ('warnings', list(self.warnings)),
        ])


class ReplicateTask(object):
    """
    Generate one replicate dataset and fit it with every requested method.
    Returns {method: (estimate, se) or error message}.
    """

    def __init__(self, cfg, methods, jackknife_groups=None):
        self.cfg = cfg
        self.methods = methods
        self.jackknife_groups = jackknife_groups

    def __call__(self, replicate):
        data = generate_dataset(self.cfg, replicate)
        outcome = OrderedDict()
        for method in self.methods:
            try:
                report = fit(method, self.cfg.family, data, jackknife_groups=self.jackknife_groups)
            except CopulaSurvError as error:
                outcome[method] = '%s: %s' % (error.__class__.__name__, error)
                continue
            if report.converged:
                outcome[method] = (report.theta, report.theta_se)
            else:
                outcome[method] = 'not converged: %s' % '; '.join(report.warnings)
        return outcome


def _ordered_methods(methods):
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise DomainError('Unknown methods: %s' % ', '.join(sorted(unknown)))
    return [method for method in METHODS if method in methods]


def run_replication(cfg, methods=METHODS, threads=1, jackknife_groups=None, mp_context=None):
    """
    Fit cfg.replicates generated datasets with each method and summarize
    theta estimates. Replicate r always uses the streams keyed by
    (cfg.seed, r), so the summary is identical for any worker count.

    :type cfg: SimulationConfig
    :rtype: ReplicationSummary
    """
    methods = _ordered_methods(methods)
    results = ordered_map(ReplicateTask(cfg, methods, jackknife_groups), range(cfg.replicates), threads,
                          mp_context=mp_context)
    warnings = []
    collected = OrderedDict((method, ([], [], [])) for method in methods)
    for replicate, result in enumerate(results):
        for method in methods:
            estimates, errors, failures = collected[method]
            if isinstance(result, Failure):
                outcome = result.message
            else:
                outcome = result[method]
            if isinstance(outcome, tuple):
                estimates.append(outcome[0])
                errors.append(outcome[1])
            else:
                message = 'replicate %d %s: %s' % (replicate, method, outcome)
                logger.warning(message)
                failures.append(message)
                warnings.append(message)
    summaries = [MethodSummary(method, cfg.theta0, *collected[method]) for method in methods]
    limit = get_config('replicate_failure_limit')
    for summary in summaries:
        if len(summary.failures) > limit * summary.replicates:
            raise ReplicationError('%d of %d %s replicates failed; first: %s' %
                                   (len(summary.failures), summary.replicates, summary.method, summary.failures[0]))
    return ReplicationSummary(cfg, summaries, warnings)
