"""
Exact cluster log-likelihood of the Archimedean copula model for clusters of
any size, written through generator derivatives:

    log L_i = sum_j delta_ij [log f_ij - log(-phi'(phi^-1(S_ij)))]
              + log|phi^(d_i)(sum_j phi^-1(S_ij))|

Margins without a density (the Cox plug-in) contribute only the generator
factors, which is the semiparametric stage-2 likelihood.
"""
import logging
import math

import numpy as np

from copulasurv.config import get_config
from copulasurv.exceptions import BoundaryError, NumericalError, TableSizeError, UnderflowError
from copulasurv.generators import (GeneratorFamily, log_abs_phi_deriv, log_neg_phi_prime, phi_deriv_k,
                                   phi_inv_log, table_for)
from copulasurv.apps import GUMBEL

logger = logging.getLogger(__name__)


class ClusterWorkspace(object):
    """
    Per-cluster arguments of the generator factors
    """

    def __init__(self, log_s, log_densities, status, s_inverse):
        self.log_s = log_s
        self.log_densities = log_densities
        self.status = status
        self.s_inverse = s_inverse

    @property
    def s_values(self):
        return np.exp(self.log_s)

    @property
    def d(self):
        return int(self.status.sum())

    @property
    def t_sum(self):
        return math.fsum(self.s_inverse)


def _resolve_table(gen, max_events, table):
    if table is None:
        return table_for(gen, max_events)
    if max_events > table.max_order:
        raise TableSizeError('Cluster has %d events but the coefficient table stops at order %d' %
                             (max_events, table.max_order))
    return table


def _margin_terms(margin, times, covariates, status):
    log_s = np.asarray(margin.log_survival(times, covariates), dtype=float).reshape(-1)
    if margin.has_density:
        log_f = np.asarray(margin.log_density(times, covariates), dtype=float).reshape(-1)
    else:
        log_f = np.zeros_like(log_s)
    floor = math.log(get_config('survival_floor'))
    below = np.flatnonzero(~(log_s >= floor))
    if below.size:
        index = int(below[0])
        raise UnderflowError('Marginal survival underflows the floor %g at subject %d (log S=%r)' %
                             (get_config('survival_floor'), index, log_s[index]), subject_index=index)
    return log_s, log_f


def _subject_terms(gen, log_f, status, s_inverse):
    terms = np.zeros_like(s_inverse)
    events = status == 1
    if np.any(events):
        terms[events] = log_f[events] - log_neg_phi_prime(gen, s_inverse[events])
    return terms


def cluster_workspace(gen, margin, cluster):
    times, status, covariates = cluster.arrays(margin.n_covariates)
    log_s, log_f = _margin_terms(margin, times, covariates, status)
    return ClusterWorkspace(log_s, np.where(status == 1, log_f, 0.0), status,
                            np.atleast_1d(phi_inv_log(gen, log_s)))


def cluster_loglik(gen, margin, cluster, table=None):
    """
    log L_i of one cluster

    :type gen: GeneratorFamily
    :type cluster: copulasurv.data.Cluster
    :rtype: float
    """
    try:
        workspace = cluster_workspace(gen, margin, cluster)
    except UnderflowError as error:
        raise error.with_cluster(cluster.id)
    d = workspace.d
    table = _resolve_table(gen, d, table)
    terms = _subject_terms(gen, workspace.log_densities, workspace.status, workspace.s_inverse)
    derivative = phi_deriv_k(gen, workspace.t_sum, d, table)
    if derivative.sign != (-1) ** d:
        raise NumericalError('Generator derivative of order %d has sign %d in cluster %s' %
                             (d, derivative.sign, cluster.id))
    value = math.fsum(terms) + derivative.log_magnitude
    if not np.isfinite(value):
        raise NumericalError('Non-finite log-likelihood in cluster %s' % cluster.id)
    return value


def cluster_logliks(gen, margin, data, table=None):
    """
    Vector of log L_i over the clusters of a dataset, in cluster-id order
    """
    table = _resolve_table(gen, data.max_events, table)
    try:
        log_s, log_f = _margin_terms(margin, data.times, data.covariates, data.status)
    except UnderflowError as error:
        raise error.with_cluster(data.clusters[data.cluster_index[error.subject_index]].id)
    s_inverse = np.asarray(phi_inv_log(gen, log_s), dtype=float).reshape(-1)
    t_sum = np.bincount(data.cluster_index, weights=s_inverse, minlength=data.n_clusters)
    terms = _subject_terms(gen, log_f, data.status, s_inverse)
    with np.errstate(invalid='ignore', over='ignore'):
        values = np.bincount(data.cluster_index, weights=terms, minlength=data.n_clusters) + \
            log_abs_phi_deriv(gen, t_sum, data.cluster_events, table)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NumericalError('Non-finite log-likelihood in cluster %s (%s theta=%g)' %
                             (data.clusters[bad[0]].id, gen.kind, gen.theta))
    return values


def total_loglik(gen, margin, data, table=None):
    """
    sum_i log L_i with exactly rounded summation in cluster-id order

    :type gen: GeneratorFamily
    :type data: copulasurv.data.Dataset
    :rtype: float
    """
    return math.fsum(cluster_logliks(gen, margin, data, table))


def theta_domain(family):
    if family == GUMBEL:
        return 0.0, 1.0
    return 0.0, np.inf


def profile_score_theta(family, margin, data, theta, step=None):
    """
    d/d theta of total_loglik with the margin held fixed, by central differences.
    The step shrinks near the edge of the family's domain.
    """
    if step is None:
        step = get_config('fd_step')
    theta = float(theta)
    lower, upper = theta_domain(family)
    if not lower < theta < upper:
        raise BoundaryError('theta=%r outside the %s domain' % (theta, family))
    h = max(step, step * abs(theta))
    room = min(theta - lower, upper - theta)
    if h >= room:
        h = 0.5 * room
        if h < 1e-12 * max(1.0, theta):
            raise BoundaryError('theta=%r too close to the %s boundary for a central difference' % (theta, family))
        logger.debug('Score step for theta=%g shrunk to %g', theta, h)

    def loglik(value):
        return total_loglik(GeneratorFamily(family, value), margin, data)

    return (loglik(theta + h) - loglik(theta - h)) / (2.0 * h)
