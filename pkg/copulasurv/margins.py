"""
Marginal survival models S(t|Z): parametric Weibull with proportional
covariate effects, and semiparametric Cox with the Breslow baseline.

Covariates are time-fixed.
"""
import logging

import numpy as np
from scipy.optimize import minimize

from copulasurv.config import get_config
from copulasurv.exceptions import ConvergenceError, DivergenceError, DomainError, IdentifiabilityError

logger = logging.getLogger(__name__)


def _positive_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)):
        raise DomainError('Survival times must be positive')
    return t


def _linear_predictor(beta, z):
    z = np.asarray(z, dtype=float)
    if len(beta) == 0:
        return np.zeros(z.shape[:-1]) if z.ndim > 1 else 0.0
    return np.dot(z, beta)


class WeibullMargin(object):
    """
    S(t|Z) = exp(-lambda exp(beta'Z) t^rho)
    """
    has_density = True

    def __init__(self, lam, rho, beta=()):
        lam, rho = float(lam), float(rho)
        if not lam > 0.0 or not rho > 0.0 or not np.isfinite(lam) or not np.isfinite(rho):
            raise DomainError('Weibull lambda and rho must be positive, got lambda=%r rho=%r' % (lam, rho))
        self.lam = lam
        self.rho = rho
        self.beta = np.array(beta, dtype=float).reshape(-1)
        self.beta.setflags(write=False)

    def __repr__(self):
        return 'WeibullMargin(lam=%r, rho=%r, beta=%r)' % (self.lam, self.rho, list(self.beta))

    @property
    def n_covariates(self):
        return len(self.beta)

    def to_free(self):
        """
        Unconstrained coordinates (log lambda, log rho, beta)
        """
        return np.concatenate(([np.log(self.lam), np.log(self.rho)], self.beta))

    @classmethod
    def from_free(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(np.exp(x[0]), np.exp(x[1]), x[2:])

    def log_cumulative_hazard(self, t, z):
        t = _positive_times(t)
        return np.log(self.lam) + _linear_predictor(self.beta, z) + self.rho * np.log(t)

    def log_survival(self, t, z):
        return -np.exp(self.log_cumulative_hazard(t, z))

    def log_hazard(self, t, z):
        t = _positive_times(t)
        return np.log(self.lam * self.rho) + _linear_predictor(self.beta, z) + (self.rho - 1.0) * np.log(t)

    def log_density(self, t, z):
        return self.log_hazard(t, z) + self.log_survival(t, z)

    def inverse_survival(self, log_u, z):
        """
        Time t with log S(t|z) = log_u
        """
        log_u = np.asarray(log_u, dtype=float)
        scale = self.lam * np.exp(_linear_predictor(self.beta, z))
        return np.power(-log_u / scale, 1.0 / self.rho)


def weibull_log_survival(m, t, z):
    """
    :type m: WeibullMargin
    """
    return _as_float(m.log_survival(t, z))


def weibull_log_density(m, t, z):
    return _as_float(m.log_density(t, z))


def weibull_log_hazard(m, t, z):
    return _as_float(m.log_hazard(t, z))


def _as_float(value):
    return float(value) if np.ndim(value) == 0 else value


class WeibullIndependenceFit(object):
    """
    Stage-1 margin under working independence.

    ``cluster_scores`` holds the per-cluster score vectors U*_i and
    ``information`` the observed information I* divided by K, both on the
    free scale (log lambda, log rho, beta).
    """

    def __init__(self, margin, cluster_scores, information, loglik, iterations, trace):
        self.margin = margin
        self.cluster_scores = cluster_scores
        self.information = information
        self.loglik = loglik
        self.iterations = iterations
        self.trace = trace

    def __iter__(self):
        # (margin, cluster_scores, info) unpacking
        return iter((self.margin, self.cluster_scores, self.information))

    @property
    def n_clusters(self):
        return self.cluster_scores.shape[0]

    @property
    def score_variance(self):
        """
        V = K^-1 sum_i U*_i U*_i'
        """
        return np.dot(self.cluster_scores.T, self.cluster_scores) / self.n_clusters

    @property
    def robust_covariance(self):
        """
        Sandwich (I*)^-1 V (I*)^-1 / K: covariance of the free-scale stage-1 estimate
        """
        bread = np.linalg.inv(self.information)
        return bread.dot(self.score_variance).dot(bread) / self.n_clusters


def _weibull_terms(x, log_t, status, covariates, with_hessian=False):
    """
    Independence log-likelihood, per-subject scores and (optionally) the total Hessian at free point x
    """
    rho = np.exp(x[1])
    eta = x[0] + _linear_predictor(x[2:], covariates) + rho * log_t
    with np.errstate(over='ignore', invalid='ignore'):
        cum_hazard = np.exp(eta)
    loglik = np.sum(status * (x[0] + x[1] + _linear_predictor(x[2:], covariates) + (rho - 1.0) * log_t)) \
        - np.sum(cum_hazard)
    rho_log_t = rho * log_t
    residual = status - cum_hazard
    scores = np.column_stack([residual,
                              status * (1.0 + rho_log_t) - cum_hazard * rho_log_t,
                              covariates * residual[:, None]])
    if not with_hessian:
        return loglik, scores
    q = scores.shape[1]
    design = np.column_stack([np.ones_like(log_t), rho_log_t, covariates])
    hessian = -np.dot(design.T * cum_hazard, design)
    # second derivative in log rho picks up the d(rho)/d(log rho) term
    hessian[1, 1] += np.sum((status - cum_hazard) * rho_log_t)
    return loglik, scores, hessian.reshape(q, q)


def fit_weibull_independence(data):
    """
    Stage-1 Weibull fit treating all subjects as independent: BFGS from an
    exponential start, polished by Newton steps on the analytic Hessian.

    :type data: copulasurv.data.Dataset
    :rtype: WeibullIndependenceFit
    """
    if data.n_events == 0:
        raise IdentifiabilityError('Weibull margin is not identifiable: every subject is censored')
    max_iterations = get_config('max_iterations')
    param_tolerance = get_config('param_tolerance')
    score_tolerance = get_config('score_tolerance')

    log_t = np.log(data.times)
    status = data.status.astype(float)
    covariates = data.covariates
    x0 = np.concatenate(([np.log(data.n_events / np.sum(data.times)), 0.0], np.zeros(data.n_covariates)))

    def objective(x):
        loglik, scores = _weibull_terms(x, log_t, status, covariates)
        if not np.isfinite(loglik):
            return np.inf, np.zeros_like(x)
        return -loglik, -scores.sum(axis=0)

    result = minimize(objective, x0, jac=True, method='BFGS',
                      options={'maxiter': max_iterations, 'gtol': score_tolerance})
    x = result.x
    trace = [('bfgs', int(result.nit), float(-result.fun))]
    logger.debug('Weibull independence BFGS: %s after %d iterations', result.message, result.nit)

    converged = False
    iterations = int(result.nit)
    for iteration in range(max_iterations):
        loglik, scores, hessian = _weibull_terms(x, log_t, status, covariates, with_hessian=True)
        gradient = scores.sum(axis=0)
        score_norm = float(np.linalg.norm(gradient))
        try:
            step = np.linalg.solve(-hessian, gradient)
        except np.linalg.LinAlgError:
            raise IdentifiabilityError('Weibull information matrix is singular (collinear design?)')
        trace.append(('newton', iteration, float(loglik), score_norm))
        if np.max(np.abs(step)) < param_tolerance and score_norm < score_tolerance:
            converged = True
            break
        shrink = 1.0
        while shrink > 1e-10:
            candidate = x + shrink * step
            if _weibull_terms(candidate, log_t, status, covariates)[0] >= loglik - 1e-12 * abs(loglik):
                break
            shrink *= 0.5
        x = x + shrink * step
        iterations += 1

    if not converged:
        raise ConvergenceError('Weibull independence fit did not converge in %d iterations' % max_iterations,
                               trace=trace)

    loglik, scores, hessian = _weibull_terms(x, log_t, status, covariates, with_hessian=True)
    cluster_scores = np.zeros((data.n_clusters, len(x)))
    np.add.at(cluster_scores, data.cluster_index, scores)
    information = -hessian / data.n_clusters
    return WeibullIndependenceFit(WeibullMargin.from_free(x), cluster_scores, information,
                                  float(loglik), iterations, trace)


class CoxMargin(object):
    """
    Proportional hazards margin with a Breslow step-function baseline.
    Lambda is right-continuous, zero before the first jump and constant after the last.
    """
    has_density = False

    def __init__(self, beta, jump_times, jump_sizes, loglik=None, information=None, iterations=0):
        self.beta = np.array(beta, dtype=float).reshape(-1)
        self.jump_times = np.asarray(jump_times, dtype=float)
        self.jump_sizes = np.asarray(jump_sizes, dtype=float)
        if np.any(np.diff(self.jump_times) <= 0.0) or np.any(self.jump_sizes < 0.0):
            raise DomainError('Breslow jumps need increasing times and nonnegative sizes')
        self.cumulative = np.cumsum(self.jump_sizes)
        self.loglik = loglik
        self.information = information
        self.iterations = iterations
        for array in (self.beta, self.jump_times, self.jump_sizes, self.cumulative):
            array.setflags(write=False)

    def __repr__(self):
        return 'CoxMargin(beta=%r, jumps=%d)' % (list(self.beta), len(self.jump_times))

    @property
    def n_covariates(self):
        return len(self.beta)

    def cumulative_hazard(self, t):
        t = np.asarray(t, dtype=float)
        position = np.searchsorted(self.jump_times, t, side='right')
        value = np.where(position > 0, self.cumulative[np.maximum(position - 1, 0)], 0.0)
        return float(value) if np.ndim(value) == 0 else value

    def log_survival(self, t, z):
        t = _positive_times(t)
        return -np.exp(_linear_predictor(self.beta, z)) * self.cumulative_hazard(t)


class _RiskSets(object):
    """
    Sorted risk-set bookkeeping for the Breslow partial likelihood
    """

    def __init__(self, times, status, covariates):
        order = np.argsort(times, kind='mergesort')
        self.sorted_times = times[order]
        self.sorted_covariates = covariates[order]
        event_mask = status == 1
        self.event_times, inverse, self.event_counts = np.unique(
            times[event_mask], return_inverse=True, return_counts=True)
        # risk set at u: every subject with X >= u
        self.starts = np.searchsorted(self.sorted_times, self.event_times, side='left')
        self.event_covariate_sum = covariates[event_mask].sum(axis=0)
        self.n_covariates = covariates.shape[1]

    def evaluate(self, beta, with_information=True):
        eta = np.dot(self.sorted_covariates, beta) if self.n_covariates else np.zeros(len(self.sorted_times))
        shift = eta.max()
        weights = np.exp(eta - shift)
        s0 = np.cumsum(weights[::-1])[::-1][self.starts]
        counts = self.event_counts
        loglik = float(np.dot(self.event_covariate_sum, beta)) - float(np.sum(counts * (np.log(s0) + shift)))
        jumps = counts * np.exp(-shift) / s0
        if not self.n_covariates:
            return loglik, np.zeros(0), np.zeros((0, 0)), jumps
        weighted = self.sorted_covariates * weights[:, None]
        s1 = np.cumsum(weighted[::-1], axis=0)[::-1][self.starts]
        mean = s1 / s0[:, None]
        score = self.event_covariate_sum - np.sum(counts[:, None] * mean, axis=0)
        if not with_information:
            return loglik, score, None, jumps
        outer = self.sorted_covariates[:, :, None] * weighted[:, None, :]
        s2 = np.cumsum(outer[::-1], axis=0)[::-1][self.starts]
        information = np.sum(counts[:, None, None] * (s2 / s0[:, None, None] - mean[:, :, None] * mean[:, None, :]),
                             axis=0)
        return loglik, score, information, jumps


def fit_cox(data):
    """
    Breslow partial-likelihood fit by Newton-Raphson with step halving, plus
    the Breslow cumulative baseline hazard at the estimate.

    :type data: copulasurv.data.Dataset
    :rtype: CoxMargin
    """
    if data.n_events == 0:
        raise IdentifiabilityError('Cox margin is not identifiable: every subject is censored')
    max_iterations = get_config('max_iterations')
    param_tolerance = get_config('param_tolerance')
    score_tolerance = get_config('score_tolerance')

    risk_sets = _RiskSets(data.times, data.status, data.covariates)
    beta = np.zeros(data.n_covariates)
    loglik, score, information, jumps = risk_sets.evaluate(beta)
    if not data.n_covariates:
        return CoxMargin(beta, risk_sets.event_times, jumps, loglik=loglik, information=information)

    trace = []
    converged = False
    iterations = 0
    for iteration in range(max_iterations):
        score_norm = float(np.linalg.norm(score))
        try:
            step = np.linalg.solve(information, score)
        except np.linalg.LinAlgError:
            raise DivergenceError('Cox information is singular at beta=%s: monotone likelihood?' % beta, trace=trace)
        trace.append((iteration, loglik, score_norm))
        logger.debug('Cox Newton iteration %d: loglik=%.8f score_norm=%.3e', iteration, loglik, score_norm)
        if np.max(np.abs(step)) < param_tolerance and score_norm < score_tolerance:
            converged = True
            break
        shrink = 1.0
        while True:
            candidate = beta + shrink * step
            candidate_terms = risk_sets.evaluate(candidate)
            if candidate_terms[0] >= loglik - 1e-12 * abs(loglik) or shrink < 1e-10:
                break
            shrink *= 0.5
        beta = candidate
        loglik, score, information, jumps = candidate_terms
        iterations += 1

    scale = data.covariates.std(axis=0)
    scale[scale == 0.0] = 1.0
    if np.max(np.abs(beta) * scale) > 30.0:
        raise DivergenceError('Cox partial likelihood is monotone (beta=%s); covariates separate the events' % beta,
                              trace=trace)
    if not converged:
        raise ConvergenceError('Cox fit did not converge in %d iterations' % max_iterations, trace=trace)
    return CoxMargin(beta, risk_sets.event_times, jumps, loglik=loglik, information=information,
                     iterations=iterations)


def plug_in_survival(m, subject):
    """
    H_ij = S(X_ij | Z_ij) under a fitted margin

    :type m: WeibullMargin or CoxMargin
    :type subject: copulasurv.data.Subject
    """
    return float(np.exp(m.log_survival(subject.time, np.asarray(subject.covariates, dtype=float))))
