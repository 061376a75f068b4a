"""
One-stage parametric, two-stage parametric (inference functions for margins)
and two-stage semiparametric estimation of the copula parameter, with their
standard errors: inverse Hessian, the two-stage sandwich formula, and the
grouped jackknife.

All optimization runs on the free scale (log lambda, log rho, beta, log or
logit theta); reported estimates and standard errors are on the natural
scale through the delta method.
"""
import logging
from collections import OrderedDict, namedtuple
from functools import partial

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from copulasurv import numdiff
from copulasurv.apps import ONE_STAGE, SEMIPARAM, TWO_STAGE
from copulasurv.config import get_config
from copulasurv.exceptions import (ConvergenceError, CopulaSurvError, DomainError, IdentifiabilityError,
                                   NumericalError, SingularityError, SingularPointError)
from copulasurv.generators import GeneratorFamily, kendall_tau, theta_from_free, theta_jacobian, theta_to_free
from copulasurv.likelihood import profile_score_theta, total_loglik
from copulasurv.margins import WeibullMargin, fit_cox, fit_weibull_independence
from copulasurv.parallel import Failure, ordered_map

logger = logging.getLogger(__name__)

SE_HESSIAN = 'hessian'
SE_SANDWICH = 'sandwich'
SE_JACKKNIFE = 'jackknife'


class FitReport(object):
    """
    Outcome of one estimation procedure
    """

    def __init__(self, method, family, estimates, standard_errors, loglik, converged, iterations, se_method,
                 warnings=None, diagnostics=None, hazard_ratios=None):
        self.method = method
        self.family = family
        self.estimates = estimates
        self.standard_errors = standard_errors
        self.loglik = loglik
        self.converged = converged
        self.iterations = iterations
        self.se_method = se_method
        self.warnings = list(warnings or [])
        self.diagnostics = diagnostics or OrderedDict()
        self.hazard_ratios = hazard_ratios or OrderedDict()

    def __repr__(self):
        return 'FitReport(%s, %s, theta=%.6g, se=%.3g)' % (self.method, self.family, self.theta, self.theta_se)

    @property
    def theta(self):
        return self.estimates['theta']

    @property
    def theta_se(self):
        return self.standard_errors['theta']

    def as_dict(self):
        return OrderedDict([
            ('method', self.method),
            ('copula', self.family),
            ('estimates', OrderedDict(self.estimates)),
            ('standard_errors', OrderedDict(self.standard_errors)),
            ('se_method', self.se_method),
            ('hazard_ratios', OrderedDict(self.hazard_ratios)),
            ('loglik', self.loglik),
            ('converged', self.converged),
            ('iterations', self.iterations),
            ('diagnostics', OrderedDict(self.diagnostics)),
            ('warnings', list(self.warnings)),
        ])


class InformationBlocks(namedtuple('InformationBlocks', 'I_bb I_bt I_tt')):
    """
    Observed information partitioned into the margin block, the cross block
    and the scalar theta block (theta is the last coordinate)
    """
    __slots__ = ()

    @classmethod
    def from_hessian(cls, hessian):
        information = -np.asarray(hessian, dtype=float)
        return cls(information[:-1, :-1], information[:-1, -1], float(information[-1, -1]))

    def full(self):
        q = len(self.I_bt)
        matrix = np.empty((q + 1, q + 1))
        matrix[:q, :q] = self.I_bb
        matrix[:q, q] = matrix[q, :q] = self.I_bt
        matrix[q, q] = self.I_tt
        return matrix


def one_stage_variance(blocks):
    """
    Var(theta) = 1/I_tt + I_tb (I^-1)_bb I_bt / I_tt^2

    :type blocks: InformationBlocks
    """
    if not blocks.I_tt > 0.0:
        raise SingularityError('I_theta_theta must be positive, got %r' % blocks.I_tt)
    I_bb = np.atleast_2d(blocks.I_bb)
    if I_bb.size and np.linalg.matrix_rank(I_bb) < I_bb.shape[0]:
        raise SingularityError('Margin information block is singular')
    try:
        inverse = np.linalg.inv(blocks.full())
    except np.linalg.LinAlgError:
        raise SingularityError('Information matrix is singular')
    I_bt = np.asarray(blocks.I_bt)
    q = len(I_bt)
    variance = 1.0 / blocks.I_tt + I_bt.dot(inverse[:q, :q]).dot(I_bt) / blocks.I_tt ** 2
    return max(float(variance), 0.0)


def two_stage_variance(I_tt, I_bt, sandwich):
    """
    Var(theta) = 1/I_tt + I_tb S I_bt / I_tt^2 with S the stage-1 robust covariance
    """
    if not I_tt > 0.0:
        raise SingularityError('I_theta_theta must be positive, got %r' % I_tt)
    I_bt = np.asarray(I_bt, dtype=float)
    sandwich = np.atleast_2d(np.asarray(sandwich, dtype=float))
    quadratic = float(I_bt.dot(sandwich).dot(I_bt)) if I_bt.size else 0.0
    if quadratic < -1e-12 * max(1.0, abs(quadratic)):
        raise NumericalError('Two-stage variance correction is negative (%r); the Hessian is unreliable' % quadratic)
    return 1.0 / I_tt + max(quadratic, 0.0) / I_tt ** 2


class JackknifeResult(namedtuple('JackknifeResult', 'se replicates failures warnings')):
    __slots__ = ()


def jackknife_groups(n_clusters, g):
    """
    Contiguous cluster groups in cluster-id order
    """
    if g is None:
        g = n_clusters
    g = int(g)
    if not 2 <= g <= n_clusters:
        raise DomainError('Jackknife needs 2 <= g <= K=%d groups, got %d' % (n_clusters, g))
    return np.array_split(np.arange(n_clusters), g)


def _refit_deleted(refitter, data, group):
    return np.atleast_1d(np.asarray(refitter(data.without(group)), dtype=float))


def grouped_jackknife_se(refitter, data, g=None, threads=1):
    """
    Grouped jackknife: delete each group of clusters, refit, and combine as
    sqrt((g-1)/g * sum_k (est_(-k) - mean)^2).

    :type refitter: callable taking a Dataset and returning a scalar or vector
    :rtype: JackknifeResult
    """
    groups = jackknife_groups(data.n_clusters, g)
    results = ordered_map(partial(_refit_deleted, refitter, data), groups, threads)
    failures = [result for result in results if isinstance(result, Failure)]
    warnings = []
    if failures:
        rate = len(failures) / float(len(groups))
        if rate >= get_config('jackknife_failure_limit'):
            raise ConvergenceError('%d of %d jackknife refits failed; first: %s' %
                                   (len(failures), len(groups), failures[0].message))
        for failure in failures:
            message = 'jackknife group %d excluded: %s' % (failure.index, failure.message)
            logger.warning(message)
            warnings.append(message)
    estimates = np.array([result for result in results if not isinstance(result, Failure)])
    n = len(estimates)
    deviations = estimates - estimates.mean(axis=0)
    se = np.sqrt((n - 1.0) / n * np.sum(deviations ** 2, axis=0))
    if se.shape == (1,):
        se = float(se[0])
    return JackknifeResult(se, estimates, failures, warnings)


def _warn(warnings, message):
    logger.warning(message)
    warnings.append(message)


def _check_identifiable(data):
    if data.n_events == 0:
        raise IdentifiabilityError('No events in the dataset')
    if np.sum(data.cluster_sizes >= 2) < 2:
        raise IdentifiabilityError('theta is not identifiable: fewer than two clusters have two or more subjects')


def _safe(func):
    def wrapper(*args):
        try:
            value = func(*args)
        except (NumericalError, SingularPointError, DomainError, OverflowError):
            return np.inf
        return value if np.isfinite(value) else np.inf
    return wrapper


def _maximize_theta(family, margin, data):
    """
    Stage-2 search: log/logit grid scan, then bounded Brent refinement
    around the best grid point. Returns (free theta, loglik, evaluations, warnings).
    """
    lower, upper = get_config('theta_search_bounds')[family]
    x_lower, x_upper = theta_to_free(family, lower), theta_to_free(family, upper)
    grid = np.linspace(x_lower, x_upper, get_config('theta_grid_size'))

    @_safe
    def objective(x):
        return -total_loglik(GeneratorFamily.from_free(family, x), margin, data)

    values = np.array([objective(x) for x in grid])
    if not np.any(np.isfinite(values)):
        raise ConvergenceError('Stage-2 likelihood is not finite anywhere on the %s theta grid' % family,
                               trace=list(zip(grid.tolist(), values.tolist())))
    best = int(np.argmin(values))
    a, b = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    result = minimize_scalar(objective, bounds=(a, b), method='bounded',
                             options={'xatol': 1e-10, 'maxiter': get_config('max_iterations')})
    if not result.success or not np.isfinite(result.fun):
        raise ConvergenceError('Stage-2 theta search failed: %s' % result.message,
                               trace=list(zip(grid.tolist(), values.tolist())))
    warnings = []
    span = x_upper - x_lower
    if min(result.x - x_lower, x_upper - result.x) < 1e-6 * span:
        theta = theta_from_free(family, result.x)
        warnings.append('theta=%.6g is at the boundary of the %s search interval [%g, %g]' %
                        (theta, family, lower, upper))
    return float(result.x), float(-result.fun), len(grid) + int(result.nfev), warnings


def _joint_loglik(family, data, point):
    return total_loglik(GeneratorFamily.from_free(family, point[-1]), WeibullMargin.from_free(point[:-1]), data)


def _margin_names(data):
    return ['lambda', 'rho'] + ['beta_%s' % name for name in data.covariate_names]


def _natural_margin(free, covariance, data):
    """
    Natural-scale margin estimates and delta-method SEs from free-scale ones
    """
    free = np.asarray(free, dtype=float)
    se_free = np.sqrt(np.maximum(np.diag(covariance), 0.0))
    natural = np.concatenate((np.exp(free[:2]), free[2:]))
    se = np.concatenate((np.exp(free[:2]) * se_free[:2], se_free[2:]))
    names = _margin_names(data)
    return OrderedDict(zip(names, natural.tolist())), OrderedDict(zip(names, se.tolist()))


def _hazard_ratios(estimates, standard_errors, data):
    ratios = OrderedDict()
    for name in data.covariate_names:
        key = 'beta_%s' % name
        ratio = float(np.exp(estimates[key]))
        ratios[name] = OrderedDict([('estimate', ratio), ('standard_error', ratio * standard_errors[key])])
    return ratios


def _diagnostics(family, theta, warnings, hessian=None, score=None, profile_score=None):
    """
    Failures of optional diagnostics become entries of ``warnings``
    """
    diagnostics = OrderedDict()
    try:
        diagnostics['kendall_tau'] = kendall_tau(GeneratorFamily(family, theta))
    except CopulaSurvError as error:
        diagnostics['kendall_tau'] = None
        _warn(warnings, 'Kendall tau unavailable for %s theta=%g: %s' % (family, theta, error))
    if score is not None:
        diagnostics['score_norm'] = float(np.linalg.norm(score))
    if profile_score is not None:
        diagnostics['theta_score'] = float(profile_score)
    if hessian is not None:
        eigenvalues = np.linalg.eigvalsh(0.5 * (hessian + hessian.T))
        diagnostics['hessian_max_eigenvalue'] = float(eigenvalues.max())
        diagnostics['negative_definite'] = bool(eigenvalues.max() < 0.0)
    return diagnostics


def _theta_entry(estimates, standard_errors, family, x_theta, variance_free):
    estimates['theta'] = theta_from_free(family, x_theta)
    standard_errors['theta'] = float(theta_jacobian(family, x_theta) * np.sqrt(variance_free))


def fit_two_stage_parametric(family, data):
    """
    Stage 1: Weibull margins under working independence. Stage 2: theta
    maximizing the copula likelihood with the margins fixed. SE(theta) from
    the two-stage sandwich formula; margin SEs from the stage-1 sandwich.

    :rtype: FitReport
    """
    _check_identifiable(data)
    stage1 = fit_weibull_independence(data)
    x_theta, loglik, evaluations, warnings = _maximize_theta(family, stage1.margin, data)
    for message in warnings:
        logger.warning(message)
    point = np.concatenate((stage1.margin.to_free(), [x_theta]))
    hessian = numdiff.hessian(partial(_joint_loglik, family, data), point, f0=loglik)
    blocks = InformationBlocks.from_hessian(hessian)
    sandwich = stage1.robust_covariance
    variance = two_stage_variance(blocks.I_tt, blocks.I_bt, sandwich)

    estimates, standard_errors = _natural_margin(stage1.margin.to_free(), sandwich, data)
    _theta_entry(estimates, standard_errors, family, x_theta, variance)
    theta = estimates['theta']
    profile_score = _profile_score(family, stage1.margin, data, theta, warnings)
    diagnostics = _diagnostics(family, theta, warnings, profile_score=profile_score)
    diagnostics['theta_information'] = blocks.I_tt
    diagnostics['theta_evaluations'] = evaluations
    return FitReport(TWO_STAGE, family, estimates, standard_errors, loglik, True,
                     stage1.iterations + evaluations, SE_SANDWICH, warnings, diagnostics,
                     _hazard_ratios(estimates, standard_errors, data))


def _profile_score(family, margin, data, theta, warnings):
    try:
        return profile_score_theta(family, margin, data, theta)
    except CopulaSurvError as error:
        _warn(warnings, 'theta score unavailable at theta=%g: %s' % (theta, error))
        return None


def _parse_init(family, data, init):
    margin = WeibullMargin(init['lambda'], init['rho'],
                           [init.get('beta_%s' % name, 0.0) for name in data.covariate_names])
    return np.concatenate((margin.to_free(), [theta_to_free(family, init['theta'])]))


def fit_one_stage(family, data, init=None):
    """
    Joint maximum likelihood over margins and theta: BFGS on finite-difference
    gradients, then Newton polishing on the finite-difference Hessian whose
    inverse gives the standard errors.

    :type init: dict with lambda, rho, beta_<name>, theta or None
    :rtype: FitReport
    """
    _check_identifiable(data)
    warnings = []
    iterations = 0
    if init is None:
        stage1 = fit_weibull_independence(data)
        x_theta, _, evaluations, _ = _maximize_theta(family, stage1.margin, data)
        x0 = np.concatenate((stage1.margin.to_free(), [x_theta]))
        iterations += stage1.iterations
    else:
        x0 = _parse_init(family, data, init)

    loglik = partial(_joint_loglik, family, data)
    objective = _safe(lambda point: -loglik(point))

    def gradient(point):
        return numdiff.gradient(objective, point)

    max_iterations = get_config('max_iterations')
    param_tolerance = get_config('param_tolerance')
    score_tolerance = get_config('score_tolerance')
    if not np.isfinite(objective(x0)):
        raise ConvergenceError('One-stage likelihood is not finite at the starting point %s' % x0.tolist())
    result = minimize(objective, x0, jac=gradient, method='BFGS',
                      options={'maxiter': max_iterations, 'gtol': score_tolerance})
    x = result.x
    iterations += int(result.nit)
    trace = [('bfgs', int(result.nit), float(-result.fun), str(result.message))]
    logger.debug('One-stage BFGS: %s after %d iterations', result.message, result.nit)
    if not np.isfinite(result.fun):
        raise ConvergenceError('One-stage optimizer left the finite region: %s' % result.message, trace=trace)

    converged = False
    value = loglik(x)
    for iteration in range(max_iterations):
        score = numdiff.gradient(loglik, x)
        hessian = numdiff.hessian(loglik, x, f0=value)
        score_norm = float(np.linalg.norm(score))
        trace.append(('newton', iteration, value, score_norm))
        if score_norm <= score_tolerance:
            converged = True
            break
        try:
            step = np.linalg.solve(-hessian, score)
        except np.linalg.LinAlgError:
            break
        if np.dot(step, score) <= 0.0:
            # Hessian not negative definite along the score: no ascent direction
            break
        if np.max(np.abs(step)) < param_tolerance:
            converged = True
            break
        shrink = 1.0
        while shrink > 1e-8:
            candidate = x + shrink * step
            candidate_value = -objective(candidate)
            if candidate_value >= value - 1e-12 * abs(value):
                break
            shrink *= 0.5
        else:
            break
        x, value = candidate, candidate_value
        iterations += 1

    if not converged:
        _warn(warnings, 'One-stage fit stopped with score norm %.3g above %.3g' % (
            float(np.linalg.norm(score)), score_tolerance))

    blocks = InformationBlocks.from_hessian(hessian)
    try:
        covariance = np.linalg.inv(blocks.full())
    except np.linalg.LinAlgError:
        raise SingularityError('One-stage information matrix is singular at the optimum')
    variance = one_stage_variance(blocks)
    estimates, standard_errors = _natural_margin(x[:-1], covariance[:-1, :-1], data)
    _theta_entry(estimates, standard_errors, family, x[-1], variance)

    lower, upper = get_config('theta_search_bounds')[family]
    theta = estimates['theta']
    if theta <= lower or theta >= upper:
        _warn(warnings, 'theta=%.6g is at the boundary of the %s domain [%g, %g] (near independence)' % (
            theta, family, lower, upper))
    diagnostics = _diagnostics(family, theta, warnings, hessian=hessian, score=score)
    diagnostics['trace'] = [list(entry) for entry in trace]
    return FitReport(ONE_STAGE, family, estimates, standard_errors, value, converged, iterations,
                     SE_HESSIAN, warnings, diagnostics, _hazard_ratios(estimates, standard_errors, data))


class SemiparametricRefit(object):
    """
    Full two-stage semiparametric estimate (theta, beta) of a dataset; the
    jackknife refitter
    """

    def __init__(self, family):
        self.family = family

    def __call__(self, data):
        margin = fit_cox(data)
        x_theta = _maximize_theta(self.family, margin, data)[0]
        return np.concatenate(([theta_from_free(self.family, x_theta)], margin.beta))


def fit_two_stage_semiparametric(family, data, jackknife_groups=None, threads=1):
    """
    Stage 1: Cox margins with Breslow baseline. Stage 2: theta maximizing the
    plug-in copula likelihood. Standard errors of theta and beta by the
    grouped jackknife over clusters, refitting both stages per deletion.

    :rtype: FitReport
    """
    _check_identifiable(data)
    margin = fit_cox(data)
    x_theta, loglik, evaluations, warnings = _maximize_theta(family, margin, data)
    if jackknife_groups is None:
        jackknife_groups = get_config('jackknife_groups')
    for message in warnings:
        logger.warning(message)
    jackknife = grouped_jackknife_se(SemiparametricRefit(family), data, jackknife_groups, threads)
    warnings.extend(jackknife.warnings)
    se = np.atleast_1d(jackknife.se)

    estimates = OrderedDict()
    standard_errors = OrderedDict()
    for i, name in enumerate(data.covariate_names):
        estimates['beta_%s' % name] = float(margin.beta[i])
        standard_errors['beta_%s' % name] = float(se[i + 1])
    estimates['theta'] = theta_from_free(family, x_theta)
    standard_errors['theta'] = float(se[0])
    theta = estimates['theta']
    profile_score = _profile_score(family, margin, data, theta, warnings)
    diagnostics = _diagnostics(family, theta, warnings, profile_score=profile_score)
    diagnostics['baseline_jumps'] = len(margin.jump_times)
    diagnostics['jackknife_groups'] = len(jackknife.replicates) + len(jackknife.failures)
    diagnostics['jackknife_failures'] = len(jackknife.failures)
    return FitReport(SEMIPARAM, family, estimates, standard_errors, loglik, True,
                     margin.iterations + evaluations, SE_JACKKNIFE, warnings, diagnostics,
                     _hazard_ratios(estimates, standard_errors, data))


def fit(method, family, data, jackknife_groups=None, threads=1, init=None):
    """
    Dispatch on the method tag
    """
    if method == ONE_STAGE:
        return fit_one_stage(family, data, init=init)
    if method == TWO_STAGE:
        return fit_two_stage_parametric(family, data)
    if method == SEMIPARAM:
        return fit_two_stage_semiparametric(family, data, jackknife_groups=jackknife_groups, threads=threads)
    raise DomainError('Unknown method "%s"' % method)
