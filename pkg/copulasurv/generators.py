"""
Archimedean generators with completely monotone generator (Laplace transforms
of positive mixing distributions) from the power variance function family.

Everything that can overflow is computed in the log domain: derivatives of
order k are returned as log-magnitudes with the known sign (-1)^k.
"""
import logging
import math
from collections import namedtuple
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import expit, gammaln, logit, logsumexp

from copulasurv.apps import CLAYTON, FAMILIES, GUMBEL, INVGAUSS
from copulasurv.exceptions import DomainError, NumericalError, SingularPointError, TableSizeError

logger = logging.getLogger(__name__)

PvfParams = namedtuple('PvfParams', 'alpha delta gamma')


class SignedLogValue(namedtuple('SignedLogValue', 'log_magnitude sign')):
    """
    v = sign * exp(log_magnitude); sign 0 encodes an exact zero
    """
    __slots__ = ()

    @property
    def value(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


class CoefficientTable(namedtuple('CoefficientTable', 'max_order alpha entries')):
    """
    Log-coefficients c[k][j](alpha) of the PVF derivative expansion.
    ``entries`` is a read-only (max_order + 1) square array, -inf outside 1 <= j <= k.
    """
    __slots__ = ()

    def log_coefficient(self, k, j):
        if not 1 <= j <= k <= self.max_order:
            raise TableSizeError('c[%d][%d] outside a table of order %d' % (k, j, self.max_order))
        return float(self.entries[k, j])

    def coefficient(self, k, j):
        return math.exp(self.log_coefficient(k, j))


class GeneratorFamily(namedtuple('GeneratorFamily', 'kind theta')):
    """
    Parametric generator phi_theta; immutable and hashable.

    :type kind: str
    :type theta: float
    """
    __slots__ = ()

    def __new__(cls, kind, theta):
        if kind not in FAMILIES:
            raise DomainError('Unknown copula family "%s", expected one of: %s' % (kind, ', '.join(FAMILIES)))
        theta = float(theta)
        if not np.isfinite(theta) or theta <= 0.0:
            raise DomainError('%s theta must be positive, got %r' % (kind, theta))
        if kind == GUMBEL and theta >= 1.0:
            raise DomainError('gumbel theta must lie in (0, 1), got %r' % theta)
        return super(GeneratorFamily, cls).__new__(cls, kind, theta)

    def with_theta(self, theta):
        return GeneratorFamily(self.kind, theta)

    @property
    def pvf_params(self):
        theta = self.theta
        if self.kind == CLAYTON:
            # gamma mixing: the alpha -> 0 limit
            return PvfParams(0.0, 1.0 / theta, 1.0 / theta)
        if self.kind == GUMBEL:
            return PvfParams(theta, theta, 0.0)
        return PvfParams(0.5, (2.0 * theta) ** -0.5, 1.0 / (2.0 * theta))

    def to_free(self):
        return theta_to_free(self.kind, self.theta)

    @classmethod
    def from_free(cls, kind, x):
        return cls(kind, theta_from_free(kind, x))


def theta_to_free(kind, theta):
    """
    Unconstrained coordinate of theta: logit for gumbel, log otherwise
    """
    if kind == GUMBEL:
        return float(logit(theta))
    return math.log(theta)


def theta_from_free(kind, x):
    if kind == GUMBEL:
        return float(expit(x))
    return math.exp(x)


def theta_jacobian(kind, x):
    """
    d theta / d x, used by the delta method
    """
    theta = theta_from_free(kind, x)
    if kind == GUMBEL:
        return theta * (1.0 - theta)
    return theta


def _as_nonnegative(s):
    s = np.asarray(s, dtype=float)
    if np.any(~(s >= 0.0)):
        raise DomainError('Generator argument must be nonnegative')
    return s


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


def log_phi(gen, s):
    """
    log phi_theta(s), vectorized
    """
    s = _as_nonnegative(s)
    theta = gen.theta
    if gen.kind == CLAYTON:
        out = -np.log1p(theta * s) / theta
    elif gen.kind == GUMBEL:
        out = -np.power(s, theta)
    else:
        # 1/theta - sqrt(1/theta^2 + 2s/theta) without cancellation near s = 0
        out = -2.0 * s / (1.0 + np.sqrt(1.0 + 2.0 * theta * s))
    return _scalar_or_array(out, s)


def phi(gen, s):
    """
    :type gen: GeneratorFamily
    :rtype: float or numpy.ndarray
    """
    return _scalar_or_array(np.exp(log_phi(gen, s)), s)


def phi_inv_log(gen, log_u):
    """
    phi_theta^-1(u) computed from log u <= 0
    """
    log_u = np.asarray(log_u, dtype=float)
    if np.any(~(log_u <= 0.0)):
        raise DomainError('Generator inverse needs 0 < u <= 1')
    minus_log_u = -log_u
    theta = gen.theta
    if gen.kind == CLAYTON:
        out = np.expm1(theta * minus_log_u) / theta
    elif gen.kind == GUMBEL:
        out = np.power(minus_log_u, 1.0 / theta)
    else:
        out = 0.5 * theta * minus_log_u ** 2 + minus_log_u
    return _scalar_or_array(out, log_u)


def phi_inv(gen, u):
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0.0)) or np.any(u > 1.0):
        raise DomainError('Generator inverse needs 0 < u <= 1')
    return _scalar_or_array(phi_inv_log(gen, np.log(u)), u)


def log_neg_phi_prime(gen, s):
    """
    log(-phi_theta'(s)), vectorized. Gumbel-Hougaard is singular at s = 0.
    """
    s = _as_nonnegative(s)
    theta = gen.theta
    if gen.kind == CLAYTON:
        out = (-1.0 / theta - 1.0) * np.log1p(theta * s)
    elif gen.kind == GUMBEL:
        if np.any(s == 0.0):
            raise SingularPointError('gumbel generator derivative is unbounded at s = 0')
        out = math.log(theta) + (theta - 1.0) * np.log(s) - np.power(s, theta)
    else:
        out = log_phi(gen, s) - 0.5 * np.log1p(2.0 * theta * s)
    return _scalar_or_array(out, s)


@lru_cache(maxsize=128)
def _coefficient_table(k_max, alpha):
    entries = np.full((k_max + 1, k_max + 1), -np.inf)
    entries[1, 1] = 0.0
    log_gamma_base = gammaln(1.0 - alpha)
    for k in range(2, k_max + 1):
        previous = entries[k - 1]
        entries[k, 1] = gammaln(k - alpha) - log_gamma_base
        if k > 2:
            j = np.arange(2, k)
            # k - 1 - j*alpha >= (k - 1)(1 - alpha) > 0 for j < k
            entries[k, 2:k] = np.logaddexp(previous[1:k - 1], previous[2:k] + np.log(k - 1 - j * alpha))
        entries[k, k] = 0.0
    entries.setflags(write=False)
    return CoefficientTable(k_max, alpha, entries)


def pvf_coefficients(k_max, alpha):
    """
    Log-domain table of c[k][j](alpha); cached per (k_max, alpha)

    :rtype: CoefficientTable
    """
    k_max = int(k_max)
    alpha = float(alpha)
    if k_max < 1:
        raise DomainError('Coefficient table order must be at least 1, got %d' % k_max)
    if not 0.0 <= alpha < 1.0:
        raise DomainError('PVF alpha must lie in [0, 1), got %r' % alpha)
    return _coefficient_table(k_max, alpha)


def table_for(gen, k_max):
    """
    Coefficient table matching the generator's PVF alpha
    """
    return pvf_coefficients(max(int(k_max), 1), gen.pvf_params.alpha)


def _pvf_log_laplace(params, s):
    alpha, delta, gamma = params
    if alpha == 0.0:
        return -delta * np.log1p(s / gamma)
    return -(delta / alpha) * (np.power(gamma + s, alpha) - gamma ** alpha)


def pvf_log_deriv(params, s, k, table):
    """
    log|L^(k)(s)| of the PVF(alpha, delta, gamma) Laplace transform for arrays s, k.
    The inner sum has positive terms only and is reduced by log-sum-exp.

    :type params: PvfParams
    :type table: CoefficientTable
    """
    s, k = np.broadcast_arrays(_as_nonnegative(s), np.asarray(k, dtype=int))
    s = np.atleast_1d(s).astype(float)
    k = np.atleast_1d(k)
    out = np.array(_pvf_log_laplace(params, s), dtype=float, ndmin=1)
    positive = k > 0
    if not np.any(positive):
        return out
    k_max = int(k.max())
    if k_max > table.max_order:
        raise TableSizeError('Derivative order %d exceeds coefficient table order %d' % (k_max, table.max_order))
    alpha, delta, gamma = params
    base = gamma + s[positive]
    if np.any(base <= 0.0):
        raise SingularPointError('PVF derivative terms diverge at gamma + s = 0')
    orders = k[positive]
    log_base = np.log(base)[:, None]
    j = np.arange(1, k_max + 1)
    terms = (table.entries[:k_max + 1, 1:k_max + 1][orders]
             + j * math.log(delta)
             + (j * alpha - orders[:, None]) * log_base)
    out[positive] += logsumexp(terms, axis=1)
    return out


def _clayton_log_deriv(theta, s, k):
    s, k = np.broadcast_arrays(_as_nonnegative(s), np.asarray(k, dtype=int))
    s = np.atleast_1d(s).astype(float)
    k = np.atleast_1d(k)
    k_max = max(int(k.max()), 1)
    # products prod_{j=1}^{k-1} (1 + j theta), indexed by k
    log_products = np.concatenate(([0.0, 0.0], np.cumsum(np.log1p(theta * np.arange(1, k_max)))))
    return (-1.0 / theta - k) * np.log1p(theta * s) + log_products[k]


def log_abs_phi_deriv(gen, s, k, table=None):
    """
    log|phi_theta^(k)(s)| for arrays of arguments and orders; the sign is (-1)^k.
    Clayton uses its exact product form, the other families the PVF expansion.
    """
    k = np.asarray(k, dtype=int)
    if np.any(k < 0):
        raise DomainError('Derivative order must be nonnegative')
    if gen.kind == CLAYTON:
        return _clayton_log_deriv(gen.theta, s, k)
    params = gen.pvf_params
    if table is None:
        table = table_for(gen, np.max(k))
    elif table.alpha != params.alpha:
        raise DomainError('Coefficient table alpha %r does not match %s alpha %r' %
                          (table.alpha, gen.kind, params.alpha))
    return pvf_log_deriv(params, s, k, table)


def phi_deriv_k(gen, s, k, table=None):
    """
    k-th derivative of phi_theta at s as a signed log-value

    :type gen: GeneratorFamily
    :type table: CoefficientTable
    :rtype: SignedLogValue
    """
    k = int(k)
    if k < 0:
        raise DomainError('Derivative order must be nonnegative, got %d' % k)
    if table is not None:
        if k > table.max_order:
            raise TableSizeError('Derivative order %d exceeds coefficient table order %d' % (k, table.max_order))
        if table.alpha != gen.pvf_params.alpha:
            raise DomainError('Coefficient table alpha %r does not match %s alpha %r' %
                              (table.alpha, gen.kind, gen.pvf_params.alpha))
    if gen.kind == GUMBEL and k >= 1 and float(s) == 0.0:
        raise SingularPointError('gumbel derivative of order %d is unbounded at s = 0' % k)
    log_magnitude = float(log_abs_phi_deriv(gen, [float(s)], [k], table)[0])
    return SignedLogValue(log_magnitude, -1 if k % 2 else 1)


def kendall_tau(gen):
    """
    tau = 1 + 4 * int_0^1 phi^-1(t) phi'(phi^-1(t)) dt by adaptive Gauss-Kronrod quadrature
    """
    table = table_for(gen, 1)

    def integrand(t):
        s = phi_inv(gen, t)
        if s == 0.0:
            return 0.0
        return s * phi_deriv_k(gen, s, 1, table).value

    result = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-9, limit=200, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 or not np.isfinite(value):
        message = result[3] if len(result) > 3 else 'non-finite integral'
        raise NumericalError('Kendall tau quadrature for %s theta=%g failed: %s (abserr=%.3g, evaluations=%d)' %
                             (gen.kind, gen.theta, message, abserr, result[2].get('neval', -1)))
    return 1.0 + 4.0 * value
