"""
Central finite differences of scalar functions (log-likelihoods).

Steps are relative: h_i = step * max(1, |x_i|).
"""
import numpy as np

from copulasurv.config import get_config


def _steps(x, step):
    if step is None:
        step = get_config('fd_step')
    return step * np.maximum(1.0, np.abs(x))


def derivative(func, x, step=None):
    """
    Central difference of a scalar function of one variable
    """
    h = float(_steps(np.array([x], dtype=float), step)[0])
    return (func(x + h) - func(x - h)) / (2.0 * h)


def gradient(func, x, step=None):
    x = np.asarray(x, dtype=float)
    h = _steps(x, step)
    grad = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h[i]
        grad[i] = (func(x + e) - func(x - e)) / (2.0 * h[i])
    return grad


def hessian(func, x, step=None, f0=None):
    """
    Symmetric central-difference Hessian
    """
    x = np.asarray(x, dtype=float)
    h = _steps(x, step)
    n = len(x)
    f0 = func(x) if f0 is None else f0
    result = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        result[i, i] = (func(x + ei) - 2.0 * f0 + func(x - ei)) / (h[i] ** 2)
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = h[j]
            value = (func(x + ei + ej) - func(x + ei - ej) - func(x - ei + ej) + func(x - ei - ej)) / \
                (4.0 * h[i] * h[j])
            result[i, j] = result[j, i] = value
    return result
