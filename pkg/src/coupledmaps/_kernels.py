"""Compiled inner loops for orbit generation.

Everything here runs in IEEE double without fastmath, so results match a
plain Python loop evaluated in the same order.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _clamp(x):
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


@njit(cache=True)
def quadratic_orbit(c, x0, n, burn_in):
    x = x0
    for _ in range(burn_in):
        x = c * (1.0 - 2.0 * x * x)
    out = np.empty(n)
    for i in range(n):
        x = c * (1.0 - 2.0 * x * x)
        out[i] = x
    return out


@njit(cache=True)
def skew_orbit(c1, c2, k, x0, y0, n, burn_in):
    x = x0
    y = y0
    xs = np.empty(n)
    ys = np.empty(n)
    for i in range(burn_in + n):
        t1 = c1 * (1.0 - 2.0 * x * x)
        t2 = c2 * (1.0 - 2.0 * y * y)
        # keeps the diagonal invariant exact
        if t1 == t2:
            y = t1
        else:
            y = _clamp((1.0 - k) * t2 + k * t1)
        x = t1
        j = i - burn_in
        if j >= 0:
            xs[j] = x
            ys[j] = y
    return xs, ys


@njit(cache=True)
def log_derivative_sum(c, x0, n, burn_in, stride):
    """Sum of log|T'(x_i)| over x_b .. x_{b+n-1}.

    Returns (total, running_means, hit) where running_means holds the
    running average every `stride` steps (empty when stride == 0) and
    hit is the index of a singular point, or -1.
    """
    x = x0
    for _ in range(burn_in):
        x = c * (1.0 - 2.0 * x * x)
    m = n // stride if stride > 0 else 0
    running = np.empty(m)
    total = 0.0
    j = 0
    for i in range(n):
        d = abs(4.0 * c * x)
        if d < 1e-300:
            return total, running[:j], i
        total += np.log(d)
        if stride > 0 and (i + 1) % stride == 0:
            running[j] = total / (i + 1)
            j += 1
        x = c * (1.0 - 2.0 * x * x)
    return total, running, -1


@njit(cache=True)
def slave_log_derivative_sum(c1, c2, k, x0, y0, n, burn_in, stride):
    """As log_derivative_sum but along the slave orbit, master derivative."""
    x = x0
    y = y0
    for _ in range(burn_in):
        t1 = c1 * (1.0 - 2.0 * x * x)
        t2 = c2 * (1.0 - 2.0 * y * y)
        if t1 == t2:
            y = t1
        else:
            y = _clamp((1.0 - k) * t2 + k * t1)
        x = t1
    m = n // stride if stride > 0 else 0
    running = np.empty(m)
    total = 0.0
    j = 0
    for i in range(n):
        d = abs(4.0 * c1 * y)
        if d < 1e-300:
            return total, running[:j], i
        total += np.log(d)
        if stride > 0 and (i + 1) % stride == 0:
            running[j] = total / (i + 1)
            j += 1
        t1 = c1 * (1.0 - 2.0 * x * x)
        t2 = c2 * (1.0 - 2.0 * y * y)
        if t1 == t2:
            y = t1
        else:
            y = _clamp((1.0 - k) * t2 + k * t1)
        x = t1
    return total, running, -1


@njit(cache=True)
def noisy_literal(k, x0, omegas):
    n = omegas.shape[0]
    out = np.empty(n)
    x = x0
    for i in range(n):
        x = _clamp(k * x + (1.0 - k) * omegas[i])
        out[i] = x
    return out


@njit(cache=True)
def noisy_slave_form(c, k, x0, omegas):
    n = omegas.shape[0]
    out = np.empty(n)
    y = x0
    for i in range(n):
        y = _clamp((1.0 - k) * c * (1.0 - 2.0 * y * y) + k * omegas[i])
        out[i] = y
    return out
