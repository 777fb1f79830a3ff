"""Independent numerical oracles shared by the test modules.

These never call back into the product code paths they check: fractional
values come from adaptive QUADPACK quadrature with algebraic endpoint
weights, derivatives from Richardson-extrapolated central differences.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-12, limit=200)


def caputo_quad(gprime, alpha, t):
    """(1/Gamma(1-a)) int_0^t g'(s) (t-s)^(-a) ds by singular-weight quadrature."""
    if alpha == 0.0:
        value, _ = quad(gprime, 0.0, t, **QUAD_OPTS)
        return value
    value, _ = quad(gprime, 0.0, t, weight="alg", wvar=(0.0, -alpha), **QUAD_OPTS)
    return value / gamma(1.0 - alpha)


def frac_integral_quad(g, alpha, t):
    """(1/Gamma(a)) int_0^t g(s) (t-s)^(a-1) ds by singular-weight quadrature."""
    value, _ = quad(g, 0.0, t, weight="alg", wvar=(0.0, alpha - 1.0), **QUAD_OPTS)
    return value / gamma(alpha)


def richardson_fd(f, x, h=1e-5):
    """Central difference of f at x, Richardson-extrapolated over h and h/2."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h
    return (4.0 * d2 - d1) / 3.0


def observed_rates(errors):
    """log2 ratios of successive errors from mesh halving."""
    errors = np.asarray(errors, dtype=float)
    return np.log2(errors[:-1] / errors[1:])
