"""Numerical diagnosis of initial-time regularity.

Solutions of the model are smooth up to t = 0 when the order vanishes
there (with its value growing like alpha'(0) t), but when alpha(0) > 0
the second time derivative blows up like t^{-alpha(0)}.  These routines
estimate that exponent from second differences of a computed field and
evaluate the weighted norm that stays finite exactly when the blow-up
has the predicted strength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .forward import SolutionField

SMOOTH_SLOPE_THRESHOLD = 0.1
MIN_FIT_SAMPLES = 8


@dataclass
class RegularityReport:
    fitted_slope: float
    expected_slope: float
    weighted_norm: float
    fit_window: tuple
    verdict: str  # "smooth" | "singular"


def _second_differences(mesh, values_matrix):
    """Three-point divided-difference d^2/dt^2 at interior nodes.

    values_matrix has one row per mode; nodes may be non-uniformly spaced.
    Returns an array of shape (n_modes, M-1) for nodes 1..M-1.
    """
    t = mesh.nodes
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    u_prev = values_matrix[:, :-2]
    u_mid = values_matrix[:, 1:-1]
    u_next = values_matrix[:, 2:]
    return 2.0 * (
        u_prev / (h1 * (h1 + h2)) - u_mid / (h1 * h2) + u_next / (h2 * (h1 + h2))
    )


def second_derivative_norms(field: SolutionField, gamma: float):
    """Per interior node, |d^2 u/dt^2 (., t_n)|_gamma from second differences.

    Returns a list of (t_n, norm) pairs for n = 1..M-1.  The field should
    come from a graded mesh when the behavior near t = 0 is of interest.
    """
    if field.mesh.M < 64:
        raise DomainError(
            f"need a mesh with M >= 64 to difference twice, got M = {field.mesh.M}"
        )
    dd2 = _second_differences(field.mesh, field.coeff_matrix())
    lam = field.basis.eigenvalues()
    norms = np.sqrt(((lam**gamma)[:, None] * dd2**2).sum(axis=0))
    t = field.mesh.nodes[1:-1]
    return list(zip(t.tolist(), norms.tolist()))


def fit_singularity_exponent(norms, window) -> float:
    """Least-squares slope of ln(value) against ln(t) inside the window.

    The slope estimates the exponent p in value ~ t^p near t = 0; the
    model predicts p = -alpha(0).
    """
    t_lo, t_hi = window
    if not 0.0 < t_lo < t_hi:
        raise DomainError(f"degenerate fit window ({t_lo}, {t_hi})")
    pts = [(t, v) for t, v in norms if t_lo <= t <= t_hi]
    if len(pts) < MIN_FIT_SAMPLES:
        raise DomainError(
            f"only {len(pts)} samples inside the fit window, need >= {MIN_FIT_SAMPLES}"
        )
    t = np.asarray([p[0] for p in pts])
    v = np.asarray([p[1] for p in pts])
    if np.any(v <= 0.0):
        raise DomainError("nonpositive norm values cannot be log-fitted")
    slope, _ = np.polyfit(np.log(t), np.log(v), 1)
    return float(slope)


def weighted_cm_norm(field: SolutionField, mu: float, gamma: float, m: int = 2) -> float:
    """Discrete weighted norm: C^1 part plus sup_n t_n^(1-mu) |d^2 u/dt^2|_gamma.

    Finite under mesh refinement exactly when the second derivative blows up
    no faster than t^(mu-1); with mu = 1 - alpha(0) that is the predicted
    initial-time behavior for alpha(0) > 0.
    """
    if m != 2:
        raise DomainError("only m = 2 is supported; higher-order differencing "
                          "of singular data is out of scope")
    if not 0.0 <= mu < 1.0:
        raise DomainError(f"weight exponent mu must lie in [0, 1), got {mu}")
    lam = field.basis.eigenvalues()
    U = field.coeff_matrix()
    wgt = (lam**gamma)[:, None]

    sup_u = np.sqrt((wgt * U**2).sum(axis=0)).max()
    du = np.diff(U, axis=1) / field.mesh.spacing
    sup_du = np.sqrt((wgt * du**2).sum(axis=0)).max()
    c1_part = max(float(sup_u), float(sup_du))

    dd2 = _second_differences(field.mesh, U)
    norms2 = np.sqrt((wgt * dd2**2).sum(axis=0))
    t_int = field.mesh.nodes[1:-1]
    weighted = float((t_int ** (1.0 - mu) * norms2).max())
    return c1_part + weighted


def default_fit_window(T: float) -> tuple:
    """Near t = 0 but above the first steps where differences are noisy."""
    return (T * 1e-3, T * 1e-1)


def regularity_report(
    field: SolutionField, alpha0: float, gamma: float, window=None
) -> RegularityReport:
    """Fit the blow-up exponent and evaluate the matching weighted norm.

    alpha0 is the order at t = 0; the expected log-log slope is -alpha0.
    The weighted norm uses mu = 1 - alpha0 (mu = 0 when alpha0 = 0, where
    the weight is degenerate and the plain norm is reported).
    """
    if window is None:
        window = default_fit_window(field.mesh.T)
    norms = second_derivative_norms(field, gamma)
    in_window = [(t, v) for t, v in norms if window[0] <= t <= window[1]]
    if any(v <= 0.0 for _, v in in_window):
        fitted = 0.0
        verdict = "smooth"
    else:
        fitted = fit_singularity_exponent(norms, window)
        verdict = "smooth" if abs(fitted) < SMOOTH_SLOPE_THRESHOLD else "singular"
    mu = 1.0 - alpha0 if alpha0 > 0.0 else 0.0
    weighted = weighted_cm_norm(field, mu, gamma)
    return RegularityReport(
        fitted_slope=fitted,
        expected_slope=-alpha0,
        weighted_norm=weighted,
        fit_window=(float(window[0]), float(window[1])),
        verdict=verdict,
    )
