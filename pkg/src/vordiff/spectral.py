"""Dirichlet sine eigenpairs, series analysis/synthesis, and spectral norms.

The basis is orthonormalized: phi_i(x) = sqrt(2/L) sin(i pi x / L), so
analysis and synthesis are exact inverses on band-limited data and
Parseval holds without stray L/2 factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenpairs of -K d^2/dx^2 on (0, L) with Dirichlet ends, modes 1..N."""

    K: float
    L: float
    N: int

    def __post_init__(self):
        if self.K <= 0.0:
            raise DomainError(f"diffusivity K must be positive, got {self.K}")
        if self.L <= 0.0:
            raise DomainError(f"domain length L must be positive, got {self.L}")
        if self.N < 1:
            raise DomainError(f"mode count N must be >= 1, got {self.N}")

    def eigenvalue(self, i):
        if not 1 <= i <= self.N:
            raise DomainError(f"mode index {i} outside 1..{self.N}")
        return self.K * (i * np.pi / self.L) ** 2

    def eigenvalues(self):
        i = np.arange(1, self.N + 1, dtype=float)
        return self.K * (i * np.pi / self.L) ** 2

    def eigenfunction(self, i):
        if not 1 <= i <= self.N:
            raise DomainError(f"mode index {i} outside 1..{self.N}")
        scale = np.sqrt(2.0 / self.L)
        freq = i * np.pi / self.L
        return lambda x: scale * np.sin(freq * np.asarray(x, dtype=float))

    def design_matrix(self, x):
        """phi_i(x_j) as an (len(x), N) array."""
        x = np.asarray(x, dtype=float)
        i = np.arange(1, self.N + 1, dtype=float)
        return np.sqrt(2.0 / self.L) * np.sin(np.outer(x, i * np.pi / self.L))


@dataclass
class SpectralCoefficients:
    """Coefficients c_i = (v, phi_i) against the orthonormalized basis."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise DomainError("coefficients must be a nonempty vector")


def eigenpair(basis: SpectralBasis, i: int):
    """(lambda_i, phi_i) with lambda_i = K i^2 pi^2 / L^2 and phi_i(0) = phi_i(L) = 0."""
    return basis.eigenvalue(i), basis.eigenfunction(i)


def default_grid_points(N):
    """Grid fine enough that composite Simpson resolves mode N to ~1e-9."""
    return max(4 * N + 1, 8193)


def analyze(basis: SpectralBasis, samples) -> SpectralCoefficients:
    """Sine coefficients of samples on a uniform grid over [0, L].

    The grid is inferred from the sample count (endpoints included) and
    must have at least 4N+1 points, an odd number of them so composite
    Simpson applies.  Homogeneous Dirichlet data is required: the series
    cannot represent nonzero boundary values.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1:
        raise DomainError("samples must be a vector on a uniform grid")
    npts = samples.size
    if npts < 4 * basis.N + 1:
        raise DomainError(
            f"need at least {4 * basis.N + 1} samples for N = {basis.N}, got {npts}"
        )
    if npts % 2 == 0:
        raise DomainError("composite Simpson needs an odd number of samples")
    if abs(samples[0]) > BOUNDARY_TOL or abs(samples[-1]) > BOUNDARY_TOL:
        raise DomainError(
            f"boundary values ({samples[0]:.3e}, {samples[-1]:.3e}) violate the "
            f"homogeneous Dirichlet condition beyond tolerance {BOUNDARY_TOL}"
        )
    x = np.linspace(0.0, basis.L, npts)
    integrand = samples[:, None] * basis.design_matrix(x)
    return SpectralCoefficients(simpson(integrand, x=x, axis=0))


def analyze_function(basis: SpectralBasis, fn, n_points=None) -> SpectralCoefficients:
    """Sample fn on the default uniform grid and analyze."""
    if n_points is None:
        n_points = default_grid_points(basis.N)
    x = np.linspace(0.0, basis.L, n_points)
    return analyze(basis, np.asarray(fn(x), dtype=float))


def synthesize(basis: SpectralBasis, coeffs: SpectralCoefficients, x_points):
    """Pointwise sum_i c_i phi_i(x)."""
    if coeffs.values.size != basis.N:
        raise DomainError(
            f"coefficient count {coeffs.values.size} does not match basis N = {basis.N}"
        )
    x = np.asarray(x_points, dtype=float)
    if x.size and (x.min() < 0.0 or x.max() > basis.L):
        raise DomainError(f"x points must lie in [0, {basis.L}]")
    return basis.design_matrix(x) @ coeffs.values


def sobolev_norm(basis: SpectralBasis, coeffs: SpectralCoefficients, gamma: float) -> float:
    """Spectral Sobolev norm sqrt(sum_i lambda_i^gamma c_i^2).

    gamma = 0 is the L2 norm by Parseval; gamma = 2 matches the L2 norm of
    the second spatial derivative for boundary-compatible functions.
    """
    if gamma < 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if coeffs.values.size != basis.N:
        raise DomainError(
            f"coefficient count {coeffs.values.size} does not match basis N = {basis.N}"
        )
    lam = basis.eigenvalues()
    return float(np.sqrt(np.sum(lam**gamma * coeffs.values**2)))
