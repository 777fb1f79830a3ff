import numpy as np
import pytest
from scipy.integrate import quad, simpson

from vordiff import (
    DomainError,
    SpectralBasis,
    SpectralCoefficients,
    analyze,
    analyze_function,
    eigenpair,
    sobolev_norm,
    synthesize,
)
from vordiff.spectral import default_grid_points


class TestEigenpairs:
    def test_example_k1_lpi(self):
        lam, phi = eigenpair(SpectralBasis(1.0, np.pi, 8), 3)
        assert lam == pytest.approx(9.0, rel=1e-14)
        assert phi(0.0) == pytest.approx(0.0, abs=1e-14)
        assert phi(np.pi) == pytest.approx(0.0, abs=1e-12)
        x = np.linspace(0, np.pi, 7)
        assert np.allclose(phi(x), np.sqrt(2 / np.pi) * np.sin(3 * x))

    def test_example_k2_l1(self):
        lam, _ = eigenpair(SpectralBasis(2.0, 1.0, 4), 1)
        assert lam == pytest.approx(2.0 * np.pi**2, rel=1e-14)

    def test_eigen_residual_by_finite_differences(self):
        basis = SpectralBasis(1.0, 1.0, 6)
        x = np.linspace(0.0, 1.0, 20001)
        h = x[1] - x[0]
        for i in (1, 4, 6):
            lam, phi = eigenpair(basis, i)
            v = phi(x)
            resid = -(v[:-2] - 2 * v[1:-1] + v[2:]) / h**2 - lam * v[1:-1]
            assert np.abs(resid).max() <= 1e-4 * max(1.0, lam)

    def test_eigenvalues_increasing_distinct(self):
        lam = SpectralBasis(0.7, 2.0, 16).eigenvalues()
        assert np.all(np.diff(lam) > 0)

    def test_bad_index(self):
        with pytest.raises(DomainError):
            SpectralBasis(1.0, 1.0, 4).eigenvalue(5)


class TestAnalyze:
    def test_pure_mode_roundtrip(self):
        basis = SpectralBasis(1.0, 1.0, 5)
        _, phi2 = eigenpair(basis, 2)
        c = analyze_function(basis, phi2)
        expected = np.zeros(5)
        expected[1] = 1.0
        assert np.abs(c.values - expected).max() <= 1e-8

    def test_zero(self):
        basis = SpectralBasis(1.0, 1.0, 3)
        c = analyze(basis, np.zeros(4 * 3 + 1 + 2))
        assert np.all(c.values == 0.0)

    def test_parabola_coefficients(self):
        # int_0^1 x(1-x) sqrt(2) sin(i pi x) dx = 4 sqrt(2)/(i pi)^3 for odd i,
        # 0 for even i (sympy and adaptive quadrature agree).
        basis = SpectralBasis(1.0, 1.0, 3)
        c = analyze_function(basis, lambda x: x * (1 - x))
        assert c.values[0] == pytest.approx(4 * np.sqrt(2) / np.pi**3, rel=1e-9)
        assert abs(c.values[1]) <= 1e-12
        assert c.values[2] == pytest.approx(4 * np.sqrt(2) / (27 * np.pi**3), rel=1e-9)

    def test_parabola_against_quadrature(self):
        basis = SpectralBasis(1.0, 1.0, 3)
        c = analyze_function(basis, lambda x: x * (1 - x))
        for i in (1, 2, 3):
            oracle, _ = quad(
                lambda s, i=i: s * (1 - s) * np.sqrt(2) * np.sin(i * np.pi * s),
                0.0,
                1.0,
                epsabs=1e-13,
            )
            assert c.values[i - 1] == pytest.approx(oracle, abs=1e-10)

    def test_boundary_violation_rejected(self):
        basis = SpectralBasis(1.0, 1.0, 2)
        bad = np.linspace(0.5, 0.0, 4 * 2 + 3)
        with pytest.raises(DomainError, match="Dirichlet"):
            analyze(basis, bad)

    def test_too_few_points_rejected(self):
        basis = SpectralBasis(1.0, 1.0, 8)
        with pytest.raises(DomainError):
            analyze(basis, np.zeros(17))

    def test_even_point_count_rejected(self):
        basis = SpectralBasis(1.0, 1.0, 2)
        with pytest.raises(DomainError, match="odd"):
            analyze(basis, np.zeros(12))


class TestSynthesize:
    def test_roundtrips(self):
        basis = SpectralBasis(1.0, 1.0, 3)
        npts = default_grid_points(3)
        x = np.linspace(0.0, 1.0, npts)
        for fn in (
            lambda s: s * (1 - s) * 0.0,
            lambda s: np.sqrt(2) * np.sin(2 * np.pi * s),
            lambda s: np.sqrt(2) * (0.3 * np.sin(np.pi * s) - 1.2 * np.sin(3 * np.pi * s)),
        ):
            c = analyze(basis, fn(x))
            back = synthesize(basis, c, x)
            assert np.abs(back - fn(x)).max() <= 1e-8

    def test_rejects_out_of_domain_points(self):
        basis = SpectralBasis(1.0, 1.0, 2)
        c = SpectralCoefficients(np.array([1.0, 0.0]))
        with pytest.raises(DomainError):
            synthesize(basis, c, [1.5])


class TestSobolevNorm:
    def test_gamma_zero_is_l2(self):
        basis = SpectralBasis(1.0, 1.0, 40)
        npts = default_grid_points(40)
        x = np.linspace(0.0, 1.0, npts)
        f = np.sqrt(2) * (np.sin(np.pi * x) - 0.5 * np.sin(5 * np.pi * x))
        c = analyze(basis, f)
        l2 = np.sqrt(simpson(f**2, x=x))
        assert sobolev_norm(basis, c, 0.0) == pytest.approx(l2, abs=1e-8)

    def test_single_mode(self):
        basis = SpectralBasis(2.0, 1.5, 4)
        c = SpectralCoefficients(np.array([1.0, 0.0, 0.0, 0.0]))
        lam1 = basis.eigenvalue(1)
        for g in (0.0, 1.0, 2.5):
            assert sobolev_norm(basis, c, g) == pytest.approx(lam1 ** (g / 2), rel=1e-13)

    def test_gamma_two_matches_second_derivative_norm(self):
        # |v|_{H^2} = ||v''||_{L2} = 2 for v = x(1-x); tail of the truncated
        # series at N = 400 contributes ~1e-3.
        basis = SpectralBasis(1.0, 1.0, 400)
        c = analyze_function(basis, lambda x: x * (1 - x))
        assert sobolev_norm(basis, c, 2.0) == pytest.approx(2.0, abs=2e-3)

    def test_negative_gamma_rejected(self):
        basis = SpectralBasis(1.0, 1.0, 2)
        c = SpectralCoefficients(np.array([1.0, 0.0]))
        with pytest.raises(DomainError):
            sobolev_norm(basis, c, -1.0)


def test_orthonormality_on_default_grid():
    basis = SpectralBasis(1.0, 1.0, 32)
    npts = default_grid_points(32)
    x = np.linspace(0.0, 1.0, npts)
    G = basis.design_matrix(x)
    gram = simpson(G[:, :, None] * G[:, None, :], x=x, axis=0)
    assert np.abs(gram - np.eye(32)).max() <= 1e-8
