"""Tests for the weakly nonlinear coefficients and the soliton."""

from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import simpson

from stratmoi.models import KdvCoefficients, VerticalMode
from stratmoi.modules.kdv import (
    compute_coefficients,
    instability_constant,
    ode_residual,
    soliton,
    soliton_derivative,
    soliton_mass,
)
from stratmoi.modules.modes import solve_fundamental_mode
from stratmoi.utils.exceptions import ConventionError, DegenerateNonlinearityError, DomainError


@pytest.fixture(scope="module")
def fine_coeffs(exponential):
    mode = solve_fundamental_mode(exponential, 1001)
    return mode, compute_coefficients(mode, exponential)


def exact_integrals():
    """I1, I2, I3 for the exponential profile from the closed-form eigenfunction."""
    y = np.linspace(0.0, 1.0, 20001)
    raw = np.exp(0.5 * y) * np.sin(np.pi * y)
    scale = raw.max()
    phi = raw / scale
    phi_prime = np.exp(0.5 * y) * (0.5 * np.sin(np.pi * y) + np.pi * np.cos(np.pi * y)) / scale
    rho = np.exp(-y)
    return (simpson(rho * phi_prime ** 2, x=y), simpson(rho * phi ** 2, x=y), simpson(rho * phi_prime ** 3, x=y))


class TestCoefficients:
    def test_definitional_relations(self, small_coeffs):
        assert small_coeffs.a * small_coeffs.r == pytest.approx(-1.5, rel=1e-14)
        assert 4.0 * small_coeffs.k ** 2 * small_coeffs.s == pytest.approx(-1.0, rel=1e-14)
        assert small_coeffs.s < 0.0
        assert small_coeffs.K > 0.0

    def test_integrals_match_closed_form_mode(self, fine_coeffs):
        _, coeffs = fine_coeffs
        I1, I2, I3 = exact_integrals()
        assert coeffs.I1 == pytest.approx(I1, rel=1e-4)
        assert coeffs.I2 == pytest.approx(I2, rel=1e-4)
        assert coeffs.I3 == pytest.approx(I3, rel=1e-3)

    def test_closed_form_coefficients(self, fine_coeffs):
        mode, coeffs = fine_coeffs
        assert coeffs.s == pytest.approx(-0.5 * mode.c0 * coeffs.I2 / coeffs.I1, rel=1e-14)
        assert coeffs.r == pytest.approx(-0.75 * coeffs.I3 / coeffs.I1, rel=1e-14)

    def test_displacement_convention(self, fine_coeffs, exponential):
        mode, coeffs = fine_coeffs
        displaced = compute_coefficients(mode, exponential, convention="displacement")
        assert displaced.r == pytest.approx(mode.c0 * coeffs.r, rel=1e-14)
        assert displaced.s == coeffs.s
        assert displaced.convention == "displacement"

    def test_unknown_convention(self, small_mode, exponential):
        with pytest.raises(DomainError):
            compute_coefficients(small_mode, exponential, convention="boussinesq")

    def test_degenerate_threshold(self, small_mode, exponential):
        with pytest.raises(DegenerateNonlinearityError):
            compute_coefficients(small_mode, exponential, genericity_threshold=1e3)

    def test_dict_round_trip(self, small_coeffs):
        restored = KdvCoefficients.from_dict(small_coeffs.to_dict())
        assert restored == small_coeffs

    def test_summary_records_polarity(self, small_coeffs):
        summary = small_coeffs.to_dict()
        assert summary["polarity"] == small_coeffs.polarity
        assert summary["polarity"] * summary["a"] > 0


class TestSoliton:
    def test_ode_residual(self, small_coeffs):
        k, a = small_coeffs.k, small_coeffs.a
        X = np.linspace(-10.0 / k, 10.0 / k, 2001)
        residual = ode_residual(small_coeffs, X)
        assert np.max(np.abs(residual)) <= 1e-4 * k ** 2 * abs(a)

    def test_crest_and_derivative(self, small_coeffs):
        assert soliton(small_coeffs, 0.0) == pytest.approx(small_coeffs.a, rel=1e-15)
        X = np.linspace(-3.0, 3.0, 61)
        step = 1e-6
        numeric = (soliton(small_coeffs, X + step) - soliton(small_coeffs, X - step)) / (2 * step)
        np.testing.assert_allclose(soliton_derivative(small_coeffs, X), numeric,
                                   atol=1e-6 * abs(small_coeffs.a) * small_coeffs.k)

    def test_mass_by_quadrature(self, small_coeffs):
        k = small_coeffs.k
        X = np.linspace(-40.0 / k, 40.0 / k, 40001)
        assert simpson(soliton(small_coeffs, X) ** 2, x=X) == pytest.approx(soliton_mass(small_coeffs), rel=1e-8)

    def test_mass_requires_negative_s(self, small_coeffs):
        with pytest.raises(ConventionError):
            soliton_mass(replace(small_coeffs, s=0.25))


class TestInstabilityConstant:
    def test_synthetic_value(self):
        y = np.linspace(0.0, 1.0, 17)
        mode = VerticalMode(c0=1.0, y=y, phi0=np.sin(np.pi * y), phi0_prime=np.pi * np.cos(np.pi * y))
        coeffs = KdvCoefficients(r=-1.5, s=-0.25, I1=np.pi ** 2 / 2, I2=0.5, I3=0.0, c0=1.0)
        assert coeffs.a == pytest.approx(1.0) and coeffs.k == pytest.approx(1.0)
        assert instability_constant(coeffs, mode) == pytest.approx(2.0 * np.pi ** 2 / 3.0, rel=1e-14)

    def test_matches_stored_value(self, small_coeffs, small_mode):
        assert instability_constant(small_coeffs, small_mode) == pytest.approx(small_coeffs.K, rel=1e-15)
