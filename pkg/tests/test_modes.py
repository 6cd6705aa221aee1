"""Tests for the vertical long-wave eigenproblem."""

import numpy as np
import pytest

from stratmoi.models import StratificationProfile
from stratmoi.modules.modes import genericity_integral, mode_residual, solve_fundamental_mode, solve_mode
from stratmoi.utils.exceptions import DomainError, SolverError

C0_EXPONENTIAL = 1.0 / np.sqrt(np.pi ** 2 + 0.25)


def exact_phi(y: np.ndarray, n: int = 1) -> np.ndarray:
    """exp(y/2) sin(n pi y), normalised to max 1."""
    phi = np.exp(0.5 * y) * np.sin(n * np.pi * y)
    return phi / phi[np.argmax(np.abs(phi))]


class TestExponentialMode:
    def test_speed_matches_closed_form(self, exponential):
        mode = solve_fundamental_mode(exponential, 2001)
        assert mode.c0 == pytest.approx(C0_EXPONENTIAL, abs=1e-5)

    def test_second_order_convergence(self, exponential):
        coarse = abs(solve_fundamental_mode(exponential, 501).c0 - C0_EXPONENTIAL)
        fine = abs(solve_fundamental_mode(exponential, 1001).c0 - C0_EXPONENTIAL)
        assert coarse / fine == pytest.approx(4.0, abs=0.5)

    def test_eigenvector(self, exponential):
        mode = solve_fundamental_mode(exponential, 1001)
        np.testing.assert_allclose(mode.phi0, exact_phi(mode.y), atol=1e-4)

    def test_normalisation(self, small_mode):
        assert np.max(np.abs(small_mode.phi0)) == pytest.approx(1.0, abs=1e-15)
        assert small_mode.phi0.max() == pytest.approx(1.0, abs=1e-15)
        assert small_mode.phi0[0] == 0.0 and small_mode.phi0[-1] == 0.0
        assert small_mode.interior_zeros == 0

    def test_second_mode(self, exponential):
        mode = solve_mode(exponential, 1001, mode_index=2)
        expected = np.sqrt(1.0 / (4 * np.pi ** 2 + 0.25))
        assert mode.c0 == pytest.approx(expected, rel=1e-4)
        assert mode.interior_zeros == 1
        assert mode.c0 < solve_fundamental_mode(exponential, 1001).c0


class TestResidual:
    def test_flux_residual_is_roundoff(self, small_mode, exponential):
        assert mode_residual(small_mode, exponential, stencil="flux", relative=True) < 1e-10

    def test_gradient_residual_decreases(self, exponential):
        coarse = mode_residual(solve_fundamental_mode(exponential, 201), exponential, relative=True)
        fine = mode_residual(solve_fundamental_mode(exponential, 401), exponential, relative=True)
        assert fine < coarse
        assert fine < 5e-3

    def test_unknown_stencil(self, small_mode, exponential):
        with pytest.raises(DomainError):
            mode_residual(small_mode, exponential, stencil="spectral")


class TestOtherProfiles:
    @pytest.mark.parametrize("profile_name", ["linear", "tanh_pycnocline"])
    def test_fundamental_mode_is_positive(self, profile_name, request):
        profile = request.getfixturevalue(profile_name)
        mode = solve_fundamental_mode(profile, 257)
        assert mode.c0 > 0.0
        assert np.all(mode.phi0[1:-1] > 0.0)

    def test_linear_speed(self, linear):
        """Weak linear stratification: c0 ~ sqrt(g * 0.1 / pi^2) to leading order."""
        mode = solve_fundamental_mode(linear, 1001)
        assert mode.c0 == pytest.approx(np.sqrt(0.1) / np.pi, rel=0.05)

    def test_genericity_integral_nonzero(self, tanh_pycnocline):
        mode = solve_fundamental_mode(tanh_pycnocline, 257)
        assert genericity_integral(mode, tanh_pycnocline) > 0.0


class TestErrors:
    def test_too_few_nodes(self, exponential):
        with pytest.raises(DomainError, match="ny"):
            solve_fundamental_mode(exponential, 15)

    def test_bad_mode_index(self, exponential):
        with pytest.raises(DomainError):
            solve_mode(exponential, 65, mode_index=0)

    def test_unstable_profile(self):
        with pytest.raises(SolverError):
            solve_fundamental_mode(StratificationProfile.linear(rho_bottom=0.9, rho_top=1.0), 65)
