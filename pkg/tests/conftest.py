"""Shared fixtures: profiles, small-resolution modes and waves."""

import numpy as np
import pytest

from stratmoi.models import Grid2D, StratificationProfile
from stratmoi.modules.kdv import compute_coefficients
from stratmoi.modules.modes import solve_fundamental_mode
from stratmoi.modules.wavefields import build_wave, make_grid

# Small resolution used throughout the fast tests
SMALL_NX = 129
SMALL_NY = 65


@pytest.fixture(scope="session")
def exponential():
    return StratificationProfile.exponential(rho0=1.0, beta=1.0, g=1.0)


@pytest.fixture(scope="session")
def linear():
    return StratificationProfile.linear(rho_bottom=1.0, rho_top=0.9)


@pytest.fixture(scope="session")
def tanh_pycnocline():
    return StratificationProfile.tanh_pycnocline(amplitude=0.05, center=0.3, thickness=0.1)


@pytest.fixture(scope="session")
def small_mode(exponential):
    """Fundamental mode on the small grid's vertical resolution."""
    return solve_fundamental_mode(exponential, SMALL_NY)


@pytest.fixture(scope="session")
def small_coeffs(small_mode, exponential):
    return compute_coefficients(small_mode, exponential)


@pytest.fixture(scope="session")
def make_wave(small_mode, small_coeffs, exponential):
    """Factory for waves on a SMALL_NX x SMALL_NY grid fitted to the amplitude."""
    def factory(eps, nx=SMALL_NX, ny=SMALL_NY, closure="linear"):
        grid = make_grid(small_coeffs, eps, nx, ny)
        return build_wave(small_mode, small_coeffs, exponential, eps, grid, closure=closure)
    return factory


@pytest.fixture
def bump_grid():
    return Grid2D(65, 33, 6.0)


@pytest.fixture(scope="session")
def gaussian_bump():
    """Factory for a smooth field, Gaussian in x, vanishing on the walls."""
    def factory(grid: Grid2D, amplitude: float = 1e-3) -> np.ndarray:
        return amplitude * np.outer(np.exp(-grid.x ** 2), np.sin(np.pi * grid.y))
    return factory
