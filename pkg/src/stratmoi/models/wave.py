"""Gridded wave field models."""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Dict

import numpy as np
from scipy.integrate import simpson

from ..utils.exceptions import DomainError


def _simpson_weights(coords: np.ndarray) -> np.ndarray:
    """Nodal weights w with sum(w * f) == simpson(f, x=coords)."""
    return simpson(np.eye(coords.size), x=coords, axis=1)


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor grid on [-L, L] x [0, 1]; arrays are indexed [i_x, j_y]."""
    nx: int
    ny: int
    L: float

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise DomainError(f"nx, ny ≥ 16 required (got nx={self.nx}, ny={self.ny})")
        if self.L <= 0:
            raise DomainError(f"half-width L must be positive (got {self.L})")

    @property
    def hx(self) -> float:
        return 2.0 * self.L / (self.nx - 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny - 1)

    @cached_property
    def x(self) -> np.ndarray:
        """Horizontal nodes, exactly antisymmetric about 0."""
        x = self.L * np.linspace(-1.0, 1.0, self.nx)
        return 0.5 * (x - x[::-1])

    @cached_property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ny)

    @cached_property
    def X(self) -> np.ndarray:
        return np.broadcast_to(self.x[:, None], self.shape)

    @cached_property
    def Y(self) -> np.ndarray:
        return np.broadcast_to(self.y[None, :], self.shape)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @cached_property
    def weights(self) -> np.ndarray:
        """Tensor-product Simpson weights, shape (nx, ny)."""
        return np.outer(_simpson_weights(self.x), _simpson_weights(self.y))

    def integrate(self, field: np.ndarray) -> float:
        """Quadrature of a nodal field over the truncated strip."""
        return float(np.sum(self.weights * field))

    def refined(self) -> "Grid2D":
        """Same domain with spacings halved."""
        return Grid2D(2 * self.nx - 1, 2 * self.ny - 1, self.L)

    def to_dict(self) -> Dict[str, Any]:
        return {"nx": self.nx, "ny": self.ny, "L": self.L, "hx": self.hx, "hy": self.hy}


@dataclass(frozen=True, eq=False)
class Variation:
    """A (rho, sigma) pair on a grid: variation direction, gradient or operator image."""
    d_rho: np.ndarray
    d_sigma: np.ndarray

    def __post_init__(self):
        if self.d_rho.shape != self.d_sigma.shape:
            raise ValueError(f"component shapes differ: {self.d_rho.shape} vs {self.d_sigma.shape}")

    def __add__(self, other: "Variation") -> "Variation":
        return Variation(self.d_rho + other.d_rho, self.d_sigma + other.d_sigma)

    def __sub__(self, other: "Variation") -> "Variation":
        return Variation(self.d_rho - other.d_rho, self.d_sigma - other.d_sigma)

    def __mul__(self, scalar: float) -> "Variation":
        return Variation(scalar * self.d_rho, scalar * self.d_sigma)

    __rmul__ = __mul__

    def __neg__(self) -> "Variation":
        return Variation(-self.d_rho, -self.d_sigma)

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.d_rho)) and np.all(np.isfinite(self.d_sigma)))

    def dot(self, other: "Variation", grid: Grid2D) -> float:
        """Quadrature-weighted L2 pairing of both components."""
        return grid.integrate(self.d_rho * other.d_rho + self.d_sigma * other.d_sigma)

    def norm(self, grid: Grid2D) -> float:
        return float(np.sqrt(max(self.dot(self, grid), 0.0)))

    def max_norm(self) -> float:
        return float(max(np.abs(self.d_rho).max(), np.abs(self.d_sigma).max()))

    @classmethod
    def zeros(cls, grid: Grid2D) -> "Variation":
        return cls(np.zeros(grid.shape), np.zeros(grid.shape))


@dataclass(frozen=True, eq=False)
class WaveField:
    """State (rho, sigma) with its streamfunction psi on a grid, at speed c = c0 + eps^2."""
    grid: Grid2D
    c: float
    eps: float
    c0: float
    rho: np.ndarray
    psi: np.ndarray
    sigma: np.ndarray
    rho_bar: np.ndarray

    @property
    def state(self) -> Variation:
        """The (rho, sigma) pair."""
        return Variation(self.rho, self.sigma)

    @property
    def background(self) -> np.ndarray:
        """rho_bar(y) broadcast to the grid."""
        return np.broadcast_to(self.rho_bar[None, :], self.grid.shape)

    @property
    def density_anomaly(self) -> np.ndarray:
        return self.rho - self.background

    def with_state(self, rho: np.ndarray, sigma: np.ndarray, psi: np.ndarray) -> "WaveField":
        """Copy with a new state, keeping grid, speed and background."""
        return replace(self, rho=rho, sigma=sigma, psi=psi)

    def metadata(self) -> Dict[str, Any]:
        return {
            "c0": self.c0,
            "c": self.c,
            "eps": self.eps,
            "L": self.grid.L,
            "nx": self.grid.nx,
            "ny": self.grid.ny,
        }
