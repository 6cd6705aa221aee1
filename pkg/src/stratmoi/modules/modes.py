"""Long-wave vertical eigenproblem (rho_bar phi')' = (g/c0^2) rho_bar' phi, phi(0) = phi(1) = 0."""

from typing import Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import LinAlgError, eigh_tridiagonal

from ..models.mode import VerticalMode
from ..models.profile import StratificationProfile
from ..utils import get_logger, handle_errors
from ..utils.exceptions import DomainError, NumericalError, SolverError

logger = get_logger(__name__)


def face_densities(profile: StratificationProfile, y: np.ndarray) -> np.ndarray:
    """Arithmetic-mean densities on the ny-1 cell faces."""
    rho = profile.density(y)
    return 0.5 * (rho[1:] + rho[:-1])


def _flux_operator(rho_face: np.ndarray, phi: np.ndarray, h: float) -> np.ndarray:
    """(rho_bar phi')' on interior nodes, conservative three-point stencil."""
    flux = rho_face * np.diff(phi)
    return np.diff(flux) / h ** 2


def _eigenpairs(profile: StratificationProfile, ny: int, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smallest `count` eigenpairs of -(rho_bar v')' = lam (-rho_bar') v on interior nodes."""
    y = np.linspace(0.0, 1.0, ny)
    h = y[1] - y[0]
    rho_face = face_densities(profile, y)
    b = -profile.density_prime(y[1:-1])
    if np.any(b <= 0.0):
        raise SolverError("rho_bar' must be negative on interior nodes for a definite eigenproblem")

    # B^{-1/2} A B^{-1/2} is symmetric tridiagonal
    scale = 1.0 / np.sqrt(b)
    diagonal = (rho_face[:-1] + rho_face[1:]) / h ** 2 * scale ** 2
    off_diagonal = -rho_face[1:-1] / h ** 2 * scale[:-1] * scale[1:]

    count = min(count, ny - 2)
    try:
        lam, w = eigh_tridiagonal(diagonal, off_diagonal, select='i', select_range=(0, count - 1))
    except LinAlgError as e:
        raise NumericalError(f"tridiagonal eigensolver did not converge: {e}")

    vectors = np.zeros((ny, lam.size))
    vectors[1:-1, :] = scale[:, None] * w
    return y, lam, vectors


def _sign_changes(v: np.ndarray) -> int:
    interior = v[1:-1]
    significant = interior[np.abs(interior) > 1e-10 * np.abs(interior).max()]
    return int(np.count_nonzero(np.diff(np.sign(significant))))


@handle_errors("Modes")
def solve_mode(profile: StratificationProfile, ny: int, mode_index: int = 1) -> VerticalMode:
    """Vertical mode with exactly mode_index - 1 interior zeros.

    Args:
        profile: Background stratification
        ny: Number of grid nodes including both walls
        mode_index: 1 for the fundamental mode

    Returns:
        Normalised VerticalMode (max|phi0| = 1, positive extremum)
    """
    if ny < 16:
        raise DomainError(f"ny ≥ 16 required (got {ny})")
    if mode_index < 1:
        raise DomainError(f"mode_index ≥ 1 required (got {mode_index})")

    y, lam, vectors = _eigenpairs(profile, ny, count=max(mode_index + 4, 8))

    for n in range(lam.size):
        if lam[n] <= 0.0 or not np.isfinite(lam[n]):
            continue
        if _sign_changes(vectors[:, n]) != mode_index - 1:
            continue
        if n != mode_index - 1:
            logger.warning(
                f"Mode {mode_index} found at eigenvalue index {n}; spurious discrete eigenvectors skipped"
            )
        phi = vectors[:, n]
        phi = phi / phi[np.argmax(np.abs(phi))]
        phi[0] = phi[-1] = 0.0
        c0 = float(np.sqrt(profile.g / lam[n]))
        h = y[1] - y[0]
        mode = VerticalMode(
            c0=c0,
            y=y,
            phi0=phi,
            phi0_prime=np.gradient(phi, h, edge_order=2),
            mode_index=mode_index,
            g=profile.g,
        )
        logger.info(f"Mode {mode_index} on ny={ny}: c0={c0:.10g}")
        return mode

    raise SolverError(f"no eigenvector with {mode_index - 1} interior zeros among {lam.size} eigenpairs")


def solve_fundamental_mode(profile: StratificationProfile, ny: int) -> VerticalMode:
    """Fundamental mode (no interior zero, largest long-wave speed)."""
    return solve_mode(profile, ny, mode_index=1)


def genericity_integral(mode: VerticalMode, profile: StratificationProfile) -> float:
    """Simpson quadrature of rho_bar phi0^3 over [0, 1]."""
    return float(simpson(profile.density(mode.y) * mode.phi0 ** 3, x=mode.y))


def mode_residual(mode: VerticalMode, profile: StratificationProfile,
                  stencil: str = "gradient", relative: bool = False) -> float:
    """Max-norm of (rho_bar phi0')' - (g/c0^2) rho_bar' phi0 on interior nodes.

    Args:
        stencil: "flux" reuses the solver's conservative stencil (round-off for
            the solver's own eigenvector); "gradient" applies an independent
            second-order np.gradient stencil, so the residual measures
            discretisation error.
        relative: Normalise by max|(g/c0^2) rho_bar' phi0|.
    """
    y, phi, h = mode.y, mode.phi0, mode.hy
    rhs = mode.eigenvalue * profile.density_prime(y) * phi

    if stencil == "flux":
        lhs = _flux_operator(face_densities(profile, y), phi, h)
    elif stencil == "gradient":
        flux = profile.density(y) * np.gradient(phi, h, edge_order=2)
        lhs = np.gradient(flux, h, edge_order=2)[1:-1]
    else:
        raise DomainError(f"unknown stencil '{stencil}'")

    residual = float(np.max(np.abs(lhs - rhs[1:-1])))
    if relative:
        residual /= float(np.max(np.abs(rhs)))
    return residual
