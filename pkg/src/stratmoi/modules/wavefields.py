"""Construction of small-amplitude wave fields and discrete field operators."""

from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded
from scipy.sparse.linalg import spsolve

from ..models.mode import KdvCoefficients, VerticalMode
from ..models.profile import StratificationProfile
from ..models.wave import Grid2D, Variation, WaveField
from ..utils import get_logger, handle_errors
from ..utils.config import DENSITY_CLOSURES
from ..utils.exceptions import (
    AmplitudeTooLargeError,
    DensityRangeError,
    DomainError,
    NumericalError,
    StepError,
    TruncationError,
)
from .kdv import soliton, soliton_derivative

logger = get_logger(__name__)

WaveBuilder = Callable[[float], WaveField]


def make_grid(coeffs: KdvCoefficients, eps: float, nx: int, ny: int,
              policy: str = "decay", decay_factor: float = 10.0, L_fixed: float = 100.0) -> Grid2D:
    """Grid whose half-width follows the soliton width: L = decay_factor / (k eps)."""
    if policy == "decay" and eps > 0.0:
        return Grid2D(nx, ny, decay_factor / (coeffs.k * eps))
    return Grid2D(nx, ny, L_fixed)


def mode_on_grid(mode: VerticalMode, y: np.ndarray) -> np.ndarray:
    """phi0 sampled on y, interpolating when the grids differ."""
    if mode.ny == y.size:
        return mode.phi0.copy()
    phi = CubicSpline(mode.y, mode.phi0)(y)
    phi[0] = phi[-1] = 0.0
    return phi


def quiescent_wave(profile: StratificationProfile, grid: Grid2D, c0: float) -> WaveField:
    """The quiescent state: rho = rho_bar(y), psi = sigma = 0, at c = c0."""
    rho_bar = profile.density(grid.y)
    return WaveField(
        grid=grid,
        c=c0,
        eps=0.0,
        c0=c0,
        rho=np.tile(rho_bar, (grid.nx, 1)),
        psi=np.zeros(grid.shape),
        sigma=np.zeros(grid.shape),
        rho_bar=rho_bar,
    )


def _extrapolate_edges(sigma: np.ndarray) -> None:
    """Fill boundary nodes by quadratic extrapolation from the interior, in place."""
    sigma[0, 1:-1] = 3.0 * sigma[1, 1:-1] - 3.0 * sigma[2, 1:-1] + sigma[3, 1:-1]
    sigma[-1, 1:-1] = 3.0 * sigma[-2, 1:-1] - 3.0 * sigma[-3, 1:-1] + sigma[-4, 1:-1]
    sigma[:, 0] = 3.0 * sigma[:, 1] - 3.0 * sigma[:, 2] + sigma[:, 3]
    sigma[:, -1] = 3.0 * sigma[:, -2] - 3.0 * sigma[:, -3] + sigma[:, -4]


def _face_coefficients(rho: np.ndarray, grid: Grid2D):
    """Face densities over h^2 around every interior node: (east, west, north, south)."""
    centre = rho[1:-1, 1:-1]
    east = 0.5 * (rho[2:, 1:-1] + centre) / grid.hx ** 2
    west = 0.5 * (rho[:-2, 1:-1] + centre) / grid.hx ** 2
    north = 0.5 * (rho[1:-1, 2:] + centre) / grid.hy ** 2
    south = 0.5 * (rho[1:-1, :-2] + centre) / grid.hy ** 2
    return east, west, north, south


def sigma_from_psi(rho: np.ndarray, psi: np.ndarray, grid: Grid2D) -> np.ndarray:
    """sigma = -div(rho grad psi), flux form with arithmetic-mean face densities.

    Interior nodes use the conservative five-point stencil; boundary nodes
    are extrapolated (one-sided) from the interior.
    """
    east, west, north, south = _face_coefficients(rho, grid)
    centre = psi[1:-1, 1:-1]
    sigma = np.zeros(grid.shape)
    sigma[1:-1, 1:-1] = -(
        east * (psi[2:, 1:-1] - centre) - west * (centre - psi[:-2, 1:-1])
        + north * (psi[1:-1, 2:] - centre) - south * (centre - psi[1:-1, :-2])
    )
    _extrapolate_edges(sigma)
    return sigma


def solve_streamfunction(rho: np.ndarray, sigma: np.ndarray, grid: Grid2D) -> np.ndarray:
    """psi with -div(rho grad psi) = sigma on interior nodes and psi = 0 on the boundary.

    Uses the same stencil as sigma_from_psi, so the two are inverse to each
    other on fields that vanish on the boundary.
    """
    east, west, north, south = _face_coefficients(rho, grid)
    mx, my = grid.nx - 2, grid.ny - 2
    index = np.arange(mx * my).reshape(mx, my)

    rows = [index.ravel(), index[:-1, :].ravel(), index[1:, :].ravel(),
            index[:, :-1].ravel(), index[:, 1:].ravel()]
    cols = [index.ravel(), index[1:, :].ravel(), index[:-1, :].ravel(),
            index[:, 1:].ravel(), index[:, :-1].ravel()]
    vals = [(east + west + north + south).ravel(), -east[:-1, :].ravel(), -west[1:, :].ravel(),
            -north[:, :-1].ravel(), -south[:, 1:].ravel()]

    operator = sparse.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mx * my, mx * my),
    )
    interior = spsolve(operator, sigma[1:-1, 1:-1].ravel())
    if not np.all(np.isfinite(interior)):
        raise NumericalError("streamfunction solve returned non-finite values")

    psi = np.zeros(grid.shape)
    psi[1:-1, 1:-1] = interior.reshape(mx, my)
    return psi


def gradient_squared(psi: np.ndarray, grid: Grid2D) -> np.ndarray:
    """|grad psi|^2 with the second-order differences of partial_x and partial_y."""
    return partial_x(psi, grid) ** 2 + partial_y(psi, grid) ** 2


def streamline_density(profile: StratificationProfile, psi: np.ndarray, c: float, grid: Grid2D) -> np.ndarray:
    """rho = rho_bar(y - psi/c): density carried unchanged along the streamlines of the moving frame."""
    return profile.density(grid.Y - psi / c)


def long_wave_residual(psi: np.ndarray, c: float, profile: StratificationProfile, grid: Grid2D) -> np.ndarray:
    """sigma + (rho_bar'(z)/c)(g psi/c - ½|grad psi|^2), z = y - psi/c.

    Vanishes for an exact wave of speed c under the streamline closure; it is
    the density component of (H - cI)' scaled by rho_bar'(z)/c.
    """
    z = grid.Y - psi / c
    sigma = sigma_from_psi(profile.density(z), psi, grid)
    return sigma + profile.density_prime(z) / c * (profile.g * psi / c - 0.5 * gradient_squared(psi, grid))


def _vertical_operator(profile: StratificationProfile, c: float, grid: Grid2D) -> Tuple[np.ndarray, np.ndarray]:
    """Bands of -(rho_bar psi_y)_y + (g/c^2) rho_bar' psi on interior y-nodes (symmetric tridiagonal)."""
    y = grid.y
    rho = profile.density(y)
    face = 0.5 * (rho[1:] + rho[:-1])
    diagonal = (face[:-1] + face[1:]) / grid.hy ** 2 + profile.g / c ** 2 * profile.density_prime(y[1:-1])
    off_diagonal = -face[1:-1] / grid.hy ** 2
    return diagonal, off_diagonal


class WaveCorrector:
    """Removes the long-wave residual of a wave beyond leading order, at fixed speed.

    Each pass splits the residual against the near-null vertical vector v0 of
    the long-wave operator at speed c. The part orthogonal to v0 is removed
    column by column with a tridiagonal solve in y; the v0 part sets an
    amplitude correction b(x) v0(y) from a tridiagonal solve in x, with the
    nonlinear coupling obtained by differencing the residual along v0.
    """

    def __init__(self, profile: StratificationProfile, c: float, grid: Grid2D, passes: int = 2):
        self.profile = profile
        self.c = c
        self.grid = grid
        self.passes = passes
        diagonal, off_diagonal = _vertical_operator(profile, c, grid)
        try:
            _, vector = eigh_tridiagonal(diagonal, off_diagonal, select='i', select_range=(0, 0))
        except LinAlgError as e:
            raise NumericalError(f"vertical operator eigensolver did not converge: {e}")
        self.v0 = vector[:, 0]
        self.bands = np.zeros((3, diagonal.size))
        self.bands[0, 1:] = off_diagonal
        self.bands[1, :] = diagonal
        self.bands[2, :-1] = off_diagonal

    def residual(self, psi: np.ndarray) -> np.ndarray:
        return long_wave_residual(psi, self.c, self.profile, self.grid)

    def _project(self, columns: np.ndarray) -> np.ndarray:
        """Component along v0 of each column; columns are (ny-2, nx)."""
        return self.v0 @ columns

    def vertical_step(self, psi: np.ndarray) -> np.ndarray:
        columns = self.residual(psi)[:, 1:-1].T
        columns = columns - np.outer(self.v0, self._project(columns))
        delta = solve_banded((1, 1), self.bands, -columns)
        delta -= np.outer(self.v0, self._project(delta))
        delta[:, 0] = delta[:, -1] = 0.0
        out = psi.copy()
        out[:, 1:-1] += delta.T
        return out

    def amplitude_step(self, psi: np.ndarray) -> np.ndarray:
        grid = self.grid
        mode_field = np.zeros(grid.shape)
        mode_field[:, 1:-1] = self.v0[None, :]

        forcing = self._project(self.residual(psi)[:, 1:-1].T)
        forcing = 0.5 * (forcing + forcing[::-1])
        t = 1e-4 * max(float(np.abs(psi).max()), 1e-300)
        coupling = self._project(
            (self.residual(psi + t * mode_field) - self.residual(psi - t * mode_field))[:, 1:-1].T
        ) / (2.0 * t)

        rho = streamline_density(self.profile, psi, self.c, grid)
        flux = 0.5 * (rho[1:, 1:-1] + rho[:-1, 1:-1]) @ self.v0 ** 2 / grid.hx ** 2

        # unknowns b_1 .. b_{nx-2}; b vanishes at x = ±L
        bands = np.zeros((3, grid.nx - 2))
        bands[0, 1:] = -flux[1:-1]
        bands[1, :] = coupling[1:-1] + flux[1:] + flux[:-1]
        bands[2, :-1] = -flux[1:-1]
        b = np.zeros(grid.nx)
        b[1:-1] = solve_banded((1, 1), bands, -forcing[1:-1])
        # the odd translation mode is a near-kernel of the x-operator
        b = 0.5 * (b + b[::-1])
        return psi + np.outer(b, mode_field[0])

    def correct(self, psi: np.ndarray) -> np.ndarray:
        """psi after the configured number of passes."""
        start = float(np.abs(self.residual(psi)[1:-1, 1:-1]).max())
        for _ in range(self.passes):
            psi = self.amplitude_step(self.vertical_step(psi))
        if not np.all(np.isfinite(psi)):
            raise NumericalError("wave correction returned non-finite values")
        end = float(np.abs(self.residual(psi)[1:-1, 1:-1]).max())
        logger.debug(f"Long-wave residual {start:.3e} -> {end:.3e} after {self.passes} correction pass(es)")
        return psi


@handle_errors("Wavefields")
def build_wave(mode: VerticalMode, coeffs: KdvCoefficients, profile: StratificationProfile,
               eps: float, grid: Grid2D, strict: bool = False, decay_factor: float = 10.0,
               closure: str = "linear", passes: int = 2) -> WaveField:
    """Wave of speed c = c0 + eps^2 from the weakly nonlinear expansion.

    psi = eps^2 A(eps x) phi0(y) and, by closure:
      linear:     rho = rho_bar(y) - (eps^2/c0) A(eps x) rho_bar'(y) phi0(y)
      streamline: rho = rho_bar(y - psi/c)
      corrected:  streamline, with psi refined by WaveCorrector passes
    sigma from sigma_from_psi in every case.

    Raises:
        AmplitudeTooLargeError: if rho <= 0 anywhere
        TruncationError: in strict mode, if grid.L < decay_factor / (k eps)
    """
    if closure not in DENSITY_CLOSURES:
        raise DomainError(f"closure must be one of {DENSITY_CLOSURES} (got {closure!r})")
    if eps < 0.0:
        raise DomainError(f"eps must be non-negative (got {eps})")
    if eps == 0.0:
        return quiescent_wave(profile, grid, mode.c0)

    required = decay_factor / (coeffs.k * eps)
    if grid.L < required * (1.0 - 1e-12):
        message = f"half-width L={grid.L:.6g} below {required:.6g}; soliton tail truncated at x=±L"
        if strict:
            raise TruncationError(message)
        logger.warning(message)

    y = grid.y
    c = mode.c0 + eps ** 2
    phi = mode_on_grid(mode, y)
    rho_bar = profile.density(y)
    A = soliton(coeffs, eps * grid.x)

    psi = eps ** 2 * np.outer(A, phi)
    if closure == "linear":
        rho = rho_bar[None, :] - (eps ** 2 / mode.c0) * np.outer(A, profile.density_prime(y) * phi)
    else:
        if closure == "corrected":
            psi = WaveCorrector(profile, c, grid, passes).correct(psi)
        rho = streamline_density(profile, psi, c, grid)
    if np.any(rho <= 0.0):
        raise AmplitudeTooLargeError(f"eps={eps} gives non-positive density; reduce the amplitude")

    return WaveField(
        grid=grid,
        c=c,
        eps=eps,
        c0=mode.c0,
        rho=rho,
        psi=psi,
        sigma=sigma_from_psi(rho, psi, grid),
        rho_bar=rho_bar,
    )


def wave_family(mode: VerticalMode, coeffs: KdvCoefficients, profile: StratificationProfile,
                grid: Grid2D, strict: bool = False, closure: str = "linear", passes: int = 2) -> WaveBuilder:
    """Closure building waves of any amplitude on one fixed grid."""
    def builder(eps: float) -> WaveField:
        return build_wave(mode, coeffs, profile, eps, grid, strict=strict, closure=closure, passes=passes)
    return builder


def displacement_scale(coeffs: KdvCoefficients, eps: float) -> float:
    """Peak streamline displacement eps^2 |a| / c0 as a fraction of the depth."""
    return eps ** 2 * abs(coeffs.a) / coeffs.c0


def sigma_leading(wave: WaveField, mode: VerticalMode, coeffs: KdvCoefficients,
                  profile: StratificationProfile) -> np.ndarray:
    """Leading form -(g/c0^2) rho_bar' phi0 eps^2 A(eps x)."""
    phi = mode_on_grid(mode, wave.grid.y)
    A = soliton(coeffs, wave.eps * wave.grid.x)
    return -mode.eigenvalue * wave.eps ** 2 * np.outer(A, profile.density_prime(wave.grid.y) * phi)


def perturb(wave: WaveField, direction: Variation, h: float) -> WaveField:
    """State (rho + h d_rho, sigma + h d_sigma) with psi recovered from the perturbed state.

    Raises:
        DensityRangeError: if the perturbed density is not positive (use a smaller h)
    """
    rho = wave.rho + h * direction.d_rho
    sigma = wave.sigma + h * direction.d_sigma
    if np.any(rho <= 0.0):
        raise DensityRangeError(f"perturbed density not positive at step h={h:.3e}; use a smaller step")
    return wave.with_state(rho, sigma, solve_streamfunction(rho, sigma, wave.grid))


def partial_x(field: np.ndarray, grid: Grid2D) -> np.ndarray:
    """d/dx by central differences, second-order one-sided at the ends.

    Columns constant in x get an exact zero; the one-sided end stencils
    would otherwise leave round-off there.
    """
    derivative = np.gradient(field, grid.hx, axis=0, edge_order=2)
    derivative[:, np.all(field == field[:1, :], axis=0)] = 0.0
    return derivative


def partial_y(field: np.ndarray, grid: Grid2D) -> np.ndarray:
    """d/dy by central differences, second-order one-sided at the walls."""
    return np.gradient(field, grid.hy, axis=1, edge_order=2)


def dx_direction(wave: WaveField) -> Variation:
    """The translation direction (d rho/dx, d sigma/dx)."""
    return Variation(partial_x(wave.rho, wave.grid), partial_x(wave.sigma, wave.grid))


def dy_direction(wave: WaveField) -> Variation:
    """(d rho/dy - rho_bar', d sigma/dy); a non-kernel comparison direction."""
    d_rho = partial_y(wave.rho, wave.grid) - partial_y(wave.background, wave.grid)
    return Variation(d_rho, partial_y(wave.sigma, wave.grid))


def check_speed_step(eps: float, delta_c: float) -> None:
    """Raise StepError unless 0 < delta_c < eps^2, with a relative margin for round-off in eps^2."""
    if not 0.0 < delta_c < eps ** 2 * (1.0 - 1e-9):
        raise StepError(f"delta_c={delta_c:.3e} must satisfy 0 < delta_c < eps^2={eps ** 2:.3e}")


@handle_errors("Wavefields")
def partial_c(builder: WaveBuilder, eps: float, delta_c: float) -> Variation:
    """(phi(c + dc) - phi(c - dc)) / (2 dc) over the wave family at c = c0 + eps^2.

    Raises:
        StepError: if delta_c >= eps^2 (c - dc would reach c0)
    """
    check_speed_step(eps, delta_c)
    plus = builder(float(np.sqrt(eps ** 2 + delta_c)))
    minus = builder(float(np.sqrt(eps ** 2 - delta_c)))
    return Variation(
        (plus.rho - minus.rho) / (2.0 * delta_c),
        (plus.sigma - minus.sigma) / (2.0 * delta_c),
    )


def analytic_partial_c(wave: WaveField, mode: VerticalMode, coeffs: KdvCoefficients,
                       profile: StratificationProfile, closure: str = "linear") -> Variation:
    """d phi/d(eps^2) of the expansion, differentiated in closed form.

    Available for the linear and streamline closures; the corrected wave has
    no closed form.
    """
    if closure not in ("linear", "streamline"):
        raise DomainError(f"no closed-form speed derivative for closure {closure!r}")
    grid, eps = wave.grid, wave.eps
    phi = mode_on_grid(mode, grid.y)
    X = eps * grid.x
    # d/d(eps^2) [eps^2 A(eps x)] = A + (X/2) A'
    envelope = soliton(coeffs, X) + 0.5 * X * soliton_derivative(coeffs, X)
    psi_c = np.outer(envelope, phi)
    if closure == "linear":
        rho_c = -np.outer(envelope, profile.density_prime(grid.y) * phi) / mode.c0
    else:
        # dc/d(eps^2) = 1
        z = grid.Y - wave.psi / wave.c
        rho_c = -profile.density_prime(z) * (psi_c / wave.c - wave.psi / wave.c ** 2)
    # sigma_from_psi is bilinear in (rho, psi)
    sigma_c = sigma_from_psi(wave.rho, psi_c, grid) + sigma_from_psi(rho_c, wave.psi, grid)
    return Variation(rho_c, sigma_c)


def wave_to_frame(wave: WaveField) -> pd.DataFrame:
    """Long-format table with columns x, y, rho, psi, sigma (x-major order)."""
    return pd.DataFrame({
        "x": np.asarray(wave.grid.X).ravel(),
        "y": np.asarray(wave.grid.Y).ravel(),
        "rho": wave.rho.ravel(),
        "psi": wave.psi.ravel(),
        "sigma": wave.sigma.ravel(),
    })


def wave_metadata(wave: WaveField, profile: StratificationProfile) -> Dict[str, Any]:
    """JSON sidecar for a wave CSV."""
    meta = wave.metadata()
    meta["profile"] = profile.to_dict()
    return meta


def wave_from_frame(frame: pd.DataFrame, meta: Dict[str, Any],
                    profile: Optional[StratificationProfile] = None) -> WaveField:
    """Rebuild a WaveField from a CSV table and its sidecar."""
    if profile is None:
        profile = StratificationProfile.from_dict(meta["profile"])
    grid = Grid2D(int(meta["nx"]), int(meta["ny"]), float(meta["L"]))
    shape = grid.shape
    return WaveField(
        grid=grid,
        c=float(meta["c"]),
        eps=float(meta["eps"]),
        c0=float(meta["c0"]),
        rho=frame["rho"].to_numpy(dtype=float).reshape(shape),
        psi=frame["psi"].to_numpy(dtype=float).reshape(shape),
        sigma=frame["sigma"].to_numpy(dtype=float).reshape(shape),
        rho_bar=profile.density(grid.y),
    )


def read_wave_csv(path) -> pd.DataFrame:
    """Read a wave table with exact float round-tripping."""
    return pd.read_csv(path, float_precision="round_trip")
