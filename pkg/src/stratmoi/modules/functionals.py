"""Energy, momentum and Casimir functionals on gridded states, with their variations.

States are pairs (rho, sigma); psi is carried alongside and recovered by an
elliptic solve whenever a state is perturbed. Pairings use the grid's
tensor-product Simpson weights over both components.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from ..models.profile import StratificationProfile
from ..models.results import FunctionalValues
from ..models.wave import Grid2D, Variation, WaveField
from ..utils import get_logger, handle_errors
from ..utils.config import CASIMIR_VARIANTS
from ..utils.exceptions import ConfigurationError, DomainError, StepError
from .stratification import continued_inverse
from .wavefields import gradient_squared, partial_x, partial_y, perturb

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class FunctionalSelector(Enum):
    """Scalar functionals addressable by the finite-difference derivatives."""
    H = "H"
    I = "I"
    H_MINUS_CI = "H-cI"
    HTILDE = "Htilde"
    ITILDE = "Itilde"

    def pick(self, values: FunctionalValues) -> float:
        if self is FunctionalSelector.H:
            return values.H
        if self is FunctionalSelector.I:
            return values.I
        if self is FunctionalSelector.H_MINUS_CI:
            return values.m
        if self is FunctionalSelector.HTILDE:
            return values.Htilde
        return values.Itilde


def ordered_map(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """Ordered map, threaded when jobs > 1."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _check_variant(casimir_variant: str) -> None:
    if casimir_variant not in CASIMIR_VARIANTS:
        raise ConfigurationError(f"casimir_variant must be one of {CASIMIR_VARIANTS} (got {casimir_variant!r})")


def evaluate_functionals(wave: WaveField, profile: StratificationProfile,
                         casimir_variant: str = "sigma_free") -> FunctionalValues:
    """Htilde, Itilde and the Casimir corrections dH, dI at one state.

    Htilde = ∬ ½ rho |grad psi|^2 + g y (rho - rho_bar),  Itilde = ∬ y sigma,
    dH = -g ∬ F(rho, y) with F = ∫_{rho_bar(y)}^{rho} rho_bar^{-1},  dI = -∬ rho_bar^{-1}(rho) sigma.

    The "sigma_weighted" variant multiplies the dH integrand by sigma.
    """
    _check_variant(casimir_variant)
    grid, g = wave.grid, profile.g
    Y = grid.Y
    background = wave.background

    kinetic = 0.5 * wave.rho * gradient_squared(wave.psi, grid)
    potential = g * Y * (wave.rho - background)
    Htilde = grid.integrate(kinetic + potential)
    Itilde = grid.integrate(Y * wave.sigma)

    heights, continued = continued_inverse(profile, wave.rho)
    F = profile.inverse_antiderivative(wave.rho) - profile.inverse_antiderivative(background)
    if casimir_variant == "sigma_weighted":
        F = F * wave.sigma
    dH = -g * grid.integrate(F)
    dI = -grid.integrate(heights * wave.sigma)

    return FunctionalValues(
        Htilde=Htilde,
        Itilde=Itilde,
        dH=dH,
        dI=dI,
        c=wave.c,
        casimir_variant=casimir_variant,
        continued_nodes=continued,
    )


def momentum_kinetic_form(wave: WaveField) -> float:
    """(1/c) ∬ rho |grad psi|^2."""
    if wave.c <= 0.0:
        raise DomainError(f"speed must be positive (got {wave.c})")
    return wave.grid.integrate(wave.rho * gradient_squared(wave.psi, wave.grid)) / wave.c


def first_variation_I(wave: WaveField, profile: StratificationProfile) -> Variation:
    """I'(phi) = (-(rho_bar^{-1})'(rho) sigma, y - rho_bar^{-1}(rho))."""
    heights, _ = continued_inverse(profile, wave.rho)
    return Variation(
        -profile.inverse_prime(wave.rho) * wave.sigma,
        wave.grid.Y - heights,
    )


def first_variation_H_minus_cI(wave: WaveField, profile: StratificationProfile,
                               c: Optional[float] = None) -> Variation:
    """(H - cI)'(phi) in closed form, sigma-free Casimir.

    (g (y - z) - ½|grad psi|^2 + c sigma (rho_bar^{-1})'(rho),  psi - c (y - z)),  z = rho_bar^{-1}(rho).
    Vanishes for exact solitary waves of speed c.
    """
    c = wave.c if c is None else c
    heights, _ = continued_inverse(profile, wave.rho)
    offset = wave.grid.Y - heights
    d_rho = (profile.g * offset - 0.5 * gradient_squared(wave.psi, wave.grid)
             + c * wave.sigma * profile.inverse_prime(wave.rho))
    return Variation(d_rho, wave.psi - c * offset)


def first_variation_Htilde_minus_cItilde(wave: WaveField, profile: StratificationProfile,
                                         c: Optional[float] = None) -> Variation:
    """(Htilde - c Itilde)'(phi) = (g y - ½|grad psi|^2, psi - c y); nonzero at a wave."""
    c = wave.c if c is None else c
    Y = wave.grid.Y
    return Variation(profile.g * Y - 0.5 * gradient_squared(wave.psi, wave.grid), wave.psi - c * Y)


def casimir_gradient(wave: WaveField, profile: StratificationProfile,
                     casimir_variant: str = "sigma_free") -> Variation:
    """(dH - c dI)'(phi) for the chosen dH variant."""
    _check_variant(casimir_variant)
    g, c = profile.g, wave.c
    heights, _ = continued_inverse(profile, wave.rho)
    dI = Variation(-profile.inverse_prime(wave.rho) * wave.sigma, -heights)
    if casimir_variant == "sigma_free":
        dH = Variation(-g * heights, np.zeros(wave.grid.shape))
    else:
        F = profile.inverse_antiderivative(wave.rho) - profile.inverse_antiderivative(wave.background)
        dH = Variation(-g * heights * wave.sigma, -g * F)
    return dH - c * dI


def apply_J(wave: WaveField, v: Variation) -> Variation:
    """Action of the state-dependent skew operator on v = (a, b).

    (rho_y b_x - rho_x b_y,  rho_y a_x - rho_x a_y + sigma_y b_x - sigma_x b_y)
    """
    grid = wave.grid
    rho_x, rho_y = partial_x(wave.rho, grid), partial_y(wave.rho, grid)
    sigma_x, sigma_y = partial_x(wave.sigma, grid), partial_y(wave.sigma, grid)
    a_x, a_y = partial_x(v.d_rho, grid), partial_y(v.d_rho, grid)
    b_x, b_y = partial_x(v.d_sigma, grid), partial_y(v.d_sigma, grid)
    return Variation(
        rho_y * b_x - rho_x * b_y,
        rho_y * a_x - rho_x * a_y + sigma_y * b_x - sigma_x * b_y,
    )


def check_casimir(wave: WaveField, profile: StratificationProfile,
                  casimir_variant: str = "sigma_free") -> dict:
    """Max-norms of J (dH - c dI)'(phi); small only for a true Casimir."""
    image = apply_J(wave, casimir_gradient(wave, profile, casimir_variant))
    return {
        "casimir_variant": casimir_variant,
        "rho": float(np.abs(image.d_rho).max()),
        "sigma": float(np.abs(image.d_sigma).max()),
    }


def anomaly_scale(wave: WaveField) -> float:
    """Max-norm of phi - phi_bar over both components, 1 for the quiescent state."""
    scale = max(float(np.abs(wave.density_anomaly).max()), float(np.abs(wave.sigma).max()))
    return scale if scale > 0.0 else 1.0


def relative_step(wave: WaveField, direction: Variation, rel: float = 1e-3) -> float:
    """h = rel * (max-norm of phi - phi_bar) / ||direction||."""
    if not direction.is_finite:
        raise StepError("direction has non-finite entries")
    scale = anomaly_scale(wave)
    norm = direction.norm(wave.grid)
    if norm == 0.0:
        raise StepError("zero direction")
    return rel * scale / norm


def _value_at(selector: FunctionalSelector, wave: WaveField, profile: StratificationProfile,
              casimir_variant: str, direction: Variation, h: float) -> float:
    state = perturb(wave, direction, h)
    return selector.pick(evaluate_functionals(state, profile, casimir_variant))


@handle_errors("Functionals")
def gateaux(selector: FunctionalSelector, wave: WaveField, eta: Variation, h: float,
            profile: StratificationProfile, casimir_variant: str = "sigma_free") -> float:
    """(F(phi + h eta) - F(phi - h eta)) / (2h), psi recovered at both states."""
    if h <= 0.0:
        raise StepError(f"step must be positive (got {h})")
    plus = _value_at(selector, wave, profile, casimir_variant, eta, h)
    minus = _value_at(selector, wave, profile, casimir_variant, eta, -h)
    return (plus - minus) / (2.0 * h)


@handle_errors("Functionals")
def hessian_bilinear(selector: FunctionalSelector, wave: WaveField, eta: Variation, zeta: Variation,
                     h: float, profile: StratificationProfile, casimir_variant: str = "sigma_free",
                     jobs: int = 1) -> float:
    """<eta, F''(phi) zeta> by the four-corner second difference.

    Directions are scaled to unit norm for the corners and the result is
    rescaled by ||eta|| ||zeta||, so h is a step in normalised units.
    """
    if h <= 0.0:
        raise StepError(f"step must be positive (got {h})")
    grid = wave.grid
    eta_norm, zeta_norm = eta.norm(grid), zeta.norm(grid)
    if eta_norm == 0.0 or zeta_norm == 0.0:
        return 0.0
    unit_eta = eta * (1.0 / eta_norm)
    unit_zeta = zeta * (1.0 / zeta_norm)

    corners = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]

    def corner(signs):
        s, t = signs
        return _value_at(selector, wave, profile, casimir_variant, unit_eta * s + unit_zeta * t, h)

    pp, pm, mp, mm = ordered_map(corner, corners, jobs)
    return (pp - pm - mp + mm) / (4.0 * h * h) * eta_norm * zeta_norm


def direction_dictionary(grid: Grid2D, seed: int, count: int = 5,
                         length_scale: Optional[float] = None) -> List[Variation]:
    """Seeded smooth unit directions: Gaussians in x times sin(m pi y), per component."""
    if length_scale is None:
        length_scale = grid.L / 10.0
    rng = np.random.default_rng(seed)
    x, y = grid.x, grid.y
    directions = []
    for _ in range(count):
        parts = []
        for _component in range(2):
            centre = rng.uniform(-0.5, 0.5) * length_scale
            width = rng.uniform(0.5, 1.5) * length_scale
            m = int(rng.integers(1, 4))
            amplitude = rng.standard_normal()
            parts.append(amplitude * np.outer(np.exp(-((x - centre) / width) ** 2), np.sin(m * np.pi * y)))
        direction = Variation(parts[0], parts[1])
        directions.append(direction * (1.0 / direction.norm(grid)))
    return directions


def pair_with(gradient: Variation, directions: Iterable[Variation], grid: Grid2D) -> List[float]:
    """<gradient, eta_i> for each direction."""
    return [gradient.dot(direction, grid) for direction in directions]


def criticality_residuals(wave: WaveField, profile: StratificationProfile, directions: Sequence[Variation],
                          rel_step: float = 1e-3, casimir_variant: str = "sigma_free",
                          jobs: int = 1) -> List[float]:
    """Gateaux derivatives of H - cI along each direction."""
    def one(direction: Variation) -> float:
        h = relative_step(wave, direction, rel_step)
        return gateaux(FunctionalSelector.H_MINUS_CI, wave, direction, h, profile, casimir_variant)

    return ordered_map(one, list(directions), jobs)
