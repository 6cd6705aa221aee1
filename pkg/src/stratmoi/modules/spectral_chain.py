"""Weak-form checks of the Jordan chain at zero and the Fredholm solvability scalar."""

from typing import Dict, List, Optional, Sequence

import numpy as np

from ..models.mode import KdvCoefficients, VerticalMode
from ..models.profile import StratificationProfile
from ..models.results import ChainReport, FredholmEstimate
from ..models.wave import Variation, WaveField
from ..utils import get_logger, handle_errors
from .functionals import (
    FunctionalSelector,
    anomaly_scale,
    apply_J,
    direction_dictionary,
    evaluate_functionals,
    first_variation_I,
    hessian_bilinear,
    ordered_map,
)
from .wavefields import (
    WaveBuilder,
    check_speed_step,
    dx_direction,
    make_grid,
    partial_c,
    partial_x,
    wave_family,
)

logger = get_logger(__name__)


def check_JQT(wave: WaveField, profile: StratificationProfile) -> Dict[str, float]:
    """Residual of J I'(phi) = -d phi/dx, per component.

    The identity holds for any smooth state, so the residual measures the
    differencing error only. Values are normalised by max|d phi/dx| of each
    component; fields constant in x give exactly zero.
    """
    grid = wave.grid
    image = apply_J(wave, first_variation_I(wave, profile))
    shift = Variation(partial_x(wave.rho, grid), partial_x(wave.sigma, grid))
    residual = image + shift

    out = {}
    for name, res, ref in (("rho", residual.d_rho, shift.d_rho), ("sigma", residual.d_sigma, shift.d_sigma)):
        absolute = float(np.abs(res).max())
        scale = float(np.abs(ref).max())
        out[f"{name}_abs"] = absolute
        out[name] = absolute / scale if scale > 0.0 else absolute
    return out


def check_eigenfunction(wave: WaveField, profile: StratificationProfile, directions: Sequence[Variation],
                        hessian_step: float = 1e-2, casimir_variant: str = "sigma_free",
                        jobs: int = 1, kernel: Optional[Variation] = None) -> List[float]:
    """<eta_i, (H - cI)''(phi) d phi/dx> for each direction.

    ``kernel`` replaces d phi/dx, e.g. by a comparison direction.
    """
    zeta = dx_direction(wave) if kernel is None else kernel
    h = hessian_step * anomaly_scale(wave)

    def one(eta: Variation) -> float:
        return hessian_bilinear(FunctionalSelector.H_MINUS_CI, wave, eta, zeta, h, profile, casimir_variant)

    return ordered_map(one, list(directions), jobs)


@handle_errors("SpectralChain")
def check_generalized_eigenfunction(builder: WaveBuilder, eps: float, delta_c: float,
                                    directions: Sequence[Variation], profile: StratificationProfile,
                                    hessian_step: float = 1e-2, casimir_variant: str = "sigma_free",
                                    jobs: int = 1) -> List[float]:
    """<eta_i, (H - cI)''(phi) d phi/dc> - <I'(phi), eta_i> for each direction."""
    wave = builder(eps)
    d_c = partial_c(builder, eps, delta_c)
    momentum_gradient = first_variation_I(wave, profile)
    h = hessian_step * anomaly_scale(wave)

    def one(eta: Variation) -> float:
        bilinear = hessian_bilinear(FunctionalSelector.H_MINUS_CI, wave, eta, d_c, h, profile, casimir_variant)
        return bilinear - momentum_gradient.dot(eta, wave.grid)

    return ordered_map(one, list(directions), jobs)


@handle_errors("SpectralChain")
def fredholm_scalar(builder: WaveBuilder, eps: float, delta_c: float, profile: StratificationProfile,
                    casimir_variant: str = "sigma_free") -> FredholmEstimate:
    """<I'(phi), d phi/dc> with a direct dI/dc estimate and a step-halving noise estimate.

    The scalar equals dI/dc = -m''(c); when it is nonzero the chain at zero
    has length exactly two.
    """
    check_speed_step(eps, delta_c)
    wave = builder(eps)
    grid = wave.grid
    chi = first_variation_I(wave, profile)

    scalar = chi.dot(partial_c(builder, eps, delta_c), grid)
    scalar_half = chi.dot(partial_c(builder, eps, 0.5 * delta_c), grid)

    def momentum(amplitude: float) -> float:
        return evaluate_functionals(builder(amplitude), profile, casimir_variant).I

    direct = (momentum(float(np.sqrt(eps ** 2 + delta_c)))
              - momentum(float(np.sqrt(eps ** 2 - delta_c)))) / (2.0 * delta_c)

    return FredholmEstimate(scalar=scalar, dI_dc_direct=direct, noise=abs(scalar - scalar_half))


def structural_directions(wave: WaveField, d_c: Variation, profile: StratificationProfile) -> List[Variation]:
    """Unit d phi/dx, d phi/dc and I'(phi)."""
    grid = wave.grid
    out = []
    for direction in (dx_direction(wave), d_c, first_variation_I(wave, profile)):
        norm = direction.norm(grid)
        if norm > 0.0:
            out.append(direction * (1.0 / norm))
    return out


@handle_errors("SpectralChain")
def build_chain_report(mode: VerticalMode, coeffs: KdvCoefficients, profile: StratificationProfile,
                       eps: float, nx: int, ny: int, delta_c_ratio: float = 0.05, seed: int = 12345,
                       n_directions: int = 5, hessian_step: float = 1e-2, noise_factor: float = 10.0,
                       casimir_variant: str = "sigma_free", decay_factor: float = 10.0,
                       strict: bool = False, jobs: int = 1, closure: str = "linear",
                       passes: int = 2) -> ChainReport:
    """Run every chain check at one amplitude on one fixed grid.

    The grid half-width is fitted to the smallest amplitude the speed
    differences visit, so every member of the family decays inside it.
    """
    delta_c = delta_c_ratio * eps ** 2
    grid = make_grid(coeffs, float(np.sqrt(eps ** 2 - delta_c)), nx, ny, decay_factor=decay_factor)
    builder = wave_family(mode, coeffs, profile, grid, strict=strict, closure=closure, passes=passes)
    wave = builder(eps)
    logger.info(f"Chain checks at eps={eps:g} (c={wave.c:.6f}) on {nx}x{ny}, L={grid.L:.3f}, {closure} closure")

    directions = direction_dictionary(grid, seed, n_directions, 1.0 / (coeffs.k * eps))
    d_c = partial_c(builder, eps, delta_c)
    directions = directions + structural_directions(wave, d_c, profile)

    jqt = check_JQT(wave, profile)
    eigen = check_eigenfunction(wave, profile, directions, hessian_step, casimir_variant, jobs)
    haupt = check_generalized_eigenfunction(builder, eps, delta_c, directions, profile,
                                            hessian_step, casimir_variant, jobs)
    estimate = fredholm_scalar(builder, eps, delta_c, profile, casimir_variant)

    report = ChainReport(
        eps=eps,
        c=wave.c,
        jqt_residual=jqt,
        eigen_residuals=eigen,
        haupt_residuals=haupt,
        fredholm_scalar=estimate.scalar,
        dI_dc_direct=estimate.dI_dc_direct,
        fredholm_gap=estimate.gap,
        noise=estimate.noise,
        threshold=noise_factor * estimate.noise,
    )
    logger.info(f"Fredholm scalar {report.fredholm_scalar:.6e} (noise {report.noise:.2e}); "
                f"chain terminates: {report.chain_terminates}")
    return report
