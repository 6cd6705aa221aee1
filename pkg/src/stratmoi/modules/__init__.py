"""Computational modules for stratmoi."""

from .stratification import evaluate, inverse_density, inverse_density_numeric, validate, require_valid
from .modes import solve_mode, solve_fundamental_mode, genericity_integral, mode_residual
from .kdv import compute_coefficients, soliton, instability_constant
from .wavefields import (
    WaveCorrector,
    build_wave,
    quiescent_wave,
    sigma_from_psi,
    solve_streamfunction,
    streamline_density,
    partial_x,
    partial_c,
)
from .functionals import (
    FunctionalSelector,
    evaluate_functionals,
    momentum_kinetic_form,
    first_variation_I,
    gateaux,
    hessian_bilinear,
    apply_J,
)
from .spectral_chain import (
    check_JQT,
    check_eigenfunction,
    check_generalized_eigenfunction,
    fredholm_scalar,
    build_chain_report,
)
from .branch import BranchSweeper, sweep, second_derivative_m, fit_power_law
from .problem import ProblemSetup
from .verification import AcceptanceSuite

__all__ = [
    # Background
    "evaluate",
    "inverse_density",
    "inverse_density_numeric",
    "validate",
    "require_valid",

    # Modes and coefficients
    "solve_mode",
    "solve_fundamental_mode",
    "genericity_integral",
    "mode_residual",
    "compute_coefficients",
    "soliton",
    "instability_constant",

    # Waves
    "WaveCorrector",
    "build_wave",
    "quiescent_wave",
    "streamline_density",
    "sigma_from_psi",
    "solve_streamfunction",
    "partial_x",
    "partial_c",

    # Functionals
    "FunctionalSelector",
    "evaluate_functionals",
    "momentum_kinetic_form",
    "first_variation_I",
    "gateaux",
    "hessian_bilinear",
    "apply_J",

    # Chain
    "check_JQT",
    "check_eigenfunction",
    "check_generalized_eigenfunction",
    "fredholm_scalar",
    "build_chain_report",

    # Branch
    "BranchSweeper",
    "sweep",
    "second_derivative_m",
    "fit_power_law",

    "ProblemSetup",
    "AcceptanceSuite",
]
