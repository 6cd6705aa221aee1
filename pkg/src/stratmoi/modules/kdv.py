"""Weakly nonlinear coefficients, the sech^2 soliton and the instability constant K."""

from dataclasses import replace

import numpy as np
from scipy.integrate import simpson

from ..models.mode import KdvCoefficients, VerticalMode
from ..models.profile import StratificationProfile
from ..utils import get_logger, handle_errors
from ..utils.exceptions import ConventionError, DegenerateNonlinearityError, DomainError, InvariantViolation
from .modes import genericity_integral

logger = get_logger(__name__)

CONVENTIONS = ("streamfunction", "displacement")


@handle_errors("Kdv")
def compute_coefficients(mode: VerticalMode, profile: StratificationProfile,
                         genericity_threshold: float = 1e-6,
                         convention: str = "streamfunction") -> KdvCoefficients:
    """Coefficients (r, s) of A'' = -(1/s) A - (r/s) A^2 for the amplitude A of psi = eps^2 A(eps x) phi0(y).

    From the steady balance (c - c0) B = (mu/2) B^2 + delta B'' for the
    isopycnal displacement amplitude B, with
    mu = (3 c0/2) I3/I1 and delta = (c0/2) I2/I1. Under the "streamfunction"
    convention A = c0 B (since psi = c0 * displacement at leading order), so
    r = -mu/(2 c0); under "displacement" A is read as B itself, r = -mu/2.
    In both, s = -delta.

    Raises:
        DegenerateNonlinearityError: if |I3|/I1 or |int rho_bar phi0^3| is below threshold
        ConventionError: if s >= 0
    """
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown amplitude convention '{convention}'")

    y = mode.y
    rho = profile.density(y)
    I1 = float(simpson(rho * mode.phi0_prime ** 2, x=y))
    I2 = float(simpson(rho * mode.phi0 ** 2, x=y))
    I3 = float(simpson(rho * mode.phi0_prime ** 3, x=y))
    phi3 = genericity_integral(mode, profile)

    if abs(I3) / I1 < genericity_threshold:
        raise DegenerateNonlinearityError(
            f"|I3|/I1 = {abs(I3) / I1:.3e} below {genericity_threshold:.1e}; quadratic theory inapplicable"
        )
    if abs(phi3) < genericity_threshold:
        raise DegenerateNonlinearityError(
            f"|int rho_bar phi0^3| = {abs(phi3):.3e} below {genericity_threshold:.1e}"
        )

    c0 = mode.c0
    delta = 0.5 * c0 * I2 / I1
    mu = 1.5 * c0 * I3 / I1
    s = -delta
    r = -0.5 * mu / c0 if convention == "streamfunction" else -0.5 * mu
    if s >= 0.0:
        raise ConventionError(f"s = {s:.6g} must be negative for a decaying soliton")

    coeffs = KdvCoefficients(
        r=r, s=s, I1=I1, I2=I2, I3=I3, c0=c0,
        genericity_phi3=phi3, convention=convention,
    )
    coeffs = replace(coeffs, K=instability_constant(coeffs, mode))
    logger.info(
        f"KdV coefficients ({convention}): r={r:.6g}, s={s:.6g}, a={coeffs.a:.6g}, "
        f"k={coeffs.k:.6g}, K={coeffs.K:.6g}"
    )
    return coeffs


def soliton(coeffs: KdvCoefficients, X):
    """A(X) = a sech^2(k X)."""
    X = np.asarray(X, dtype=float)
    return coeffs.a / np.cosh(coeffs.k * X) ** 2


def soliton_derivative(coeffs: KdvCoefficients, X):
    """A'(X) = -2 a k sech^2(k X) tanh(k X)."""
    X = np.asarray(X, dtype=float)
    return -2.0 * coeffs.a * coeffs.k * np.tanh(coeffs.k * X) / np.cosh(coeffs.k * X) ** 2


def soliton_mass(coeffs: KdvCoefficients) -> float:
    """Integral of A^2 over the line, (4/3) a^2 / k."""
    if coeffs.s >= 0.0:
        raise ConventionError("soliton mass requires s < 0")
    return 4.0 / 3.0 * coeffs.a ** 2 / coeffs.k


def instability_constant(coeffs: KdvCoefficients, mode: VerticalMode) -> float:
    """K = (1/c0) * int A^2 dX * int rho_bar phi0'^2 dy.

    Raises:
        InvariantViolation: if K <= 0
    """
    K = soliton_mass(coeffs) * coeffs.I1 / mode.c0
    if not K > 0.0:
        raise InvariantViolation("K > 0", f"instability constant K = {K:.6g}")
    return float(K)


def ode_residual(coeffs: KdvCoefficients, X, step: float = 1e-3) -> np.ndarray:
    """A'' + (1/s) A + (r/s) A^2 with A'' by central differences."""
    X = np.asarray(X, dtype=float)
    A = soliton(coeffs, X)
    A_xx = (soliton(coeffs, X + step) - 2.0 * A + soliton(coeffs, X - step)) / step ** 2
    return A_xx + A / coeffs.s + coeffs.r / coeffs.s * A ** 2
