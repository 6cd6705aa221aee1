"""Evaluation and validation of analytic background density profiles."""

from typing import Tuple

import numpy as np
from scipy.optimize import brentq

from ..models.profile import StratificationProfile
from ..models.results import ValidationFailure, ValidationReport
from ..utils import get_logger, handle_errors
from ..utils.exceptions import DensityRangeError, DomainError, ValidationError

logger = get_logger(__name__)

# Slack on range checks so that rho_bar(0), rho_bar(1) themselves are accepted
_RANGE_RTOL = 1e-12


def evaluate(profile: StratificationProfile, y) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (rho_bar, rho_bar', p_bar) at heights y in [0, 1].

    Raises:
        DomainError: if any y lies outside [0, 1].
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0) or np.any(y > 1.0) or not np.all(np.isfinite(y)):
        raise DomainError(f"height outside [0, 1]: {y[(y < 0) | (y > 1)].ravel()[:3].tolist()}")
    return profile.density(y), profile.density_prime(y), profile.pressure(y)


def inverse_density(profile: StratificationProfile, rho) -> np.ndarray:
    """Height y with rho_bar(y) = rho, for rho in [rho_bar(1), rho_bar(0)].

    Raises:
        DensityRangeError: if rho lies outside the background range.
    """
    rho = np.asarray(rho, dtype=float)
    lo, hi = profile.density_range()
    slack = _RANGE_RTOL * max(abs(lo), abs(hi))
    outside = (rho < lo - slack) | (rho > hi + slack)
    if np.any(outside):
        raise DensityRangeError(
            f"density {rho[outside].ravel()[0]:.17g} outside the background range [{lo:.17g}, {hi:.17g}]"
        )
    return np.clip(profile.inverse(np.clip(rho, lo, hi)), 0.0, 1.0)



def continued_inverse(profile: StratificationProfile, rho) -> Tuple[np.ndarray, int]:
    """rho_bar^{-1} with analytic continuation beyond the background range.

    Returns the heights and the number of nodes that needed the continuation.
    """
    rho = np.asarray(rho, dtype=float)
    lo, hi = profile.density_range()
    slack = _RANGE_RTOL * max(abs(lo), abs(hi))
    continued = int(np.count_nonzero((rho < lo - slack) | (rho > hi + slack)))
    if continued:
        logger.debug(f"{continued} nodes outside the background density range; using the continued inverse")
    return profile.inverse(rho), continued


def inverse_density_numeric(profile: StratificationProfile, rho: float, tol: float = 1e-13) -> float:
    """Scalar inverse by bracketed root finding on rho_bar(y) - rho."""
    lo, hi = profile.density_range()
    if not lo <= rho <= hi:
        raise DensityRangeError(f"density {rho:.17g} outside the background range [{lo:.17g}, {hi:.17g}]")
    if rho == hi:
        return 0.0
    if rho == lo:
        return 1.0
    return float(brentq(lambda y: float(profile.density(y)) - rho, 0.0, 1.0, xtol=tol, rtol=4 * np.finfo(float).eps))


@handle_errors("Stratification")
def validate(profile: StratificationProfile, samples: int = 1001) -> ValidationReport:
    """Check positivity, strict stability and inverse consistency on a sample grid."""
    if samples < 2:
        raise DomainError("samples ≥ 2 required")

    y = np.linspace(0.0, 1.0, samples)
    rho, rho_prime, _ = evaluate(profile, y)
    failures = []

    bad = np.flatnonzero(rho <= 0.0)
    if bad.size:
        failures.append(ValidationFailure("rho_bar > 0", float(y[bad[0]]), float(rho[bad[0]])))

    bad = np.flatnonzero(rho_prime >= 0.0)
    if bad.size:
        failures.append(ValidationFailure("rho_bar' < 0", float(y[bad[0]]), float(rho_prime[bad[0]])))

    inverse_error = float("nan")
    if not failures:
        try:
            inverse_error = float(np.max(np.abs(inverse_density(profile, rho) - y)))
        except DensityRangeError as e:
            failures.append(ValidationFailure("rho_bar^-1(rho_bar(y)) = y", float("nan"), float("nan")))
            logger.debug(f"Inverse check failed: {e}")

    report = ValidationReport(
        samples=samples,
        min_density=float(rho.min()),
        max_density_prime=float(rho_prime.max()),
        max_inverse_error=inverse_error,
        failures=failures,
    )
    if report.passed:
        logger.info(
            f"Profile {profile.kind.value} valid: min rho_bar={report.min_density:.6g}, "
            f"max rho_bar'={report.max_density_prime:.6g}"
        )
    else:
        logger.warning(f"Profile {profile.kind.value} invalid: {[f.invariant for f in failures]}")
    return report


def require_valid(profile: StratificationProfile, samples: int = 1001) -> ValidationReport:
    """Validate and raise on the first violated invariant."""
    report = validate(profile, samples)
    if not report.passed:
        failure = report.failures[0]
        raise ValidationError(failure.invariant, f"violated (value {failure.value:.6g})", failure.y)
    return report
