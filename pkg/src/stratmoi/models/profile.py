"""Background stratification profile models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np

from ..utils.exceptions import DensityRangeError, ConfigurationError


class ProfileKind(Enum):
    """Analytic background density families."""
    EXPONENTIAL = "exponential"
    LINEAR = "linear"
    TANH_PYCNOCLINE = "tanh-pycnocline"


# Parameters each kind reads, with defaults
PROFILE_PARAMETERS: Dict[ProfileKind, Dict[str, float]] = {
    ProfileKind.EXPONENTIAL: {"rho0": 1.0, "beta": 1.0},
    ProfileKind.LINEAR: {"rho_bottom": 1.0, "rho_top": 0.9},
    ProfileKind.TANH_PYCNOCLINE: {"rho0": 1.0, "amplitude": 0.05, "center": 0.5, "thickness": 0.1},
}


def _log_cosh(t: np.ndarray) -> np.ndarray:
    return np.logaddexp(t, -t) - np.log(2.0)


@dataclass(frozen=True)
class StratificationProfile:
    """Analytic background density rho_bar(y) on 0 <= y <= 1.

    The closed forms below are the analytic functions themselves; they are
    evaluated without a domain check so that the density inverse can be
    continued past the background range. Domain checks live in
    ``modules.stratification``.
    """
    kind: ProfileKind = ProfileKind.EXPONENTIAL
    params: Dict[str, float] = field(default_factory=dict)
    g: float = 1.0

    def __post_init__(self):
        merged = dict(PROFILE_PARAMETERS[self.kind])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ConfigurationError(
                f"unknown parameter(s) {sorted(unknown)} for profile kind '{self.kind.value}'"
            )
        merged.update({k: float(v) for k, v in self.params.items()})
        object.__setattr__(self, "params", merged)

    @classmethod
    def exponential(cls, rho0: float = 1.0, beta: float = 1.0, g: float = 1.0) -> "StratificationProfile":
        return cls(ProfileKind.EXPONENTIAL, {"rho0": rho0, "beta": beta}, g)

    @classmethod
    def linear(cls, rho_bottom: float = 1.0, rho_top: float = 0.9, g: float = 1.0) -> "StratificationProfile":
        return cls(ProfileKind.LINEAR, {"rho_bottom": rho_bottom, "rho_top": rho_top}, g)

    @classmethod
    def tanh_pycnocline(cls, rho0: float = 1.0, amplitude: float = 0.05, center: float = 0.5,
                        thickness: float = 0.1, g: float = 1.0) -> "StratificationProfile":
        return cls(
            ProfileKind.TANH_PYCNOCLINE,
            {"rho0": rho0, "amplitude": amplitude, "center": center, "thickness": thickness},
            g,
        )

    def density(self, y):
        """rho_bar(y)."""
        y = np.asarray(y, dtype=float)
        p = self.params
        if self.kind is ProfileKind.EXPONENTIAL:
            return p["rho0"] * np.exp(-p["beta"] * y)
        if self.kind is ProfileKind.LINEAR:
            return p["rho_bottom"] + (p["rho_top"] - p["rho_bottom"]) * y
        t = (y - p["center"]) / p["thickness"]
        return p["rho0"] * (1.0 - p["amplitude"] * np.tanh(t))

    def density_prime(self, y):
        """rho_bar'(y)."""
        y = np.asarray(y, dtype=float)
        p = self.params
        if self.kind is ProfileKind.EXPONENTIAL:
            return -p["beta"] * p["rho0"] * np.exp(-p["beta"] * y)
        if self.kind is ProfileKind.LINEAR:
            return np.full_like(y, p["rho_top"] - p["rho_bottom"])
        t = (y - p["center"]) / p["thickness"]
        return -p["rho0"] * p["amplitude"] / p["thickness"] / np.cosh(t) ** 2

    def pressure(self, y):
        """Hydrostatic pressure p_bar(y) = -g * integral_0^y rho_bar."""
        y = np.asarray(y, dtype=float)
        p = self.params
        if self.kind is ProfileKind.EXPONENTIAL:
            return -self.g * p["rho0"] * (-np.expm1(-p["beta"] * y)) / p["beta"]
        if self.kind is ProfileKind.LINEAR:
            return -self.g * (p["rho_bottom"] * y + 0.5 * (p["rho_top"] - p["rho_bottom"]) * y ** 2)
        a, yc, d = p["amplitude"], p["center"], p["thickness"]
        shift = _log_cosh((y - yc) / d) - _log_cosh(np.asarray(-yc / d))
        return -self.g * p["rho0"] * (y - a * d * shift)

    def density_range(self) -> Tuple[float, float]:
        """(rho_bar(1), rho_bar(0))."""
        return float(self.density(1.0)), float(self.density(0.0))

    def inverse(self, rho):
        """Analytic continuation of rho_bar^{-1}.

        Raises:
            DensityRangeError: where the closed form has no continuation.
        """
        rho = np.asarray(rho, dtype=float)
        p = self.params
        if self.kind is ProfileKind.EXPONENTIAL:
            if np.any(rho <= 0.0):
                raise DensityRangeError("non-positive density has no preimage under the exponential profile")
            return -np.log(rho / p["rho0"]) / p["beta"]
        if self.kind is ProfileKind.LINEAR:
            slope = p["rho_top"] - p["rho_bottom"]
            if slope == 0.0:
                raise DensityRangeError("constant linear profile is not invertible")
            return (rho - p["rho_bottom"]) / slope
        u = self._tanh_argument(rho)
        return p["center"] + p["thickness"] * np.arctanh(u)

    def inverse_prime(self, rho):
        """(rho_bar^{-1})'(rho) = 1 / rho_bar'(rho_bar^{-1}(rho))."""
        rho = np.asarray(rho, dtype=float)
        p = self.params
        if self.kind is ProfileKind.EXPONENTIAL:
            if np.any(rho <= 0.0):
                raise DensityRangeError("non-positive density has no preimage under the exponential profile")
            return -1.0 / (p["beta"] * rho)
        if self.kind is ProfileKind.LINEAR:
            return np.full_like(rho, 1.0 / (p["rho_top"] - p["rho_bottom"]))
        u = self._tanh_argument(rho)
        return -p["thickness"] / (p["rho0"] * p["amplitude"] * (1.0 - u ** 2))

    def inverse_antiderivative(self, rho):
        """G(rho) with G' = rho_bar^{-1}; F(rho, y) = G(rho) - G(rho_bar(y))."""
        rho = np.asarray(rho, dtype=float)
        p = self.params
        if self.kind is ProfileKind.EXPONENTIAL:
            if np.any(rho <= 0.0):
                raise DensityRangeError("non-positive density has no preimage under the exponential profile")
            return -(rho * np.log(rho / p["rho0"]) - rho) / p["beta"]
        if self.kind is ProfileKind.LINEAR:
            slope = p["rho_top"] - p["rho_bottom"]
            return (0.5 * rho ** 2 - p["rho_bottom"] * rho) / slope
        u = self._tanh_argument(rho)
        scale = p["rho0"] * p["amplitude"] * p["thickness"]
        return p["center"] * rho - scale * (u * np.arctanh(u) + 0.5 * np.log1p(-u ** 2))

    def _tanh_argument(self, rho: np.ndarray) -> np.ndarray:
        p = self.params
        u = (1.0 - rho / p["rho0"]) / p["amplitude"]
        if np.any(np.abs(u) >= 1.0):
            raise DensityRangeError(
                "density outside the asymptotes of the tanh pycnocline profile"
            )
        return u

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {"kind": self.kind.value, "params": dict(self.params), "g": self.g}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StratificationProfile":
        """Create from dictionary."""
        return cls(
            kind=ProfileKind(data.get("kind", "exponential")),
            params=data.get("params", {}),
            g=data.get("g", 1.0),
        )

    @classmethod
    def from_config_section(cls, section: Dict[str, Any]) -> "StratificationProfile":
        """Create from the flat ``profile`` section of a run configuration."""
        kind = ProfileKind(section.get("kind", "exponential"))
        params = {k: section[k] for k in PROFILE_PARAMETERS[kind] if k in section}
        return cls(kind=kind, params=params, g=section.get("g", 1.0))
