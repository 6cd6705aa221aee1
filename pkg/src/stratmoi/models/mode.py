"""Vertical mode and weakly nonlinear coefficient models."""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np


@dataclass(frozen=True, eq=False)
class VerticalMode:
    """Eigenpair (c0, phi0) of the long-wave vertical problem on a uniform grid.

    Normalised so that max|phi0| = 1 with a positive extremum.
    """
    c0: float
    y: np.ndarray
    phi0: np.ndarray
    phi0_prime: np.ndarray
    mode_index: int = 1
    g: float = 1.0

    @property
    def ny(self) -> int:
        return int(self.y.size)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny - 1)

    @property
    def eigenvalue(self) -> float:
        """lambda = g / c0^2."""
        return self.g / self.c0 ** 2

    @property
    def interior_zeros(self) -> int:
        """Sign changes of phi0 on interior nodes."""
        interior = self.phi0[1:-1]
        signs = np.sign(interior[np.abs(interior) > 1e-14 * np.abs(interior).max()])
        return int(np.count_nonzero(np.diff(signs)))

    def to_dict(self) -> Dict[str, Any]:
        """Scalar summary (samples go to CSV)."""
        return {
            "c0": self.c0,
            "ny": self.ny,
            "mode_index": self.mode_index,
            "eigenvalue": self.eigenvalue,
            "g": self.g,
            "normalization": "max|phi0|=1, positive extremum",
        }


@dataclass(frozen=True)
class KdvCoefficients:
    """Coefficients of A'' = -(1/s) A - (r/s) A^2 and derived soliton data."""
    r: float
    s: float
    I1: float
    I2: float
    I3: float
    c0: float
    genericity_phi3: float = float("nan")
    convention: str = "streamfunction"
    K: float = float("nan")

    @property
    def a(self) -> float:
        """Soliton amplitude a = -3/(2r)."""
        return -3.0 / (2.0 * self.r)

    @property
    def k(self) -> float:
        """Soliton inverse width k = 1/(2 sqrt(-s))."""
        return 1.0 / (2.0 * np.sqrt(-self.s))

    @property
    def polarity(self) -> int:
        return 1 if self.a > 0 else -1

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "c0": self.c0,
            "r": self.r,
            "s": self.s,
            "a": self.a,
            "k": self.k,
            "polarity": self.polarity,
            "I1": self.I1,
            "I2": self.I2,
            "I3": self.I3,
            "K": self.K,
            "genericity_integrals": {
                "rho_phi0_cubed": self.genericity_phi3,
                "rho_phi0_prime_cubed": self.I3,
            },
            "convention": self.convention,
            "normalization": "max|phi0|=1, positive extremum",
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KdvCoefficients":
        """Create from dictionary."""
        return cls(
            r=data["r"],
            s=data["s"],
            I1=data["I1"],
            I2=data["I2"],
            I3=data["I3"],
            c0=data["c0"],
            genericity_phi3=data.get("genericity_integrals", {}).get("rho_phi0_cubed", float("nan")),
            convention=data.get("convention", "streamfunction"),
            K=data.get("K", float("nan")),
        )
