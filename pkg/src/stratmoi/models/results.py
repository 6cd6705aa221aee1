"""Result records for validation, functionals, chain checks and branch sweeps."""

from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

import numpy as np


@dataclass
class ValidationFailure:
    """One violated profile invariant."""
    invariant: str
    y: float
    value: float


@dataclass
class ValidationReport:
    """Outcome of sampling a profile's invariants."""
    samples: int
    min_density: float
    max_density_prime: float
    max_inverse_error: float
    failures: List[ValidationFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "min_density": self.min_density,
            "max_density_prime": self.max_density_prime,
            "max_inverse_error": self.max_inverse_error,
            "failures": [asdict(f) for f in self.failures],
        }


@dataclass
class FunctionalValues:
    """Values of the energy, momentum and Casimir functionals at one state."""
    Htilde: float
    Itilde: float
    dH: float
    dI: float
    c: float
    casimir_variant: str = "sigma_free"
    continued_nodes: int = 0

    @property
    def H(self) -> float:
        return self.Htilde + self.dH

    @property
    def I(self) -> float:
        return self.Itilde + self.dI

    @property
    def m(self) -> float:
        return self.H - self.c * self.I

    def to_dict(self) -> Dict[str, Any]:
        return {
            "Htilde": self.Htilde,
            "Itilde": self.Itilde,
            "dH": self.dH,
            "dI": self.dI,
            "H": self.H,
            "I": self.I,
            "m": self.m,
            "c": self.c,
            "casimir_variant": self.casimir_variant,
            "continued_nodes": self.continued_nodes,
        }


@dataclass
class FredholmEstimate:
    """Pairing <I'(phi), d phi/dc> next to a direct difference of I over c."""
    scalar: float
    dI_dc_direct: float
    noise: float

    @property
    def gap(self) -> float:
        return abs(self.scalar - self.dI_dc_direct) / abs(self.dI_dc_direct) if self.dI_dc_direct else float("inf")


@dataclass
class ChainReport:
    """Weak-form residuals of the Jordan chain at one wave.

    The adjoint kernel is identified with chi = I'(phi) by construction;
    these checks confirm chi lies in the discrete adjoint kernel but say
    nothing about that kernel being one-dimensional.
    """
    eps: float
    c: float
    jqt_residual: Dict[str, float]
    eigen_residuals: List[float]
    haupt_residuals: List[float]
    fredholm_scalar: float
    dI_dc_direct: float
    fredholm_gap: float
    noise: float
    threshold: float
    pairing: str = "Simpson-weighted L2 over (rho, sigma)"

    @property
    def m_second(self) -> float:
        return -self.fredholm_scalar

    @property
    def chain_terminates(self) -> bool:
        return abs(self.fredholm_scalar) > self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "c": self.c,
            "jqt_residual": self.jqt_residual,
            "eigen_residuals": self.eigen_residuals,
            "haupt_residuals": self.haupt_residuals,
            "fredholm_scalar": self.fredholm_scalar,
            "dI_dc_direct": self.dI_dc_direct,
            "fredholm_gap": self.fredholm_gap,
            "noise": self.noise,
            "threshold": self.threshold,
            "m_second": self.m_second,
            "chain_terminates": self.chain_terminates,
            "pairing": self.pairing,
            "caveat": "chi = I'(phi) is verified to lie in the discrete adjoint kernel; uniqueness is not checked",
        }


@dataclass
class BranchPoint:
    """One wave on the speed branch; error is set when construction failed."""
    eps: float
    c: float
    I_def: float = float("nan")
    I_kin: float = float("nan")
    m: float = float("nan")
    criticality_residual_max: float = float("nan")
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class PowerLawFit:
    exponent: float
    prefactor: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class MSecondSamples:
    """m'' on interior branch points by two stencils."""
    c: np.ndarray
    m_second_fd: np.ndarray
    minus_dI_dc: np.ndarray

    @property
    def relative_gap(self) -> np.ndarray:
        return np.abs(self.m_second_fd - self.minus_dI_dc) / np.abs(self.minus_dI_dc)


@dataclass
class BranchTable:
    """Ordered branch points (uniform in c) with derived m'' samples and fits."""
    c0: float
    K: float
    points: List[BranchPoint] = field(default_factory=list)
    m_second: Optional[MSecondSamples] = None
    fits: Dict[str, PowerLawFit] = field(default_factory=dict)
    control: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def valid_points(self) -> List[BranchPoint]:
        return [p for p in self.points if p.ok]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c0": self.c0,
            "K": self.K,
            "n_points": len(self.points),
            "gaps": [p.to_dict() for p in self.points if not p.ok],
            "fits": {name: fit.to_dict() for name, fit in self.fits.items()},
            "quadrature_control": self.control,
            "warnings": self.warnings,
        }


@dataclass
class AcceptanceCheck:
    """Outcome of one acceptance criterion with the numbers behind it."""
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "details": self.details}
