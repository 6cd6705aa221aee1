"""Data models for stratmoi."""

from .profile import StratificationProfile, ProfileKind, PROFILE_PARAMETERS
from .mode import VerticalMode, KdvCoefficients
from .wave import Grid2D, WaveField, Variation
from .results import (
    ValidationFailure,
    ValidationReport,
    FunctionalValues,
    ChainReport,
    FredholmEstimate,
    BranchPoint,
    BranchTable,
    PowerLawFit,
    MSecondSamples,
    AcceptanceCheck,
)

__all__ = [
    # Background
    "StratificationProfile",
    "ProfileKind",
    "PROFILE_PARAMETERS",

    # Modes and coefficients
    "VerticalMode",
    "KdvCoefficients",

    # Fields
    "Grid2D",
    "WaveField",
    "Variation",

    # Results
    "ValidationFailure",
    "ValidationReport",
    "FunctionalValues",
    "ChainReport",
    "FredholmEstimate",
    "BranchPoint",
    "BranchTable",
    "PowerLawFit",
    "MSecondSamples",
    "AcceptanceCheck",
]
