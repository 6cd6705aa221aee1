"""Shared problem setup: profile, vertical modes and coefficients resolved from a Config."""

from threading import Lock
from typing import Dict

from ..models.mode import KdvCoefficients, VerticalMode
from ..models.profile import StratificationProfile
from ..models.wave import Grid2D
from ..utils import Config, LoggerMixin
from .kdv import compute_coefficients
from .modes import solve_fundamental_mode
from .stratification import require_valid
from .wavefields import make_grid


class ProblemSetup(LoggerMixin):
    """Lazily solved modes and coefficients, cached per vertical resolution.

    Waves built on a grid with the same ny as the mode reuse the discrete
    eigenvector directly, which keeps the vertical stencil consistent
    between the mode, sigma_from_psi and the functionals.
    """

    def __init__(self, config: Config):
        self.config = config
        self.profile = StratificationProfile.from_config_section(config.get("profile"))
        self._modes: Dict[int, VerticalMode] = {}
        self._coeffs: Dict[int, KdvCoefficients] = {}
        self._lock = Lock()

    def validate_profile(self):
        return require_valid(self.profile, self.config.get("mode.validation_samples"))

    def mode_at(self, ny: int) -> VerticalMode:
        with self._lock:
            if ny not in self._modes:
                self._modes[ny] = solve_fundamental_mode(self.profile, ny)
            return self._modes[ny]

    def coefficients_at(self, ny: int) -> KdvCoefficients:
        mode = self.mode_at(ny)
        with self._lock:
            if ny not in self._coeffs:
                self._coeffs[ny] = compute_coefficients(
                    mode,
                    self.profile,
                    genericity_threshold=self.config.get("thresholds.genericity"),
                    convention=self.config.get("kdv.amplitude_convention"),
                )
            return self._coeffs[ny]

    def grid_for(self, eps: float, nx: int, ny: int) -> Grid2D:
        return make_grid(
            self.coefficients_at(ny),
            eps,
            nx,
            ny,
            policy=self.config.get("grid.L_policy"),
            decay_factor=self.config.get("grid.decay_factor"),
            L_fixed=self.config.get("grid.L_fixed"),
        )
