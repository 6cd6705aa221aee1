"""Sweeps of the wave branch in c: momentum, moment of instability and its curvature."""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..models.mode import KdvCoefficients, VerticalMode
from ..models.profile import StratificationProfile
from ..models.results import BranchPoint, BranchTable, MSecondSamples, PowerLawFit
from ..utils import get_logger, handle_errors
from ..utils.exceptions import DomainError, StratMoiError
from .functionals import (
    direction_dictionary,
    evaluate_functionals,
    first_variation_H_minus_cI,
    momentum_kinetic_form,
    pair_with,
)
from .wavefields import build_wave, displacement_scale, make_grid

logger = get_logger(__name__)

BRANCH_COLUMNS = ["eps", "c", "I_def", "I_kin", "m", "m_second_fd", "m_second_closed", "criticality_residual"]


def uniform_c_values(c0: float, eps_min: float, eps_max: float, n_points: int) -> List[float]:
    """n_points speeds uniform in c between c0 + eps_min^2 and c0 + eps_max^2."""
    return [float(c) for c in np.linspace(c0 + eps_min ** 2, c0 + eps_max ** 2, n_points)]


def c_values_from_eps(c0: float, eps_values: Sequence[float]) -> List[float]:
    return [c0 + float(eps) ** 2 for eps in eps_values]


def resample_c_values(c_values: Sequence[float], n_points: int) -> List[float]:
    """n_points speeds uniform in c across the span of an explicit list.

    Explicit amplitude or speed lists are rarely uniform in c, and m'' is
    only differenced on uniform spacing.
    """
    if not c_values:
        return []
    low, high = min(c_values), max(c_values)
    if low == high:
        return [float(low)]
    return [float(c) for c in np.linspace(low, high, n_points)]


class BranchSweeper:
    """Builds and evaluates the branch point by point on a shared configuration."""

    def __init__(self, profile: StratificationProfile, mode: VerticalMode, coeffs: KdvCoefficients,
                 nx: int, ny: int, L_policy: str = "decay", decay_factor: float = 10.0,
                 L_fixed: float = 100.0, seed: int = 12345, n_directions: int = 5,
                 casimir_variant: str = "sigma_free", strict: bool = False, eps_warn: float = 0.15,
                 closure: str = "linear", passes: int = 2, displacement_warn: float = 0.1,
                 identity_rtol: float = 0.05):
        self.profile = profile
        self.mode = mode
        self.coeffs = coeffs
        self.nx = nx
        self.ny = ny
        self.L_policy = L_policy
        self.decay_factor = decay_factor
        self.L_fixed = L_fixed
        self.seed = seed
        self.n_directions = n_directions
        self.casimir_variant = casimir_variant
        self.strict = strict
        self.eps_warn = eps_warn
        self.closure = closure
        self.passes = passes
        self.displacement_warn = displacement_warn
        self.identity_rtol = identity_rtol

    def evaluate(self, c: float, refine: bool = False) -> BranchPoint:
        """One branch point; construction failures are recorded on the point."""
        c0 = self.mode.c0
        eps = float(np.sqrt(c - c0)) if c > c0 else float("nan")
        try:
            if not c > c0:
                raise DomainError(f"c={c} must exceed c0={c0}")
            grid = make_grid(self.coeffs, eps, self.nx, self.ny, self.L_policy, self.decay_factor, self.L_fixed)
            if refine:
                grid = grid.refined()
            wave = build_wave(self.mode, self.coeffs, self.profile, eps, grid,
                              strict=self.strict, decay_factor=self.decay_factor,
                              closure=self.closure, passes=self.passes)
            values = evaluate_functionals(wave, self.profile, self.casimir_variant)
            directions = direction_dictionary(grid, self.seed, self.n_directions, 1.0 / (self.coeffs.k * eps))
            gradient = first_variation_H_minus_cI(wave, self.profile)
            residual = max(abs(r) for r in pair_with(gradient, directions, grid)) if directions else 0.0
            return BranchPoint(
                eps=eps,
                c=c,
                I_def=values.I,
                I_kin=momentum_kinetic_form(wave),
                m=values.m,
                criticality_residual_max=residual,
            )
        except StratMoiError as e:
            logger.warning(f"Branch point c={c:.8f} failed: {e}")
            return BranchPoint(eps=eps, c=c, error=f"{type(e).__name__}: {e}")

    @handle_errors("Branch")
    def sweep(self, c_values: Sequence[float], jobs: int = 1, progress: bool = False,
              control: bool = True) -> BranchTable:
        """Evaluate every speed, then derive m'' samples, power-law fits and a quadrature control."""
        c_sorted = sorted(float(c) for c in c_values)
        if len(set(c_sorted)) != len(c_sorted):
            raise DomainError("duplicate speeds in the sweep request")

        table = BranchTable(c0=self.mode.c0, K=self.coeffs.K)
        if not c_sorted:
            return table

        for c in c_sorted:
            if c > self.mode.c0 and np.sqrt(c - self.mode.c0) > self.eps_warn:
                table.warnings.append(
                    f"eps={np.sqrt(c - self.mode.c0):.4g} exceeds {self.eps_warn}; "
                    "small-amplitude expansions may be inaccurate"
                )
        self._check_displacement(table, c_sorted)

        logger.info(f"Sweeping {len(c_sorted)} branch points on {self.nx}x{self.ny} ({self.closure} closure)")
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            table.points = list(tqdm(pool.map(self.evaluate, c_sorted), total=len(c_sorted),
                                     desc="branch", disable=not progress))

        gaps = len(table.points) - len(table.valid_points)
        if gaps:
            table.warnings.append(f"{gaps} branch point(s) failed and are left as gaps")

        if len(table.points) >= 3:
            try:
                table.m_second = second_derivative_m(table)
            except DomainError as e:
                table.warnings.append(str(e))
            else:
                self._check_identity(table)

        table.fits = self._fits(table)
        if control:
            table.control = self._control(table)
        return table

    def _check_displacement(self, table: BranchTable, c_values: Sequence[float]) -> None:
        """Warn once when the largest streamline displacement leaves the weakly nonlinear regime."""
        above = [c for c in c_values if c > self.mode.c0]
        if not above:
            return
        displacement = displacement_scale(self.coeffs, float(np.sqrt(max(above) - self.mode.c0)))
        if displacement > self.displacement_warn:
            message = (f"displacement eps^2|a|/c0={displacement:.3g} exceeds {self.displacement_warn}; "
                       "the branch leaves the weakly nonlinear regime")
            table.warnings.append(message)
            logger.warning(message)

    def _check_identity(self, table: BranchTable) -> None:
        samples = table.m_second
        gap = float(samples.relative_gap.max())
        if gap > self.identity_rtol:
            message = f"m'' and -dI/dc differ by {gap:.3g} (relative), above {self.identity_rtol}"
            table.warnings.append(message)
            logger.warning(message)
        if np.any(samples.m_second_fd >= 0.0):
            table.warnings.append(f"{int(np.count_nonzero(samples.m_second_fd >= 0.0))} m'' sample(s) not negative")

    def _fits(self, table: BranchTable) -> Dict[str, PowerLawFit]:
        fits = {}
        valid = [p for p in table.valid_points if p.I_def > 0.0]
        if len(valid) >= 3:
            fits["momentum"] = fit_power_law([p.c - table.c0 for p in valid], [p.I_def for p in valid])
        else:
            table.warnings.append("fewer than 3 positive momentum values; no momentum fit")
        samples = table.m_second
        if samples is not None:
            keep = -samples.m_second_fd > 0.0
            if np.count_nonzero(keep) >= 3:
                fits["minus_m_second"] = fit_power_law(samples.c[keep] - table.c0, -samples.m_second_fd[keep])
            else:
                table.warnings.append("fewer than 3 negative m'' samples; no curvature fit")
        return fits

    def _control(self, table: BranchTable) -> Dict[str, float]:
        """Relative change of I and m at one point when (nx, ny) are doubled."""
        valid = table.valid_points
        if not valid:
            return {}
        base = valid[len(valid) // 2]
        fine = self.evaluate(base.c, refine=True)
        if not fine.ok:
            table.warnings.append(f"quadrature control point failed: {fine.error}")
            return {}
        return {
            "c": base.c,
            "eps": base.eps,
            "I_rel_change": abs(fine.I_def - base.I_def) / abs(fine.I_def),
            "m_rel_change": abs(fine.m - base.m) / abs(fine.m) if fine.m else float("nan"),
        }


def sweep(profile: StratificationProfile, mode: VerticalMode, coeffs: KdvCoefficients,
          c_values: Sequence[float], nx: int, ny: int, L_policy: str = "decay",
          decay_factor: float = 10.0, jobs: int = 1, **kwargs) -> BranchTable:
    """Functional form of BranchSweeper(...).sweep(c_values)."""
    progress = kwargs.pop("progress", False)
    control = kwargs.pop("control", True)
    sweeper = BranchSweeper(profile, mode, coeffs, nx, ny, L_policy, decay_factor, **kwargs)
    return sweeper.sweep(c_values, jobs=jobs, progress=progress, control=control)


def second_derivative_m(table: BranchTable) -> MSecondSamples:
    """Central second difference of m and central first difference of -I.

    Differences are taken inside every run of consecutive gap-free points,
    so one failed point costs only the samples whose stencil touches it.

    Raises:
        DomainError: with fewer than 3 points, non-uniform spacing, or no
            gap-free run of 3 points
    """
    points = table.points
    if len(points) < 3:
        raise DomainError("m'' needs at least 3 branch points")
    c = np.array([p.c for p in points])
    spacing = np.diff(c)
    if not np.allclose(spacing, spacing[0], rtol=1e-8, atol=0.0):
        raise DomainError("m'' needs uniform spacing in c; resample the branch first")
    dc = spacing.mean()
    m = np.array([p.m for p in points])
    momentum = np.array([p.I_def for p in points])

    # interior indices whose three-point stencil avoids every gap
    ok = np.array([p.ok for p in points])
    inner = np.flatnonzero(ok[:-2] & ok[1:-1] & ok[2:]) + 1
    if inner.size == 0:
        raise DomainError("m'' needs 3 consecutive branch points without gaps")
    return MSecondSamples(
        c=c[inner],
        m_second_fd=(m[inner + 1] - 2.0 * m[inner] + m[inner - 1]) / dc ** 2,
        minus_dI_dc=-(momentum[inner + 1] - momentum[inner - 1]) / (2.0 * dc),
    )


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> PowerLawFit:
    """Least squares of log y on log x: y ≈ prefactor * x ** exponent."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3 or xs.size != ys.size:
        raise DomainError("power-law fit needs at least 3 paired points")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise DomainError("power-law fit needs positive inputs")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return PowerLawFit(exponent=float(slope), prefactor=float(np.exp(intercept)))


def m_second_closed(table: BranchTable, c: np.ndarray) -> np.ndarray:
    """Leading-order law -(3/2) K sqrt(c - c0)."""
    return -1.5 * table.K * np.sqrt(np.asarray(c, dtype=float) - table.c0)


def branch_frame(table: BranchTable) -> pd.DataFrame:
    """One row per branch point; m_second_fd is NaN where no gap-free stencil exists."""
    c = np.array([p.c for p in table.points], dtype=float)
    fd = np.full(c.shape, np.nan)
    if table.m_second is not None:
        fd[np.isin(c, table.m_second.c)] = table.m_second.m_second_fd
    return pd.DataFrame({
        "eps": [p.eps for p in table.points],
        "c": c,
        "I_def": [p.I_def for p in table.points],
        "I_kin": [p.I_kin for p in table.points],
        "m": [p.m for p in table.points],
        "m_second_fd": fd,
        "m_second_closed": m_second_closed(table, c) if c.size else c,
        "criticality_residual": [p.criticality_residual_max for p in table.points],
    }, columns=BRANCH_COLUMNS)


def summarize(table: BranchTable) -> Dict[str, Any]:
    """Headline numbers for the JSON summary."""
    summary = table.to_dict()
    if table.m_second is not None:
        samples = table.m_second
        summary["m_second"] = {
            "c": samples.c.tolist(),
            "fd": samples.m_second_fd.tolist(),
            "minus_dI_dc": samples.minus_dI_dc.tolist(),
            "relative_gap_max": float(samples.relative_gap.max()),
            "all_negative": bool(np.all(samples.m_second_fd < 0.0)),
        }
    return summary
