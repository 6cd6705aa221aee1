"""The acceptance suite run by ``stratmoi verify``."""

import math
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..models.profile import ProfileKind
from ..models.results import AcceptanceCheck, BranchTable
from ..models.wave import Grid2D, WaveField
from ..utils import Config, LoggerMixin
from ..utils.exceptions import StratMoiError
from ..utils.output import dumps_csv
from .branch import BranchSweeper, branch_frame, fit_power_law, m_second_closed, uniform_c_values
from .functionals import criticality_residuals, direction_dictionary, evaluate_functionals
from .modes import solve_fundamental_mode
from .problem import ProblemSetup
from .spectral_chain import build_chain_report, check_JQT
from .wavefields import build_wave, quiescent_wave


def fitted_order(eps: Sequence[float], values: Sequence[float]) -> float:
    """Slope of log|value| against log eps; inf when any value vanishes exactly."""
    magnitudes = np.abs(np.asarray(values, dtype=float))
    if np.any(magnitudes == 0.0):
        return math.inf
    return fit_power_law(eps, magnitudes).exponent


def exponential_mode_speed(profile) -> float:
    """Closed-form long-wave speed sqrt(g beta / (pi^2 + beta^2/4)) of the exponential profile."""
    beta = profile.params["beta"]
    return math.sqrt(profile.g * beta / (math.pi ** 2 + 0.25 * beta ** 2))


class AcceptanceSuite(LoggerMixin):
    """Runs every acceptance check on one configuration.

    The branch sweep and the sample waves are shared between checks; each
    check reports its own pass flag and the numbers it was judged on.
    """

    def __init__(self, config: Config, setup: Optional[ProblemSetup] = None, jobs: int = 1, progress: bool = False):
        self.config = config
        self.setup = setup or ProblemSetup(config)
        self.profile = self.setup.profile
        self.jobs = jobs
        self.progress = progress
        self._table: Optional[BranchTable] = None

    # Shared computations

    def _closure(self) -> Dict[str, Any]:
        return {"closure": self.config.get("wave.closure"), "passes": self.config.get("wave.passes")}

    def _sample_eps(self) -> List[float]:
        return sorted(self.config.get("probes.eps_list"), reverse=True)

    def _sample_wave(self, eps: float, refine: int = 0) -> WaveField:
        nx, ny = self.config.get("probes.nx"), self.config.get("probes.ny")
        grid = self.setup.grid_for(eps, nx, ny)
        for _ in range(refine):
            grid = grid.refined()
        mode = self.setup.mode_at(grid.ny)
        coeffs = self.setup.coefficients_at(grid.ny)
        return build_wave(mode, coeffs, self.profile, eps, grid,
                          decay_factor=self.config.get("grid.decay_factor"), **self._closure())

    def branch_table(self) -> BranchTable:
        if self._table is None:
            ny = self.config.get("sweep.ny")
            mode = self.setup.mode_at(ny)
            coeffs = self.setup.coefficients_at(ny)
            sweeper = BranchSweeper(
                self.profile, mode, coeffs,
                nx=self.config.get("sweep.nx"),
                ny=ny,
                L_policy=self.config.get("grid.L_policy"),
                decay_factor=self.config.get("grid.decay_factor"),
                L_fixed=self.config.get("grid.L_fixed"),
                seed=self.config.get("probes.seed"),
                n_directions=self.config.get("probes.directions"),
                casimir_variant=self.config.get("probes.casimir_variant"),
                eps_warn=self.config.get("thresholds.eps_warn"),
                displacement_warn=self.config.get("thresholds.displacement_warn"),
                identity_rtol=self.config.get("thresholds.m_identity_rtol"),
                **self._closure(),
            )
            c_values = uniform_c_values(
                mode.c0,
                self.config.get("sweep.eps_min"),
                self.config.get("sweep.eps_max"),
                self.config.get("sweep.n_points"),
            )
            self._table = sweeper.sweep(c_values, jobs=self.jobs, progress=self.progress)
        return self._table

    # Checks

    def check_mode_speed(self) -> AcceptanceCheck:
        """Closed-form speed (exponential) and second-order convergence in ny."""
        speeds = {ny: solve_fundamental_mode(self.profile, ny).c0 for ny in (501, 1001, 2001)}
        details: Dict[str, Any] = {"c0": speeds}
        if self.profile.kind is ProfileKind.EXPONENTIAL:
            exact = exponential_mode_speed(self.profile)
            errors = {ny: abs(c - exact) / exact for ny, c in speeds.items()}
            ratio = errors[501] / errors[1001]
            details.update(exact=exact, relative_error=errors, ratio=ratio)
            passed = errors[2001] <= 1e-5 and abs(ratio - 4.0) <= 0.5
        else:
            ratio = (speeds[501] - speeds[1001]) / (speeds[1001] - speeds[2001])
            details.update(richardson_ratio=ratio)
            passed = abs(ratio - 4.0) <= 0.5
        return AcceptanceCheck("mode_speed", bool(passed), details)

    def check_momentum_power_law(self) -> AcceptanceCheck:
        table = self.branch_table()
        fit = table.fits.get("momentum")
        if fit is None:
            return AcceptanceCheck("momentum_power_law", False, {"warnings": table.warnings})
        exponent_tol = self.config.get("thresholds.momentum_fit_exponent_tol")
        prefactor_rtol = self.config.get("thresholds.momentum_fit_prefactor_rtol")
        prefactor_error = abs(fit.prefactor - table.K) / table.K
        passed = abs(fit.exponent - 1.5) <= exponent_tol and prefactor_error <= prefactor_rtol
        return AcceptanceCheck("momentum_power_law", bool(passed), {
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "K": table.K,
            "prefactor_relative_error": prefactor_error,
        })

    def check_m_second_law(self) -> AcceptanceCheck:
        table = self.branch_table()
        samples = table.m_second
        fit = table.fits.get("minus_m_second")
        if samples is None or fit is None:
            return AcceptanceCheck("m_second_law", False, {"warnings": table.warnings})
        closed = m_second_closed(table, samples.c)
        relative = np.abs(samples.m_second_fd - closed) / np.abs(closed)
        smallest = relative[:2]
        rtol = self.config.get("thresholds.m_second_rtol")
        all_negative = bool(np.all(samples.m_second_fd < 0.0))
        passed = all_negative and bool(np.all(smallest <= rtol)) and abs(fit.exponent - 0.5) <= 0.1
        return AcceptanceCheck("m_second_law", bool(passed), {
            "all_negative": all_negative,
            "relative_error_smallest_eps": smallest.tolist(),
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "expected_prefactor": 1.5 * table.K,
        })

    def check_m_identity(self) -> AcceptanceCheck:
        samples = self.branch_table().m_second
        if samples is None:
            return AcceptanceCheck("m_second_identity", False, {})
        gap = float(samples.relative_gap.max())
        return AcceptanceCheck("m_second_identity", gap <= self.config.get("thresholds.m_identity_rtol"),
                               {"max_relative_gap": gap})

    def check_momentum_equivalence(self) -> AcceptanceCheck:
        points = self.branch_table().valid_points
        eps = [p.eps for p in points]
        gaps = [abs(p.I_def - p.I_kin) / abs(p.I_def) for p in points]
        order = fitted_order(eps, gaps)
        required = self.config.get("thresholds.momentum_equivalence_order")
        return AcceptanceCheck("momentum_equivalence", bool(order >= required),
                               {"order": order, "relative_gaps": gaps, "eps": eps})

    def check_criticality(self) -> AcceptanceCheck:
        """Gateaux residuals of H - cI decay fast only with the sigma-free Casimir."""
        eps_values = self._sample_eps()
        seed = self.config.get("probes.seed")
        count = self.config.get("probes.directions")
        rel = self.config.get("probes.h")
        residuals: Dict[str, List[float]] = {"sigma_free": [], "sigma_weighted": []}
        for eps in eps_values:
            wave = self._sample_wave(eps)
            coeffs = self.setup.coefficients_at(wave.grid.ny)
            directions = direction_dictionary(wave.grid, seed, count, 1.0 / (coeffs.k * eps))
            for variant in residuals:
                values = criticality_residuals(wave, self.profile, directions, rel, variant, self.jobs)
                residuals[variant].append(max(abs(v) for v in values))
        free = fitted_order(eps_values, residuals["sigma_free"])
        weighted = fitted_order(eps_values, residuals["sigma_weighted"])
        required = self.config.get("thresholds.criticality_order")
        return AcceptanceCheck("criticality", bool(free >= required and weighted < required - 1.0), {
            "eps": eps_values,
            "max_residuals": residuals,
            "order_sigma_free": free,
            "order_sigma_weighted": weighted,
        })

    def check_jqt_grid_order(self) -> AcceptanceCheck:
        """check_JQT residual halves twice per grid doubling, on a synthetic field and a wave."""
        nx, ny = self.config.get("probes.nx"), self.config.get("probes.ny")
        target = self.config.get("thresholds.grid_order")
        tol = self.config.get("thresholds.grid_order_tol")

        def synthetic(grid: Grid2D) -> WaveField:
            base = quiescent_wave(self.profile, grid, c0=1.0)
            bump = 1e-3 * np.outer(np.exp(-grid.x ** 2), np.sin(np.pi * grid.y))
            return base.with_state(base.rho - bump * np.abs(self.profile.density_prime(grid.y)), base.sigma, base.psi)

        def order(make: Callable[[int], WaveField]) -> float:
            coarse = check_JQT(make(0), self.profile)
            fine = check_JQT(make(1), self.profile)
            return math.log2(max(coarse["rho"], coarse["sigma"]) / max(fine["rho"], fine["sigma"]))

        def synthetic_at(level: int) -> WaveField:
            grid = Grid2D(nx, ny, 8.0)
            return synthetic(grid.refined() if level else grid)

        eps = max(self._sample_eps())
        orders = {
            "synthetic": order(synthetic_at),
            "wave": order(lambda level: self._sample_wave(eps, refine=level)),
        }
        passed = all(abs(o - target) <= tol for o in orders.values())
        return AcceptanceCheck("jqt_grid_order", bool(passed), {"orders": orders, "eps": eps})

    def check_jordan_chain(self) -> AcceptanceCheck:
        eps_values = self._sample_eps()
        nx, ny = self.config.get("probes.nx"), self.config.get("probes.ny")
        mode = self.setup.mode_at(ny)
        coeffs = self.setup.coefficients_at(ny)
        reports = [
            build_chain_report(
                mode, coeffs, self.profile, eps, nx, ny,
                delta_c_ratio=self.config.get("probes.delta_c_ratio"),
                seed=self.config.get("probes.seed"),
                n_directions=self.config.get("probes.directions"),
                hessian_step=self.config.get("probes.hessian_h"),
                noise_factor=self.config.get("thresholds.chain_noise_factor"),
                casimir_variant=self.config.get("probes.casimir_variant"),
                decay_factor=self.config.get("grid.decay_factor"),
                jobs=self.jobs,
                **self._closure(),
            )
            for eps in eps_values
        ]
        eigen_order = fitted_order(eps_values, [max(map(abs, r.eigen_residuals)) for r in reports])
        haupt_order = fitted_order(eps_values, [max(map(abs, r.haupt_residuals)) for r in reports])
        largest = reports[0]
        passed = (
            eigen_order >= self.config.get("thresholds.criticality_order")
            and haupt_order >= self.config.get("thresholds.generalized_order")
            and all(r.fredholm_scalar > 0.0 and r.chain_terminates for r in reports)
            and largest.fredholm_gap <= self.config.get("thresholds.fredholm_gap_rtol")
        )
        return AcceptanceCheck("jordan_chain", bool(passed), {
            "eps": eps_values,
            "eigen_order": eigen_order,
            "generalized_order": haupt_order,
            "fredholm_scalar": [r.fredholm_scalar for r in reports],
            "expected_scalar": [1.5 * coeffs.K * eps for eps in eps_values],
            "fredholm_gap_at_largest_eps": largest.fredholm_gap,
        })

    def check_quiescent(self) -> AcceptanceCheck:
        nx, ny = self.config.get("probes.nx"), self.config.get("probes.ny")
        grid = Grid2D(nx, ny, 10.0)
        mode = self.setup.mode_at(ny)
        coeffs = self.setup.coefficients_at(ny)
        quiet = quiescent_wave(self.profile, grid, mode.c0)
        built = build_wave(mode, coeffs, self.profile, 0.0, grid)
        identical = all(
            getattr(quiet, name).tobytes() == getattr(built, name).tobytes()
            for name in ("rho", "psi", "sigma", "rho_bar")
        )
        values = evaluate_functionals(built, self.profile).to_dict()
        zero = all(values[key] == 0.0 for key in ("Htilde", "Itilde", "dH", "dI", "H", "I", "m"))
        return AcceptanceCheck("quiescent", bool(identical and zero), {"bitwise_identical": identical,
                                                                       "functionals": values})

    def check_determinism(self) -> AcceptanceCheck:
        """A small sweep rendered twice gives identical CSV bytes."""
        ny = self.config.get("probes.ny")
        mode = self.setup.mode_at(ny)
        coeffs = self.setup.coefficients_at(ny)
        c_values = uniform_c_values(mode.c0, 0.05, 0.1, 3)

        def render() -> str:
            sweeper = BranchSweeper(self.profile, mode, coeffs, self.config.get("probes.nx"), ny,
                                    seed=self.config.get("probes.seed"), **self._closure())
            return dumps_csv(branch_frame(sweeper.sweep(c_values, control=False)))

        identical = render() == render()
        return AcceptanceCheck("determinism", identical, {"points": len(c_values)})

    def run(self) -> List[AcceptanceCheck]:
        checks = []
        for check in (
            self.check_mode_speed,
            self.check_momentum_power_law,
            self.check_m_second_law,
            self.check_criticality,
            self.check_jqt_grid_order,
            self.check_jordan_chain,
            self.check_m_identity,
            self.check_momentum_equivalence,
            self.check_quiescent,
            self.check_determinism,
        ):
            name = check.__name__.replace("check_", "")
            self.logger.info(f"Acceptance check: {name}")
            try:
                result = check()
            except StratMoiError as e:
                result = AcceptanceCheck(name, False, {"error": f"{type(e).__name__}: {e}"})
            level = self.logger.info if result.passed else self.logger.warning
            level(f"{result.name}: {'passed' if result.passed else 'FAILED'}")
            checks.append(result)
        return checks
