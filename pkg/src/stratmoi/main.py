"""Main orchestrator and command-line interface for stratmoi."""

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from . import __version__
from .modules.branch import (
    BranchSweeper,
    branch_frame,
    c_values_from_eps,
    resample_c_values,
    summarize,
    uniform_c_values,
)
from .modules.functionals import (
    check_casimir,
    criticality_residuals,
    direction_dictionary,
    evaluate_functionals,
    first_variation_H_minus_cI,
    first_variation_Htilde_minus_cItilde,
    momentum_kinetic_form,
    pair_with,
)
from .modules.modes import genericity_integral, mode_residual
from .modules.problem import ProblemSetup
from .modules.spectral_chain import build_chain_report
from .modules.stratification import validate
from .modules.verification import AcceptanceSuite, fitted_order
from .modules.wavefields import build_wave, wave_metadata, wave_to_frame
from .utils import SCHEMA_VERSION, Config, error_ledger, setup_logger
from .utils.exceptions import ConfigurationError, InvariantViolation, StratMoiError
from .utils.output import dumps_json, write_csv_atomic, write_json_atomic

COMMANDS = (
    "validate-profile",
    "modes",
    "coeffs",
    "wave",
    "functionals",
    "residuals",
    "branch",
    "chain-check",
    "verify",
)


class StratMoiRunner:
    """Wires a resolved configuration to the computational modules and writes artifacts."""

    def __init__(self, config_path: Optional[str] = None, out: Optional[str] = None,
                 jobs: Optional[int] = None, strict: bool = False, verbose: bool = False):
        """Initialize the runner.

        Args:
            config_path: Optional path to a JSON (or YAML) run configuration
            out: Output directory overriding output.directory
            jobs: Worker count overriding runtime.jobs
            strict: Turn truncation warnings into errors
            verbose: Force DEBUG logging
        """
        self.config = Config(config_path)
        if out:
            self.config.set("output.directory", out)
        if jobs is not None:
            if jobs < 1:
                raise ConfigurationError("--jobs must be at least 1")
            self.config.set("runtime.jobs", jobs)
        if strict:
            self.config.set("runtime.strict", True)

        level = "DEBUG" if verbose else self.config.get("logging.level")
        self.logger = setup_logger(level=level, log_file=self.config.get("logging.file"))
        error_ledger.configure(self.config.get("logging.error_file"))

        self.setup = ProblemSetup(self.config)
        self.profile = self.setup.profile
        self.written: List[Path] = []

    @property
    def jobs(self) -> int:
        return self.config.get("runtime.jobs")

    @property
    def strict(self) -> bool:
        return self.config.get("runtime.strict")

    # Artifacts

    def _payload(self, kind: str, data: Dict[str, Any], warnings: Optional[List[str]] = None) -> Dict[str, Any]:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "kind": kind,
            "config": self.config.to_dict(),
            "warnings": list(self.config.warnings) + list(warnings or []),
        }
        payload.update(data)
        return payload

    def _write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = write_json_atomic(self.config.get_output_path(name), payload)
        self.written.append(path)
        self.logger.info(f"Wrote {path}")
        return path

    def _write_csv(self, name: str, frame: pd.DataFrame) -> Optional[Path]:
        if "csv" not in self.config.get("output.formats"):
            return None
        path = write_csv_atomic(self.config.get_output_path(name), frame)
        self.written.append(path)
        self.logger.info(f"Wrote {path}")
        return path

    def write_run_metadata(self, command: str, status: int, started: datetime) -> Path:
        """Timestamps live here, never in the data files."""
        metadata = {
            "command": command,
            "status": status,
            "version": __version__,
            "schema_version": SCHEMA_VERSION,
            "started": started.isoformat(),
            "finished": datetime.now(timezone.utc).isoformat(),
            "files": sorted(p.name for p in self.written),
        }
        return write_json_atomic(self.config.get_output_path("run_metadata.json"), metadata)

    # Subcommands

    def validate_profile(self) -> Dict[str, Any]:
        report = validate(self.profile, self.config.get("mode.validation_samples"))
        payload = self._payload("profile_validation", {"profile": self.profile.to_dict(), "report": report.to_dict()})
        self._write_json("profile_validation.json", payload)
        if not report.passed:
            first = report.failures[0]
            raise InvariantViolation(first.invariant, f"violated at y={first.y:.6g} (value {first.value:.6g})")
        return payload

    def modes(self) -> Dict[str, Any]:
        ny = self.config.get("mode.ny")
        mode = self.setup.mode_at(ny)
        payload = self._payload("modes", {
            "mode": mode.to_dict(),
            "genericity_integral": genericity_integral(mode, self.profile),
            "flux_residual_relative": mode_residual(mode, self.profile, stencil="flux", relative=True),
            "gradient_residual_relative": mode_residual(mode, self.profile, stencil="gradient", relative=True),
        })
        self._write_json("modes.json", payload)
        self._write_csv("modes.csv", pd.DataFrame({"y": mode.y, "phi0": mode.phi0, "phi0_prime": mode.phi0_prime}))
        return payload

    def coeffs(self) -> Dict[str, Any]:
        coeffs = self.setup.coefficients_at(self.config.get("mode.ny"))
        payload = self._payload("coeffs", {"coefficients": coeffs.to_dict()})
        self._write_json("coeffs.json", payload)
        return payload

    def _wave(self, eps: float, nx: int, ny: int):
        grid = self.setup.grid_for(eps, nx, ny)
        return build_wave(self.setup.mode_at(ny), self.setup.coefficients_at(ny), self.profile, eps, grid,
                          strict=self.strict, decay_factor=self.config.get("grid.decay_factor"),
                          closure=self.config.get("wave.closure"), passes=self.config.get("wave.passes"))

    def wave(self) -> Dict[str, Any]:
        wave = self._wave(self.config.get("wave.eps"), self.config.get("grid.nx"), self.config.get("grid.ny"))
        payload = self._payload("wave", {"wave": wave_metadata(wave, self.profile)})
        self._write_json("wave.json", payload)
        self._write_csv("wave.csv", wave_to_frame(wave))
        return payload

    def functionals(self) -> Dict[str, Any]:
        wave = self._wave(self.config.get("wave.eps"), self.config.get("grid.nx"), self.config.get("grid.ny"))
        variant = self.config.get("probes.casimir_variant")
        values = evaluate_functionals(wave, self.profile, variant)
        warnings = []
        if values.continued_nodes:
            warnings.append(f"{values.continued_nodes} nodes used the continued inverse density")
            self.logger.warning(warnings[-1])
        payload = self._payload("functionals", {
            "wave": wave.metadata(),
            "functionals": values.to_dict(),
            "I_kinetic": momentum_kinetic_form(wave),
            "casimir_check": [check_casimir(wave, self.profile, v) for v in ("sigma_free", "sigma_weighted")],
        }, warnings)
        self._write_json("functionals.json", payload)
        return payload

    def residuals(self) -> Dict[str, Any]:
        """Criticality residuals along the direction dictionary at every sampled amplitude."""
        nx, ny = self.config.get("probes.nx"), self.config.get("probes.ny")
        seed, count = self.config.get("probes.seed"), self.config.get("probes.directions")
        variant = self.config.get("probes.casimir_variant")
        eps_values = sorted(self.config.get("probes.eps_list"), reverse=True)
        coeffs = self.setup.coefficients_at(ny)

        rows = []
        for eps in eps_values:
            wave = self._wave(eps, nx, ny)
            directions = direction_dictionary(wave.grid, seed, count, 1.0 / (coeffs.k * eps))
            measured = criticality_residuals(wave, self.profile, directions, self.config.get("probes.h"),
                                           variant, self.jobs)
            closed = pair_with(first_variation_H_minus_cI(wave, self.profile), directions, wave.grid)
            base = pair_with(first_variation_Htilde_minus_cItilde(wave, self.profile), directions, wave.grid)
            for i, (value, closed_value, base_value) in enumerate(zip(measured, closed, base)):
                rows.append({"eps": eps, "direction": i, "value": value,
                             "closed_form": closed_value, "without_casimirs": base_value})

        frame = pd.DataFrame(rows, columns=["eps", "direction", "value", "closed_form", "without_casimirs"])
        worst = frame.assign(value=frame["value"].abs()).groupby("eps", sort=False)["value"].max()
        payload = self._payload("residuals", {
            "casimir_variant": variant,
            "eps": eps_values,
            "max_abs_residual": [float(worst[e]) for e in eps_values],
            "fitted_order": fitted_order(eps_values, [worst[e] for e in eps_values]) if len(eps_values) >= 3 else None,
            "rows": frame.to_dict(orient="records"),
        })
        self._write_json("residuals.json", payload)
        self._write_csv("residuals.csv", frame)
        return payload

    def _branch_c_values(self, c0: float) -> List[float]:
        """Sweep speeds; explicit lists are resampled uniformly in c unless already uniform."""
        n_points = self.config.get("sweep.n_points")
        c_list = self.config.get("sweep.c_list")
        if c_list is not None:
            c_values = sorted(float(c) for c in c_list)
            spacing = np.diff(c_values)
            if len(c_values) >= 3 and np.allclose(spacing, spacing[0], rtol=1e-8, atol=0.0):
                return c_values
            return resample_c_values(c_values, n_points)
        eps_list = self.config.get("sweep.eps_list")
        if eps_list is not None:
            return resample_c_values(c_values_from_eps(c0, eps_list), n_points)
        return uniform_c_values(c0, self.config.get("sweep.eps_min"), self.config.get("sweep.eps_max"), n_points)

    def branch(self) -> Dict[str, Any]:
        ny = self.config.get("sweep.ny")
        mode = self.setup.mode_at(ny)
        sweeper = BranchSweeper(
            self.profile, mode, self.setup.coefficients_at(ny),
            nx=self.config.get("sweep.nx"),
            ny=ny,
            L_policy=self.config.get("grid.L_policy"),
            decay_factor=self.config.get("grid.decay_factor"),
            L_fixed=self.config.get("grid.L_fixed"),
            seed=self.config.get("probes.seed"),
            n_directions=self.config.get("probes.directions"),
            casimir_variant=self.config.get("probes.casimir_variant"),
            strict=self.strict,
            eps_warn=self.config.get("thresholds.eps_warn"),
            closure=self.config.get("wave.closure"),
            passes=self.config.get("wave.passes"),
            displacement_warn=self.config.get("thresholds.displacement_warn"),
            identity_rtol=self.config.get("thresholds.m_identity_rtol"),
        )
        table = sweeper.sweep(self._branch_c_values(mode.c0), jobs=self.jobs,
                              progress=self.config.get("runtime.progress"))
        summary = summarize(table)
        warnings = summary.pop("warnings")
        payload = self._payload("branch", {"branch": summary}, warnings)
        self._write_json("branch.json", payload)
        self._write_csv("branch.csv", branch_frame(table))
        return payload

    def chain_check(self) -> Dict[str, Any]:
        nx, ny = self.config.get("probes.nx"), self.config.get("probes.ny")
        report = build_chain_report(
            self.setup.mode_at(ny), self.setup.coefficients_at(ny), self.profile,
            self.config.get("wave.eps"), nx, ny,
            delta_c_ratio=self.config.get("probes.delta_c_ratio"),
            seed=self.config.get("probes.seed"),
            n_directions=self.config.get("probes.directions"),
            hessian_step=self.config.get("probes.hessian_h"),
            noise_factor=self.config.get("thresholds.chain_noise_factor"),
            casimir_variant=self.config.get("probes.casimir_variant"),
            decay_factor=self.config.get("grid.decay_factor"),
            strict=self.strict,
            jobs=self.jobs,
            closure=self.config.get("wave.closure"),
            passes=self.config.get("wave.passes"),
        )
        payload = self._payload("chain_report", {"chain": report.to_dict()})
        self._write_json("chain_report.json", payload)
        if not report.chain_terminates:
            raise InvariantViolation("chain_terminates", f"|Fredholm scalar| {abs(report.fredholm_scalar):.3e} "
                                                         f"within noise threshold {report.threshold:.3e}")
        if report.m_second >= 0.0:
            raise InvariantViolation("m_second < 0", f"m'' = {report.m_second:.6e}")
        return payload

    def verify(self) -> Dict[str, Any]:
        suite = AcceptanceSuite(self.config, self.setup, jobs=self.jobs,
                                progress=self.config.get("runtime.progress"))
        checks = suite.run()
        passed = all(check.passed for check in checks)
        payload = self._payload("verify", {"passed": passed, "checks": [c.to_dict() for c in checks]})
        self._write_json("verify.json", payload)
        if not passed:
            failed = ", ".join(c.name for c in checks if not c.passed)
            raise InvariantViolation(failed, "acceptance check(s) failed")
        return payload

    def run(self, command: str) -> Dict[str, Any]:
        """Dispatch a subcommand by its CLI name."""
        if command not in COMMANDS:
            raise ConfigurationError(f"unknown command '{command}'")
        self.logger.info(f"stratmoi {__version__}: {command}")
        return getattr(self, command.replace("-", "_"))()


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line interface."""
    parser = argparse.ArgumentParser(
        prog="stratmoi",
        description="Moment-of-instability checks for internal solitary waves in a stratified channel",
    )
    parser.add_argument(
        "--config",
        help="Path to a JSON run configuration"
    )
    parser.add_argument(
        "--out",
        help="Output directory"
    )
    parser.add_argument(
        "--jobs",
        type=int,
        help="Worker threads for branch points and directions"
    )
    parser.add_argument(
        "--strict",
        action="store_true",
        help="Treat insufficient soliton decay inside the domain as an error"
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Debug logging"
    )
    parser.add_argument(
        "command",
        choices=COMMANDS,
        help="What to compute"
    )

    args = parser.parse_args(argv)
    started = datetime.now(timezone.utc)

    try:
        runner = StratMoiRunner(args.config, out=args.out, jobs=args.jobs,
                                strict=args.strict, verbose=args.verbose)
    except ConfigurationError as e:
        print(f"✗ Configuration error: {e}", file=sys.stderr)
        return e.exit_status

    status = 0
    try:
        payload = runner.run(args.command)
        if args.command == "functionals":
            print(dumps_json(payload["functionals"]), end="")
        else:
            print(f"✓ {args.command} completed")
    except ConfigurationError as e:
        print(f"✗ Configuration error: {e}", file=sys.stderr)
        status = e.exit_status
    except InvariantViolation as e:
        print(f"✗ Invariant failed: {e}", file=sys.stderr)
        status = e.exit_status
    except StratMoiError as e:
        print(f"✗ {type(e).__name__}: {e}", file=sys.stderr)
        status = e.exit_status
    except KeyboardInterrupt:
        print("\nOperation cancelled by user", file=sys.stderr)
        status = 1

    runner.write_run_metadata(args.command, status, started)
    return status


if __name__ == "__main__":
    sys.exit(main())
