"""Configuration management: shipped defaults, user documents and env overrides."""

import copy
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml
from dotenv import load_dotenv

from .error_handler import error_ledger, handle_errors
from .exceptions import ConfigurationError
from .logger import get_logger

SCHEMA_VERSION = "1.0"

PROFILE_KINDS = ("exponential", "linear", "tanh-pycnocline")
AMPLITUDE_CONVENTIONS = ("streamfunction", "displacement")
CASIMIR_VARIANTS = ("sigma_free", "sigma_weighted")
DENSITY_CLOSURES = ("linear", "streamline", "corrected")
L_POLICIES = ("decay", "fixed")

# Keys whose default is null accept any JSON value (lists, strings, null)
_OPEN_KEYS = {
    ("sweep", "eps_list"),
    ("sweep", "c_list"),
    ("logging", "file"),
    ("logging", "error_file"),
}


def _key_lines(text: str) -> Dict[Tuple[str, ...], int]:
    """Map every mapping key path of a YAML/JSON document to its 1-based line."""
    lines: Dict[Tuple[str, ...], int] = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key_path = path + (str(key_node.value),)
                lines[key_path] = key_node.start_mark.line + 1
                walk(value_node, key_path)

    if root is not None:
        walk(root, ())
    return lines


class Config:
    """Configuration manager for stratmoi runs."""

    def __init__(self, config_path: Optional[str] = None, load_env: bool = True):
        """Initialize configuration.

        Args:
            config_path: Optional path to a JSON (or YAML) run configuration.
                Shipped defaults from config/default.yaml are applied first.
            load_env: Whether to apply .env / environment overrides.
        """
        self.config_path = Path(config_path) if config_path else None
        self.defaults_path = Path(__file__).parent.parent.parent.parent / "config" / "default.yaml"
        self._config: Dict[str, Any] = self._get_default_config()
        self.warnings: List[str] = []
        self.logger = get_logger(__name__)

        self.load_config(load_env)

    def load_config(self, load_env: bool = True) -> None:
        """Load shipped defaults, the user document, and environment overrides."""
        if self.defaults_path.exists():
            self._merge_document(self.defaults_path)

        if self.config_path is not None:
            if not self.config_path.exists():
                raise ConfigurationError(f"config file not found: {self.config_path}")
            self._merge_document(self.config_path)

        if load_env:
            load_dotenv()
            self._apply_env_overrides()

        self.validate()

    def _merge_document(self, path: Path) -> None:
        """Parse one document and merge it strictly onto the current values."""
        text = path.read_text(encoding="utf-8")
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            error_ledger.log_error(
                module="Config",
                error_type="ConfigParseError",
                description=f"Failed to parse {path}",
                exception=e
            )
            raise ConfigurationError(f"cannot parse {path}: {getattr(e, 'problem', e)}", line=line)

        if document is None:
            return
        if not isinstance(document, dict):
            raise ConfigurationError(f"{path}: top level must be an object", line=1)

        self._merge(self._config, document, (), _key_lines(text))

    def _merge(self, target: Dict[str, Any], source: Dict[str, Any],
               path: Tuple[str, ...], lines: Dict[Tuple[str, ...], int]) -> None:
        for key, value in source.items():
            key_path = path + (str(key),)
            dotted = ".".join(key_path)
            line = lines.get(key_path)

            if key not in target:
                raise ConfigurationError(f"unknown key '{dotted}'", line=line)

            current = target[key]
            if key_path in _OPEN_KEYS:
                target[key] = value
            elif isinstance(current, dict):
                if not isinstance(value, dict):
                    raise ConfigurationError(f"'{dotted}' must be an object", line=line)
                self._merge(current, value, key_path, lines)
            elif isinstance(current, bool):
                if not isinstance(value, bool):
                    raise ConfigurationError(f"'{dotted}' must be a boolean", line=line)
                target[key] = value
            elif isinstance(current, (int, float)):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigurationError(f"'{dotted}' must be a number", line=line)
                if isinstance(current, int) and not isinstance(value, int):
                    raise ConfigurationError(f"'{dotted}' must be an integer", line=line)
                if value <= 0:
                    raise ConfigurationError(f"'{dotted}' must be positive", line=line)
                target[key] = value
            elif isinstance(current, list):
                if not isinstance(value, list):
                    raise ConfigurationError(f"'{dotted}' must be a list", line=line)
                target[key] = value
            elif isinstance(current, str):
                if not isinstance(value, str):
                    raise ConfigurationError(f"'{dotted}' must be a string", line=line)
                target[key] = value
            else:
                target[key] = value

    def _apply_env_overrides(self) -> None:
        """Apply environment variable overrides to configuration."""
        if seed := os.getenv("STRATMOI_SEED"):
            try:
                self._config["probes"]["seed"] = int(seed)
            except ValueError:
                raise ConfigurationError(f"STRATMOI_SEED must be an integer, got '{seed}'")

        if output_dir := os.getenv("STRATMOI_OUTPUT_DIR"):
            self._config["output"]["directory"] = output_dir

        if log_level := os.getenv("LOG_LEVEL"):
            self._config["logging"]["level"] = log_level

    def validate(self) -> None:
        """Check cross-field rules; collect asymptotic-regime warnings."""
        self.warnings = []

        if self.get("profile.kind") not in PROFILE_KINDS:
            raise ConfigurationError(
                f"profile.kind must be one of {', '.join(PROFILE_KINDS)}, got '{self.get('profile.kind')}'"
            )
        for key in ("grid.nx", "grid.ny", "mode.ny", "probes.nx", "probes.ny"):
            if self.get(key) < 16:
                raise ConfigurationError(f"{key.split('.')[-1]} ≥ 16 required ({key}={self.get(key)})")
        if self.get("kdv.amplitude_convention") not in AMPLITUDE_CONVENTIONS:
            raise ConfigurationError(
                f"kdv.amplitude_convention must be one of {', '.join(AMPLITUDE_CONVENTIONS)}"
            )
        if self.get("probes.casimir_variant") not in CASIMIR_VARIANTS:
            raise ConfigurationError(
                f"probes.casimir_variant must be one of {', '.join(CASIMIR_VARIANTS)}"
            )
        if self.get("wave.closure") not in DENSITY_CLOSURES:
            raise ConfigurationError(f"wave.closure must be one of {', '.join(DENSITY_CLOSURES)}")
        if self.get("grid.L_policy") not in L_POLICIES:
            raise ConfigurationError(f"grid.L_policy must be one of {', '.join(L_POLICIES)}")
        if self.get("probes.delta_c_ratio") >= 1.0:
            raise ConfigurationError("probes.delta_c_ratio must be < 1 (δc < ε²)")
        if self.get("sweep.eps_min") >= self.get("sweep.eps_max"):
            raise ConfigurationError("sweep.eps_min must be smaller than sweep.eps_max")

        for key in ("sweep.eps_list", "sweep.c_list"):
            values = self.get(key)
            if values is None:
                continue
            if not isinstance(values, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in values
            ):
                raise ConfigurationError(f"{key} must be a list of positive numbers or null")

        for eps in self.eps_values():
            self._guard_eps(eps)

    def _guard_eps(self, eps: float) -> None:
        eps_max = self.get("thresholds.eps_max")
        eps_warn = self.get("thresholds.eps_warn")
        if eps >= eps_max:
            raise ConfigurationError(f"eps={eps} outside the asymptotic regime (must be < {eps_max})")
        if eps > eps_warn:
            message = f"eps={eps} exceeds {eps_warn}; small-amplitude expansions may be inaccurate"
            if message not in self.warnings:
                self.warnings.append(message)
                self.logger.warning(message)

    def eps_values(self) -> List[float]:
        """All amplitude parameters named anywhere in the configuration."""
        values = [self.get("wave.eps"), self.get("sweep.eps_min"), self.get("sweep.eps_max")]
        values += list(self.get("probes.eps_list") or [])
        values += list(self.get("sweep.eps_list") or [])
        return [float(v) for v in values]

    def _get_default_config(self) -> Dict[str, Any]:
        """Built-in defaults; also the schema for strict key checking."""
        return {
            "profile": {
                "kind": "exponential",
                "g": 1.0,
                "rho0": 1.0,
                "beta": 1.0,
                "rho_bottom": 1.0,
                "rho_top": 0.9,
                "amplitude": 0.05,
                "center": 0.5,
                "thickness": 0.1,
            },
            "mode": {
                "ny": 2001,
                "validation_samples": 1001,
            },
            "kdv": {
                "amplitude_convention": "streamfunction",
            },
            "grid": {
                "nx": 1025,
                "ny": 257,
                "L_policy": "decay",
                "decay_factor": 10.0,
                "L_fixed": 100.0,
            },
            "wave": {
                "eps": 0.1,
                "closure": "corrected",
                "passes": 2,
            },
            "sweep": {
                "eps_min": 0.02,
                "eps_max": 0.1,
                "n_points": 17,
                "eps_list": None,
                "c_list": None,
                "nx": 1025,
                "ny": 513,
            },
            "probes": {
                "nx": 257,
                "ny": 257,
                "eps_list": [0.1, 0.05, 0.025],
                "h": 1.0e-3,
                "hessian_h": 1.0e-2,
                "delta_c_ratio": 0.05,
                "seed": 12345,
                "directions": 5,
                "casimir_variant": "sigma_free",
            },
            "thresholds": {
                "genericity": 1.0e-6,
                "chain_noise_factor": 10.0,
                "eps_warn": 0.15,
                "eps_max": 0.5,
                "displacement_warn": 0.1,
                "momentum_fit_exponent_tol": 0.1,
                "momentum_fit_prefactor_rtol": 0.05,
                "m_second_rtol": 0.10,
                "m_identity_rtol": 0.05,
                "fredholm_gap_rtol": 0.01,
                "criticality_order": 3.0,
                "generalized_order": 2.0,
                "momentum_equivalence_order": 1.5,
                "grid_order": 2.0,
                "grid_order_tol": 0.3,
            },
            "output": {
                "directory": "output",
                "formats": ["json", "csv"],
            },
            "logging": {
                "level": "INFO",
                "file": None,
                "error_file": None,
            },
            "runtime": {
                "jobs": 1,
                "strict": False,
                "progress": True,
            },
        }

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation.

        Args:
            key: Configuration key in dot notation (e.g., 'grid.nx')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value: Any = self._config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    @handle_errors("Config")
    def set(self, key: str, value: Any) -> None:
        """Set an existing configuration value using dot notation."""
        keys = key.split('.')
        config = self._config
        for k in keys[:-1]:
            if k not in config or not isinstance(config[k], dict):
                raise ConfigurationError(f"unknown key '{key}'")
            config = config[k]
        if keys[-1] not in config:
            raise ConfigurationError(f"unknown key '{key}'")
        config[keys[-1]] = value

    def to_dict(self) -> Dict[str, Any]:
        """Deep copy of the resolved configuration."""
        return copy.deepcopy(self._config)

    def get_output_path(self, filename: str = "") -> Path:
        """Path inside the configured output directory."""
        base_dir = Path(self.get("output.directory", "output"))
        return base_dir / filename if filename else base_dir

    def __repr__(self) -> str:
        """String representation of config."""
        return f"<Config: {self.config_path or 'defaults'}>"
