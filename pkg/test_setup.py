#!/usr/bin/env python3
"""Smoke test of the basic setup: imports, logging, error ledger and models."""

import os
import sys

# Add src to path for running as a script
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))


def test_imports():
    """Core packages import."""
    from stratmoi.utils.logger import setup_logger, get_logger  # noqa: F401
    from stratmoi.utils.exceptions import StratMoiError, ConfigurationError
    from stratmoi.utils.error_handler import error_ledger  # noqa: F401
    from stratmoi.models import StratificationProfile, VerticalMode, Grid2D, WaveField  # noqa: F401
    from stratmoi.main import main  # noqa: F401

    assert issubclass(ConfigurationError, StratMoiError)
    print("✓ All modules imported successfully")


def test_logger(capsys):
    """Console logging goes to stderr only."""
    from stratmoi.utils.logger import setup_logger

    logger = setup_logger(name="test_logger", level="INFO")
    logger.info("Test info message")
    logger.debug("Hidden debug message")

    captured = capsys.readouterr()
    assert "Test info message" in captured.err
    assert "Hidden debug message" not in captured.err
    assert captured.out == ""


def test_error_logging(tmp_path):
    """The error ledger appends entries to its file once configured."""
    from stratmoi.utils.error_handler import ErrorLedger

    ledger = ErrorLedger()
    ledger.configure(str(tmp_path / "errors.log"))
    ledger.log_error(
        module="TestModule",
        error_type="TestError",
        description="This is a test error",
        solution="No action needed - this is just a test"
    )

    text = (tmp_path / "errors.log").read_text(encoding="utf-8")
    assert "[TestModule] [TestError] This is a test error" in text
    assert "Solution: No action needed" in text


def test_models():
    """Model creation and serialization."""
    import numpy as np
    from stratmoi.models import Grid2D, StratificationProfile

    profile = StratificationProfile.tanh_pycnocline(center=0.4)
    assert StratificationProfile.from_dict(profile.to_dict()) == profile

    grid = Grid2D(33, 17, 4.0)
    assert abs(grid.integrate(np.ones(grid.shape)) - 8.0) < 1e-12
    assert grid.x[16] == 0.0
    print(f"✓ Created profile {profile.kind.value} and grid {grid.shape}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
