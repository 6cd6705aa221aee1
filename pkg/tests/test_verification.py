"""Tests for the acceptance suite."""

import json
import math

import pytest

from stratmoi.models import StratificationProfile
from stratmoi.modules.verification import AcceptanceSuite, exponential_mode_speed, fitted_order
from stratmoi.utils.config import Config
from stratmoi.utils.exceptions import SolverError


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps({
        "sweep": {"nx": 129, "ny": 65, "n_points": 3},
        "probes": {"nx": 129, "ny": 65, "directions": 2},
        "runtime": {"progress": False},
    }), encoding="utf-8")
    return Config(str(path), load_env=False)


def test_fitted_order():
    eps = [0.1, 0.05, 0.025]
    assert fitted_order(eps, [3.0 * e ** 3 for e in eps]) == pytest.approx(3.0, abs=1e-12)
    assert fitted_order(eps, [-e ** 2 for e in eps]) == pytest.approx(2.0, abs=1e-12)
    assert fitted_order(eps, [1e-3, 0.0, 1e-5]) == math.inf


def test_exponential_mode_speed():
    assert exponential_mode_speed(StratificationProfile.exponential()) == pytest.approx(0.3143535, abs=1e-7)
    steeper = StratificationProfile.exponential(beta=2.0, g=9.81)
    assert exponential_mode_speed(steeper) == pytest.approx(math.sqrt(9.81 * 2.0 / (math.pi ** 2 + 1.0)))


class TestChecks:
    def test_quiescent(self, small_config):
        check = AcceptanceSuite(small_config).check_quiescent()
        assert check.passed
        assert check.details["bitwise_identical"]

    def test_mode_speed(self, small_config):
        check = AcceptanceSuite(small_config).check_mode_speed()
        assert check.passed
        assert check.details["relative_error"][2001] <= 1e-5

    def test_determinism(self, small_config):
        check = AcceptanceSuite(small_config).check_determinism()
        assert check.passed
        assert check.to_dict()["name"] == "determinism"

    def test_errors_become_failed_checks(self, small_config, monkeypatch):
        suite = AcceptanceSuite(small_config)

        def broken():
            raise SolverError("no mode")

        for name in ("check_mode_speed", "check_momentum_power_law", "check_m_second_law", "check_criticality",
                     "check_jqt_grid_order", "check_jordan_chain", "check_m_identity",
                     "check_momentum_equivalence", "check_determinism"):
            monkeypatch.setattr(suite, name, broken)
        checks = suite.run()
        assert len(checks) == 10
        assert [c.name for c in checks if c.passed] == ["quiescent"]
        assert all("SolverError" in c.details["error"] for c in checks if not c.passed)


@pytest.mark.slow
def test_full_suite_on_default_resolution():
    checks = AcceptanceSuite(Config(load_env=False), jobs=4).run()
    failed = {c.name: c.details for c in checks if not c.passed}
    assert not failed, failed
