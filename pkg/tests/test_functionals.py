"""Tests for the energy, momentum and Casimir functionals and their variations."""

from dataclasses import replace

import numpy as np
import pytest

from stratmoi.models import Grid2D, Variation, WaveField
from stratmoi.modules.functionals import (
    FunctionalSelector,
    anomaly_scale,
    apply_J,
    check_casimir,
    criticality_residuals,
    direction_dictionary,
    evaluate_functionals,
    first_variation_H_minus_cI,
    first_variation_I,
    gateaux,
    hessian_bilinear,
    momentum_kinetic_form,
    ordered_map,
    pair_with,
    relative_step,
)
from stratmoi.modules.wavefields import quiescent_wave
from stratmoi.utils.exceptions import ConfigurationError, DomainError, StepError

from conftest import SMALL_NX, SMALL_NY


def relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b))


@pytest.fixture(scope="module")
def wave(make_wave):
    return make_wave(0.1)


@pytest.fixture(scope="module")
def corrected_wave(make_wave):
    return make_wave(0.1, closure="corrected")


@pytest.fixture(scope="module")
def smooth_state(exponential):
    """A hand-built state with smooth anomalies on a fine grid."""
    grid = Grid2D(129, 129, 3.0)
    X, Y = grid.X, grid.Y
    bump = np.exp(-X ** 2) * np.sin(np.pi * Y)
    rho_bar = exponential.density(grid.y)
    return WaveField(
        grid=grid, c=0.4, eps=0.1, c0=0.3,
        rho=rho_bar[None, :] + 1e-2 * bump,
        psi=np.zeros(grid.shape),
        sigma=bump * np.cos(X),
        rho_bar=rho_bar,
    )


class TestEvaluate:
    def test_quiescent_values_vanish(self, exponential):
        rest = quiescent_wave(exponential, Grid2D(65, 33, 10.0), 0.3)
        for variant in ("sigma_free", "sigma_weighted"):
            values = evaluate_functionals(rest, exponential, variant)
            assert values.H == 0.0
            assert values.I == 0.0
            assert values.m == 0.0
            assert values.continued_nodes == 0

    def test_momentum_scales_like_eps_cubed(self, wave, small_coeffs, exponential):
        values = evaluate_functionals(wave, exponential)
        assert values.I == pytest.approx(small_coeffs.K * 0.1 ** 3, rel=0.05)

    def test_unknown_variant(self, wave, exponential):
        with pytest.raises(ConfigurationError):
            evaluate_functionals(wave, exponential, "sigma_squared")

    def test_selector_picks_fields(self, wave, exponential):
        values = evaluate_functionals(wave, exponential)
        assert FunctionalSelector("H-cI").pick(values) == values.m
        assert FunctionalSelector.HTILDE.pick(values) == values.Htilde
        assert FunctionalSelector.ITILDE.pick(values) == values.Itilde
        assert values.m == values.H - values.c * values.I


class TestKineticMomentum:
    def test_agrees_with_momentum(self, make_wave, exponential):
        gaps = []
        for eps in (0.1, 0.05):
            wave = make_wave(eps)
            gaps.append(relative_gap(momentum_kinetic_form(wave), evaluate_functionals(wave, exponential).I))
        assert gaps[0] < 0.2
        assert gaps[1] < 0.6 * gaps[0]

    def test_requires_positive_speed(self, wave):
        with pytest.raises(DomainError):
            momentum_kinetic_form(replace(wave, c=0.0))


class TestFirstVariations:
    def test_momentum_variation_approximates_streamfunction(self, make_wave, exponential):
        errors = []
        for eps in (0.1, 0.05):
            wave = make_wave(eps)
            target = wave.psi / wave.c
            offset = first_variation_I(wave, exponential).d_sigma
            errors.append(np.abs(offset - target).max() / np.abs(target).max())
        assert errors[0] < 0.25
        assert errors[1] < 0.5 * errors[0]

    def test_streamline_density_makes_offset_exact(self, make_wave, exponential):
        wave = make_wave(0.1, closure="streamline")
        offset = first_variation_I(wave, exponential).d_sigma
        np.testing.assert_allclose(offset, wave.psi / wave.c, rtol=0.0, atol=1e-10 * np.abs(wave.psi).max())

    def test_gateaux_error_is_second_order_in_step(self, wave, exponential):
        direction = direction_dictionary(wave.grid, seed=7, count=1)[0]
        exact = first_variation_I(wave, exponential).dot(direction, wave.grid)
        h = 0.05 / np.abs(direction.d_rho).max()
        errors = [abs(gateaux(FunctionalSelector.I, wave, direction, step, exponential) - exact)
                  for step in (h, 0.5 * h)]
        assert errors[0] / errors[1] == pytest.approx(4.0, abs=0.5)

    def test_gateaux_of_momentum_along_sigma_is_exact(self, wave, exponential):
        grid = wave.grid
        direction = direction_dictionary(grid, seed=7, count=1)[0]
        sigma_only = Variation(np.zeros(grid.shape), direction.d_sigma)
        expected = first_variation_I(wave, exponential).dot(sigma_only, grid)
        assert gateaux(FunctionalSelector.I, wave, sigma_only, 1e-4, exponential) == pytest.approx(expected,
                                                                                                  rel=1e-8)

    def test_gateaux_rejects_bad_step(self, wave, exponential):
        direction = direction_dictionary(wave.grid, seed=7, count=1)[0]
        with pytest.raises(StepError):
            gateaux(FunctionalSelector.I, wave, direction, 0.0, exponential)

    def test_criticality_gradient_is_small(self, corrected_wave, exponential):
        wave = corrected_wave
        gradient = first_variation_H_minus_cI(wave, exponential)
        directions = direction_dictionary(wave.grid, seed=3, count=3)
        shifted = first_variation_H_minus_cI(wave, exponential, c=wave.c0)
        assert max(map(abs, pair_with(gradient, directions, wave.grid))) < \
            max(map(abs, pair_with(shifted, directions, wave.grid)))
        np.testing.assert_allclose(gradient.d_sigma, 0.0, atol=1e-12 * np.abs(wave.psi).max())

    def test_casimir_choice_controls_criticality(self, corrected_wave, exponential):
        wave = corrected_wave
        directions = direction_dictionary(wave.grid, seed=11, count=2)
        free = criticality_residuals(wave, exponential, directions, casimir_variant="sigma_free")
        weighted = criticality_residuals(wave, exponential, directions, casimir_variant="sigma_weighted")
        assert max(map(abs, free)) < 0.1 * max(map(abs, weighted))


class TestHessian:
    def test_symmetric(self, wave, exponential):
        eta, zeta = direction_dictionary(wave.grid, seed=5, count=2)
        h = 1e-2 * anomaly_scale(wave)
        forward = hessian_bilinear(FunctionalSelector.H_MINUS_CI, wave, eta, zeta, h, exponential)
        backward = hessian_bilinear(FunctionalSelector.H_MINUS_CI, wave, zeta, eta, h, exponential, jobs=2)
        assert forward == pytest.approx(backward, rel=1e-6)

    def test_momentum_hessian_closed_form(self, wave, exponential):
        """I'' pairs (a1, b1), (a2, b2) as -∬ z'' a1 a2 sigma + z' (a1 b2 + a2 b1), z = -ln(rho)."""
        grid = wave.grid
        eta, zeta = direction_dictionary(grid, seed=9, count=2)
        z1 = -1.0 / wave.rho
        z2 = 1.0 / wave.rho ** 2
        expected = -grid.integrate(
            z2 * eta.d_rho * zeta.d_rho * wave.sigma
            + z1 * (eta.d_rho * zeta.d_sigma + zeta.d_rho * eta.d_sigma)
        )
        h = 1e-2 * anomaly_scale(wave)
        assert hessian_bilinear(FunctionalSelector.I, wave, eta, zeta, h, exponential) == \
            pytest.approx(expected, rel=5e-4)

    def test_zero_direction(self, wave, exponential):
        eta = direction_dictionary(wave.grid, seed=5, count=1)[0]
        assert hessian_bilinear(FunctionalSelector.I, wave, eta, Variation.zeros(wave.grid), 1e-3,
                                exponential) == 0.0


class TestSkewOperator:
    def test_skew_symmetric(self, smooth_state):
        grid = smooth_state.grid
        u, v = direction_dictionary(grid, seed=21, count=2, length_scale=1.0)
        Jv = apply_J(smooth_state, v)
        forward = u.dot(Jv, grid)
        backward = apply_J(smooth_state, u).dot(v, grid)
        assert abs(forward + backward) <= 1e-2 * Jv.norm(grid)

    def test_sigma_free_casimir_is_annihilated(self, wave, exponential):
        free = check_casimir(wave, exponential, "sigma_free")
        weighted = check_casimir(wave, exponential, "sigma_weighted")
        assert max(free["rho"], free["sigma"]) < 0.1 * max(weighted["rho"], weighted["sigma"])
        assert free["casimir_variant"] == "sigma_free"

    def test_casimir_residual_refines(self, make_wave, exponential):
        coarse = check_casimir(make_wave(0.1), exponential)
        fine = check_casimir(make_wave(0.1, 2 * SMALL_NX - 1, 2 * SMALL_NY - 1), exponential)
        assert max(fine["rho"], fine["sigma"]) < max(coarse["rho"], coarse["sigma"]) / 3.0


class TestDirections:
    def test_reproducible_and_unit(self, bump_grid):
        first = direction_dictionary(bump_grid, seed=12345)
        second = direction_dictionary(bump_grid, seed=12345)
        assert len(first) == 5
        for a, b in zip(first, second):
            assert a.d_rho.tobytes() == b.d_rho.tobytes()
            assert a.d_sigma.tobytes() == b.d_sigma.tobytes()
            assert a.norm(bump_grid) == pytest.approx(1.0, rel=1e-12)

    def test_seed_changes_directions(self, bump_grid):
        a = direction_dictionary(bump_grid, seed=1, count=1)[0]
        b = direction_dictionary(bump_grid, seed=2, count=1)[0]
        assert not np.array_equal(a.d_rho, b.d_rho)

    def test_relative_step(self, wave):
        direction = direction_dictionary(wave.grid, seed=1, count=1)[0]
        assert relative_step(wave, direction, 1e-3) == pytest.approx(1e-3 * anomaly_scale(wave), rel=1e-12)
        with pytest.raises(StepError):
            relative_step(wave, Variation.zeros(wave.grid))

    def test_relative_step_rejects_non_finite_direction(self, wave):
        direction = direction_dictionary(wave.grid, seed=1, count=1)[0]
        direction.d_sigma[3, 3] = np.nan
        with pytest.raises(StepError, match="non-finite"):
            relative_step(wave, direction)

    def test_quiescent_scale_is_one(self, exponential):
        assert anomaly_scale(quiescent_wave(exponential, Grid2D(17, 17, 1.0), 0.3)) == 1.0


def test_ordered_map_keeps_order():
    assert ordered_map(lambda n: n * n, list(range(20)), jobs=4) == [n * n for n in range(20)]
