import math

import numpy as np
import pytest

from tbell.correlators import SelectionPolicy, selection_factor
from tbell.dynamics import DynamicsParams
from tbell.inequalities import (
    PAZ4,
    PRESETS,
    SANTOS_MINUS,
    SANTOS_PLUS,
    InequalitySpec,
    SearchConfig,
    SolveConfig,
    delta_k,
    delta_k_stationary,
    epsilon_threshold,
    full_time_search,
    jaynes_cummings_frequency,
    maximize_violation,
    stationary_curve,
)

P = DynamicsParams(1.0)
ZERO = SelectionPolicy(0.0)
TWO_SQRT_TWO = 2.0 * math.sqrt(2.0)


class TestSpecValidation:
    def test_presets_are_well_formed(self):
        assert PAZ4.n_times == 4 and PAZ4.bound == 2.0 and PAZ4.abs_mode
        assert SANTOS_MINUS.n_times == 3 and SANTOS_MINUS.bound == 1.0
        assert SANTOS_PLUS.n_times == 3 and SANTOS_PLUS.bound == 1.0
        assert set(PRESETS) == {"paz4", "santos-minus", "santos-plus"}

    def test_rejects_bad_specs(self):
        with pytest.raises(ValueError):
            InequalitySpec(2, ((1, 2, 1.0),), 1.0)
        with pytest.raises(ValueError):
            InequalitySpec(3, ((1, 4, 1.0),), 1.0)
        with pytest.raises(ValueError):
            InequalitySpec(3, ((1, 1, 1.0),), 1.0)
        with pytest.raises(ValueError):
            InequalitySpec(3, ((1, 2, 1.0), (1, 2, -1.0)), 1.0)
        with pytest.raises(ValueError):
            InequalitySpec(3, ((1, 2, 1.0),), 0.0)
        with pytest.raises(ValueError):
            InequalitySpec(3, (), 1.0)


class TestDeltaK:
    def test_santos_minus_at_its_maximum(self):
        times = (0.0, math.pi / 3, 2.0 * math.pi / 3)
        assert delta_k(SANTOS_MINUS, times, P, ZERO) == pytest.approx(1.5, abs=1e-12)

    def test_paz4_at_its_maximum(self):
        s = math.pi / 8
        times = (0.0, s, 2 * s, 3 * s)
        assert delta_k(PAZ4, times, P, ZERO) == pytest.approx(TWO_SQRT_TWO, abs=1e-12)

    def test_full_selection_gives_zero(self):
        silent = SelectionPolicy(1.0)
        assert delta_k(SANTOS_MINUS, (0.0, 1.0, 2.0), P, silent) == 0.0
        assert delta_k(PAZ4, (0.0, 1.0, 2.0, 3.0), P, silent) == 0.0

    def test_arity_mismatch(self):
        with pytest.raises(ValueError, match="time count mismatch"):
            delta_k(SANTOS_MINUS, (0.0, 1.0), P, ZERO)

    def test_requires_ascending_times(self):
        with pytest.raises(ValueError, match="times not ascending"):
            delta_k(SANTOS_MINUS, (0.0, 2.0, 1.0), P, ZERO)


class TestStationary:
    def test_revival_spacing_value(self):
        assert delta_k_stationary(SANTOS_MINUS, math.pi, P, ZERO) == pytest.approx(-3.0, abs=1e-12)

    def test_published_maxima_spacings(self):
        assert delta_k_stationary(SANTOS_MINUS, math.pi / 3, P, ZERO) == pytest.approx(1.5, abs=1e-12)
        assert delta_k_stationary(SANTOS_PLUS, math.pi / 6, P, ZERO) == pytest.approx(1.5, abs=1e-12)

    def test_invalid_spacing(self):
        with pytest.raises(ValueError, match="invalid spacing"):
            delta_k_stationary(SANTOS_MINUS, 0.0, P, ZERO)
        with pytest.raises(ValueError, match="invalid spacing"):
            delta_k_stationary(SANTOS_MINUS, -1.0, P, ZERO)

    def test_curve_matches_scalar_evaluation(self):
        spacings = np.linspace(0.05, math.pi, 40)
        for spec in (SANTOS_MINUS, SANTOS_PLUS, PAZ4):
            curve = stationary_curve(spec, spacings, P, SelectionPolicy(0.25))
            for s, value in zip(spacings, curve):
                assert value == pytest.approx(
                    delta_k_stationary(spec, float(s), P, SelectionPolicy(0.25)), abs=1e-12)

    def test_periodic_in_spacing(self):
        period = math.pi / P.omega
        for s in np.linspace(0.1, 3.0, 17):
            a = delta_k_stationary(SANTOS_MINUS, float(s), P, ZERO)
            b = delta_k_stationary(SANTOS_MINUS, float(s) + period, P, ZERO)
            assert a == pytest.approx(b, abs=1e-12)

    def test_selection_scales_uniformly(self):
        times = (0.1, 0.8, 1.9)
        paz_times = (0.1, 0.8, 1.9, 2.4)
        for eps in np.linspace(0.0, 1.0, 11):
            a_eps = selection_factor(SelectionPolicy(eps))
            got = delta_k(SANTOS_MINUS, times, P, SelectionPolicy(eps))
            assert got == pytest.approx(a_eps * delta_k(SANTOS_MINUS, times, P, ZERO), abs=1e-12)
            got_abs = delta_k(PAZ4, paz_times, P, SelectionPolicy(eps))
            assert got_abs == pytest.approx(a_eps * delta_k(PAZ4, paz_times, P, ZERO), abs=1e-12)


class TestMaximize:
    @pytest.mark.parametrize(
        "spec,expected_max,expected_arg",
        [
            (SANTOS_MINUS, 1.5, math.pi / 3),
            (SANTOS_PLUS, 1.5, math.pi / 6),
            (PAZ4, TWO_SQRT_TWO, math.pi / 8),
        ],
    )
    def test_reproduces_published_maxima(self, spec, expected_max, expected_arg):
        report = maximize_violation(spec, P, ZERO)
        assert report.delta_k_max == pytest.approx(expected_max, abs=1e-9)
        assert report.argmax_spacing == pytest.approx(expected_arg, abs=1e-6)
        assert report.violated

    def test_strong_selection_kills_the_violation(self):
        report = maximize_violation(SANTOS_MINUS, P, SelectionPolicy(0.9))
        assert report.delta_b_max < 0.0
        assert not report.violated
        assert report.a_epsilon < 2.0 / 3.0

    def test_report_is_self_consistent(self):
        for eps in (0.0, 0.3, 0.9):
            report = maximize_violation(PAZ4, P, SelectionPolicy(eps))
            expected = (report.a_epsilon * report.delta_k_max - PAZ4.bound) / PAZ4.bound
            assert report.delta_b_max == pytest.approx(expected, abs=1e-12)
            assert report.violated == (report.delta_b_max > 0)

    def test_argmax_does_not_move_with_selection(self):
        grid = np.linspace(1e-4, math.pi, 4096)
        reference = None
        for eps in (0.0, 0.3, 0.6, 0.9, 0.99):
            values = stationary_curve(SANTOS_MINUS, grid, P, SelectionPolicy(eps))
            best = grid[int(np.argmax(values))]
            if reference is None:
                reference = best
            assert best == pytest.approx(reference, abs=1e-9)
        for eps in (0.0, 0.5, 0.99):
            report = maximize_violation(SANTOS_MINUS, P, SelectionPolicy(eps))
            assert report.argmax_spacing == pytest.approx(math.pi / 3, abs=1e-6)

    def test_frequency_rescales_argmax(self):
        fast = DynamicsParams(4.0)
        report = maximize_violation(SANTOS_MINUS, fast, ZERO)
        assert report.delta_k_max == pytest.approx(1.5, abs=1e-9)
        assert fast.omega * report.argmax_spacing == pytest.approx(math.pi / 3, abs=1e-6)

    def test_classical_bound_holds_once_degraded(self):
        # strong enough selection pushes the whole curve under the bound
        grid = np.linspace(1e-6, math.pi, 10_000)
        for spec, eps in ((SANTOS_MINUS, 0.75), (PAZ4, 0.8)):
            a_eps = selection_factor(SelectionPolicy(eps))
            assert a_eps * maximize_violation(spec, P, ZERO).delta_k_max <= spec.bound
            values = stationary_curve(spec, grid, P, SelectionPolicy(eps))
            assert np.max(values) <= spec.bound + 1e-9

    def test_search_config_validation(self):
        with pytest.raises(ValueError):
            SearchConfig(grid_points=1)
        with pytest.raises(ValueError):
            SearchConfig(tol=0.0)


class TestFullSearch:
    def test_equal_spacing_is_optimal_for_paz4(self):
        best, gaps = full_time_search(PAZ4, P)
        assert best == pytest.approx(TWO_SQRT_TWO, abs=1e-6)
        assert len(gaps) == 3

    def test_matches_stationary_for_santos(self):
        best, gaps = full_time_search(SANTOS_MINUS, P)
        assert best == pytest.approx(1.5, abs=1e-6)
        assert len(gaps) == 2

    def test_rejects_unsupported_arity(self):
        wide = InequalitySpec(5, ((1, 5, 1.0),), 1.0)
        with pytest.raises(ValueError):
            full_time_search(wide, P)


class TestThreshold:
    def test_published_thresholds(self):
        assert epsilon_threshold(SANTOS_MINUS, P) == pytest.approx(0.693, abs=1e-3)
        assert epsilon_threshold(SANTOS_PLUS, P) == pytest.approx(0.693, abs=1e-3)
        assert epsilon_threshold(PAZ4, P) == pytest.approx(0.649, abs=1e-3)

    def test_solver_is_tight(self):
        # frozen from an independent high-precision bisection of the factor
        assert epsilon_threshold(SANTOS_MINUS, P) == pytest.approx(0.6938671745151623, abs=2e-9)
        assert epsilon_threshold(PAZ4, P) == pytest.approx(0.6494865664558347, abs=2e-9)

    def test_threshold_straddles_the_violation_boundary(self):
        solve = SolveConfig()
        for spec in (SANTOS_MINUS, PAZ4):
            eps_star = epsilon_threshold(spec, P, solve)
            below = maximize_violation(spec, P, SelectionPolicy(eps_star - 10 * solve.tol))
            above = maximize_violation(spec, P, SelectionPolicy(eps_star + 10 * solve.tol))
            assert below.delta_b_max > 0.0
            assert above.delta_b_max < 0.0

    def test_degenerate_maximum_returns_zero(self):
        flat = InequalitySpec(3, ((1, 2, 1.0),), 1.0)
        assert epsilon_threshold(flat, P) == 0.0

    def test_never_violated(self):
        silent = InequalitySpec(3, ((1, 2, 0.0), (2, 3, 0.0), (1, 3, 0.0)), 1.0)
        with pytest.raises(ValueError, match="inequality never violated"):
            epsilon_threshold(silent, P)


class TestJaynesCummings:
    def test_values(self):
        assert jaynes_cummings_frequency(2.0, 0) == 2.0
        assert jaynes_cummings_frequency(2.0, 3) == pytest.approx(4.0, abs=1e-12)
        assert jaynes_cummings_frequency(2.0, 48) == pytest.approx(14.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            jaynes_cummings_frequency(0.0, 1)
        with pytest.raises(ValueError):
            jaynes_cummings_frequency(1.0, -1)
        with pytest.raises(ValueError):
            jaynes_cummings_frequency(1.0, 1.5)
