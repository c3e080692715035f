"""
Unit tests for energies, residuals and minimality checks.
"""

import numpy as np
import pytest

from fkqc.energy import (brute_force_segment_check, equilibrium_residual, find_improvable_site,
                         pair_energy, residuals, rotation_number_estimate, rotation_report,
                         segment_energy, segment_minimum, single_site_improvement, type_distance)
from fkqc.errors import PreconditionError, ValidationError, WindowError
from fkqc.golden import DEFAULT_THETA
from fkqc.models import AILParams, AnchorFn, Configuration, PotentialSpec
from fkqc.potential import V, nearest_point
from fkqc.solver import solve_fixed_point

THETA = float(DEFAULT_THETA)


class TestSegmentEnergy:
    """Test cases for pair and segment energies."""

    def setup_method(self):
        """Set up test fixtures."""
        self.free = PotentialSpec(substrate=False)
        self.config = Configuration(np.array([0.0, 1.0, 3.0, 6.0]), -1)

    def test_pair_energy(self):
        """Test H(xi, eta) = (xi - eta)^2 / 2 + V(xi)."""
        assert pair_energy(0.0, 2.0, self.free) == 2.0
        assert pair_energy(0.0, 2.0) == pytest.approx(2.0 + 160.0 / 27.0)

    def test_segment_energy(self):
        """Test the sum of pair energies over a segment."""
        assert segment_energy(self.config, -1, 2, self.free) == pytest.approx(0.5 + 2.0 + 4.5)
        expected = sum(pair_energy(a, b) for a, b in [(0.0, 1.0), (1.0, 3.0)])
        assert segment_energy(self.config, -1, 1) == pytest.approx(expected)

    def test_segment_bounds(self):
        """Test segment validation."""
        with pytest.raises(ValidationError):
            segment_energy(self.config, 1, 1)
        with pytest.raises(WindowError):
            segment_energy(self.config, -2, 1)

    def test_residuals_of_free_chain(self):
        """Test that equally spaced atoms of the free chain are in equilibrium."""
        config = Configuration(np.arange(10) * 2.5, 0)
        assert np.allclose(residuals(config, self.free), 0.0)
        assert equilibrium_residual(config, self.free, edge=2) == pytest.approx(0.0)

    def test_residual_needs_three_sites(self):
        """Test the minimum window size."""
        with pytest.raises(ValidationError):
            residuals(Configuration(np.array([0.0, 1.0])))


class TestRotationNumber:
    """Test cases for rotation-number estimates."""

    def test_linear_configuration(self):
        """Test an exactly linear configuration."""
        n = 50
        idx = np.arange(-n, n + 1)
        config = Configuration(THETA * idx, -n, {"anchor": AnchorFn.linear()})
        est = rotation_number_estimate(config)
        assert est.estimate == pytest.approx(THETA)
        assert est.error_bound == pytest.approx(0.0, abs=1e-12)

    def test_no_anchor_has_no_bound(self):
        """Test that the bound is omitted without an anchor."""
        config = Configuration(np.arange(-20, 21) * 2.0, -20)
        est = rotation_number_estimate(config)
        assert est.estimate == 2.0
        assert est.error_bound is None
        assert rotation_report(config).no_rotation_number is None

    def test_signed_square_has_no_rotation_number(self):
        """Test the flag on a configuration of type h(i) = i|i|."""
        n = 100
        h = AnchorFn.signed_square()
        config = Configuration(h.values(range(-n, n + 1)), -n, {"anchor": h})
        report = rotation_report(config)
        assert report.no_rotation_number is True
        assert report.full.estimate == pytest.approx(100.0)
        assert report.half.estimate == pytest.approx(50.0)

    def test_linear_has_rotation_number(self):
        """Test the flag on a linear configuration."""
        n = 40
        config = Configuration(THETA * np.arange(-n, n + 1) + 0.1, -n,
                               {"anchor": AnchorFn.linear()})
        report = rotation_report(config)
        assert report.no_rotation_number is False
        assert report.left_slope == pytest.approx(THETA)
        assert report.right_slope == pytest.approx(THETA)
        assert report.to_json()["estimate"] == pytest.approx(THETA)

    def test_symmetric_window_required(self):
        """Test that estimates need [-n, n] with n >= 10."""
        with pytest.raises(ValidationError):
            rotation_number_estimate(Configuration(np.arange(30.0), 0))
        with pytest.raises(ValidationError):
            rotation_number_estimate(Configuration(np.arange(-5.0, 6.0), -5))

    def test_type_distance(self):
        """Test sup |x_i - h(i)|."""
        h = AnchorFn.linear()
        config = Configuration(h.values(range(-3, 4)) + np.array([0, 0, 0.3, 0, -0.5, 0, 0]), -3)
        assert type_distance(config, h) == pytest.approx(0.5)


class TestNonMinimality:
    """Test cases for the single-site improvement."""

    def setup_method(self):
        """Set up an anti-integrable equilibrium."""
        self.result = solve_fixed_point(AILParams(lam=1.0, n=60))
        self.config = self.result.configuration

    def test_improvable_site_exists(self):
        """Test that the equilibrium admits a strict single-site decrease."""
        found = find_improvable_site(self.config, edge=2)
        assert found is not None
        i, imp = found
        assert imp.decrease > 1e-10
        moved = self.config.with_position(i, imp.position)
        direct = segment_energy(self.config, i - 1, i + 1) - segment_energy(moved, i - 1, i + 1)
        assert direct == pytest.approx(imp.decrease, abs=1e-12)

    def test_candidate_cases(self):
        """Test that the new position is u-bar or g +- 1/3."""
        found = find_improvable_site(self.config, edge=2)
        i, imp = found
        g = float(nearest_point(self.config.at(i)))
        ubar = 0.5 * (self.config.at(i - 1) + self.config.at(i + 1))
        assert min(abs(imp.position - ubar), abs(abs(imp.position - g) - 1.0 / 3.0)) < 1e-12

    def test_brute_force_rejects_equilibrium(self):
        """Test that a grid competitor beats the segment around an improvable site."""
        i, _ = find_improvable_site(self.config, edge=2)
        assert not brute_force_segment_check(self.config, i - 1, i + 1)

    def test_hand_worked_site(self):
        """Test x = (-0.6, 0.01, 0.7) around the chain point 0: move to u-bar = 0.05."""
        config = Configuration(np.array([-0.6, 0.01, 0.7]), -1)
        assert float(nearest_point(0.01)) == 0.0
        imp = single_site_improvement(config, 0)
        assert imp is not None
        assert imp.position == pytest.approx(0.05, abs=1e-15)
        # springs 0.4241 -> 0.4225, cap 64 * (0.05^2 - 0.01^2)
        assert imp.decrease == pytest.approx(0.0016 + 0.1536, abs=1e-12)

    def test_precondition(self):
        """Test that a site off the quadratic cap is rejected."""
        x = self.config.with_position(0, self.config.at(0) + 0.3)
        with pytest.raises(PreconditionError):
            single_site_improvement(x, 0)

    def test_interior_only(self):
        """Test that the window ends are not candidates."""
        with pytest.raises(ValidationError):
            single_site_improvement(self.config, self.config.i_min)


class TestSegmentMinimum:
    """Test cases for the brute-force segment search."""

    def setup_method(self):
        """Set up test fixtures."""
        self.free = PotentialSpec(substrate=False)

    def test_free_chain_competitor(self):
        """Test the grid minimum of a three-site free segment."""
        config = Configuration(np.array([0.0, 2.5, 2.0]))
        result = segment_minimum(config, 0, 2, spec=self.free, refine_step=0)
        # interior site restricted to 2.5 +- 1, optimum at 1.5
        assert result.positions[0] == pytest.approx(1.5)
        assert result.energy == pytest.approx(1.25)
        assert result.current == pytest.approx(3.125 + 0.125)
        assert not brute_force_segment_check(config, 0, 2, spec=self.free)

    def test_minimal_segment_passes(self):
        """Test that a free-chain minimiser passes the check."""
        config = Configuration(np.array([0.0, 1.0, 2.0, 3.0, 4.0]))
        assert brute_force_segment_check(config, 0, 4, spec=self.free)

    def test_segment_length_limits(self):
        """Test that only 1 <= k - j <= 4 is accepted."""
        config = Configuration(np.arange(8.0))
        with pytest.raises(ValidationError):
            segment_minimum(config, 0, 0)
        with pytest.raises(ValidationError):
            segment_minimum(config, 0, 5)

    def test_adjacent_endpoints(self):
        """Test that a segment without interior sites returns its pair energy."""
        config = Configuration(np.array([0.0, 1.2, 2.9]))
        result = segment_minimum(config, 1, 2)
        assert result.positions.size == 0
        assert result.energy == pytest.approx(0.5 * 1.7 ** 2 + V(1.2), abs=1e-12)
        assert result.improvement == 0.0
        assert brute_force_segment_check(config, 1, 2)

    def test_energy_matches_direct_sum(self):
        """Test the reported competitor energy against a direct evaluation."""
        config = Configuration(np.array([0.0, 1.2, 2.9, 4.1]))
        result = segment_minimum(config, 0, 3)
        xs = np.concatenate(([0.0], result.positions, [4.1]))
        direct = sum(0.5 * (a - b) ** 2 + V(float(a)) for a, b in zip(xs[:-1], xs[1:]))
        assert result.energy == pytest.approx(direct, abs=1e-9)
        assert result.energy <= result.current + 1e-12

