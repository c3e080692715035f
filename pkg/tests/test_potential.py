"""
Unit tests for the bump and the substrate potential.
"""

from fractions import Fraction

import numpy as np
import pytest

from fkqc import chain
from fkqc.golden import TAU, ZERO, GoldenNumber
from fkqc.models import PotentialSpec
from fkqc.potential import (CORE, EDGE, V, V_array, V_prime, V_prime_array, V_second,
                            check_equivariance, equivariance_sweep, matched_pair,
                            min_lambda_nonminimal, nearest_point, offset, zeta, zeta_array,
                            zeta_prime, zeta_prime_array, zeta_second, zeta_second_at_zero)


class TestZeta:
    """Test cases for the bump zeta."""

    def test_values(self):
        """Test zeta at the centre, the seam and the edge."""
        assert zeta(0.0) == pytest.approx(160.0 / 27.0)
        assert zeta(0.25) == pytest.approx(52.0 / 27.0)
        assert zeta(1.0 / 3.0) == 0.0
        assert zeta(0.5) == 0.0
        assert zeta(-0.1) == zeta(0.1)

    def test_continuity(self):
        """Test that zeta and zeta' agree across both seams."""
        eps = 1e-9
        for t in (CORE, EDGE, -CORE, -EDGE):
            assert zeta(t - eps) == pytest.approx(zeta(t + eps), abs=1e-6)
            assert zeta_prime(t - eps) == pytest.approx(zeta_prime(t + eps), abs=1e-5)

    def test_derivative_by_finite_differences(self):
        """Test zeta' against central differences away from the seams."""
        h = 1e-6
        for t in (-0.3, -0.2, -0.05, 0.05, 0.2, 0.3, 0.4):
            fd = (zeta(t + h) - zeta(t - h)) / (2 * h)
            assert zeta_prime(t) == pytest.approx(fd, abs=1e-5)

    def test_second_derivative(self):
        """Test zeta'' on the cap, the flank and at the edge."""
        assert zeta_second(0.1).value == -128.0
        assert zeta_second_at_zero() == -128.0
        assert zeta_second(0.25).value == -128.0
        flank = zeta_second(0.3)
        assert flank.value == pytest.approx(64.0 / 27.0 * (5184.0 * 0.3 - 1350.0))
        edge = zeta_second(EDGE)
        assert edge.one_sided
        assert edge.value == pytest.approx(896.0)
        assert edge.outer == 0.0
        assert zeta_second(0.5).value == 0.0

    def test_vectorised_forms(self):
        """Test zeta_array and zeta_prime_array against the scalar versions."""
        xs = np.linspace(-0.5, 0.5, 101)
        assert np.allclose(zeta_array(xs), [zeta(x) for x in xs])
        assert np.allclose(zeta_prime_array(xs), [zeta_prime(x) for x in xs])

    def test_nonminimal_threshold(self):
        """Test -4 / zeta''(0) = 1/32."""
        assert min_lambda_nonminimal() == 1.0 / 32.0


class TestPotential:
    """Test cases for V(x) = lam * zeta(x - nearest chain point)."""

    def setup_method(self):
        """Set up test fixtures."""
        self.spec = PotentialSpec(lam=2.0)

    def test_maxima_on_chain(self):
        """Test V(S_i) = lam * zeta(0)."""
        for i in range(-50, 51):
            assert V(chain.point(i), self.spec) == 2.0 * 160.0 / 27.0

    def test_nearest_point_ties_to_alpha(self):
        """Test that the midpoint of a gap resolves to the left neighbour."""
        assert nearest_point(TAU / 2) == ZERO
        assert nearest_point(TAU / 2 + Fraction(1, 1000)) == TAU

    def test_offset_is_exact(self):
        """Test offsets far from the origin keep full precision."""
        x = chain.point(100000) + Fraction(1, 10)
        assert offset(x) == pytest.approx(0.1, abs=1e-15)

    def test_zero_between_bumps(self):
        """Test that V vanishes in the middle of every gap."""
        for i in range(-30, 30):
            a, b = chain.point(i), chain.point(i + 1)
            assert V((a + b) / 2) == 0.0

    def test_no_substrate(self):
        """Test the free chain."""
        spec = PotentialSpec(substrate=False)
        assert V(0, spec) == 0.0
        assert V_prime(0.1, spec) == 0.0
        assert V_second(0.1, spec).value == 0.0

    def test_derivative(self):
        """Test V' against finite differences."""
        h = 1e-6
        for x in (0.1, -0.2, 3.0, 5.3):
            fd = (V(x + h, self.spec) - V(x - h, self.spec)) / (2 * h)
            assert V_prime(x, self.spec) == pytest.approx(fd, abs=1e-4)

    def test_curvature_scales(self):
        """Test V'' = lam * zeta''."""
        assert V_second(0.05, self.spec).value == -256.0

    def test_arrays_match_scalars(self):
        """Test V_array and V_prime_array against exact evaluation."""
        xs = np.linspace(-40.0, 40.0, 997)
        assert np.allclose(V_array(xs, self.spec), [V(float(x), self.spec) for x in xs], atol=1e-9)
        assert np.allclose(V_prime_array(xs, self.spec),
                           [V_prime(float(x), self.spec) for x in xs], atol=1e-7)

    def test_custom_evaluator(self):
        """Test that an injected alpha/beta evaluator is used."""
        spec = PotentialSpec(evaluator=lambda x: (GoldenNumber(0), GoldenNumber(10)))
        assert V(0.1, spec) == pytest.approx(zeta(0.1))
        assert V(9.9, spec) == pytest.approx(zeta(-0.1))

    def test_invalid_lambda(self):
        """Test that non-positive lambda is rejected."""
        with pytest.raises(ValueError):
            PotentialSpec(lam=0.0)


class TestEquivariance:
    """Test cases for pattern-equivariance of V."""

    def test_matched_pair_has_equal_patch(self):
        """Test that the patch search returns a translate with the same radius-1 patch."""
        rng = np.random.default_rng(3)
        x = GoldenNumber(12, 7) + Fraction(1, 7)
        y = matched_pair(x, rng=rng)
        assert y is not None and y != x
        assert chain.local_patch(x, 1).matches(chain.local_patch(y, 1))
        assert check_equivariance(x, y)

    def test_sweep(self):
        """Test exact equality of V over many matched pairs."""
        equal, tried = equivariance_sweep(300, seed=11)
        assert tried == 300
        assert equal == tried
