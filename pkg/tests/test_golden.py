"""
Unit tests for exact golden-field arithmetic.
"""

import json
from fractions import Fraction

import pytest

from fkqc.golden import (DEFAULT_THETA, ONE, SQRT5, TAU, TAU_FLOAT, ZERO, GoldenNumber,
                         golden_sign, tau_power)


class TestGoldenNumber:
    """Test cases for GoldenNumber."""

    def setup_method(self):
        """Set up test fixtures."""
        self.x = GoldenNumber(3, -2)
        self.y = GoldenNumber(Fraction(1, 2), 5)

    def test_tau_squared(self):
        """Test tau^2 = tau + 1."""
        assert TAU * TAU == TAU + 1
        assert tau_power(2) == GoldenNumber(1, 1)

    def test_tau_powers_are_fibonacci_pairs(self):
        """Test tau^n = f_{n-2} + f_{n-1} tau and negative powers invert."""
        assert tau_power(5) == GoldenNumber(3, 5)
        assert tau_power(-1) == TAU - 1
        for n in range(-10, 11):
            assert tau_power(n) * tau_power(-n) == ONE

    def test_sqrt5(self):
        """Test (2 tau - 1)^2 = 5."""
        assert SQRT5 * SQRT5 == 5

    def test_sign_without_floats(self):
        """Test sign decisions for values close to zero."""
        # F_{n+1} - F_n tau alternates in sign and shrinks like tau^-n
        assert golden_sign(89, -55) == 1
        assert golden_sign(-89, 55) == -1
        assert golden_sign(144, -89) == -1
        assert golden_sign(0, 0) == 0
        assert GoldenNumber(89, -55) > 0
        assert GoldenNumber(144, -89) < 0

    def test_ordering_against_numbers(self):
        """Test comparisons with int, Fraction and float."""
        assert TAU > 1
        assert TAU < 2
        assert TAU > Fraction(8, 5)
        assert TAU < 1.6181
        assert 1 < TAU
        assert sorted([TAU, ONE, ZERO, GoldenNumber(-1, 1)]) == [ZERO, GoldenNumber(-1, 1), ONE, TAU]

    def test_arithmetic(self):
        """Test field operations against floats."""
        for value, expected in [
            (self.x + self.y, float(self.x) + float(self.y)),
            (self.x - self.y, float(self.x) - float(self.y)),
            (self.x * self.y, float(self.x) * float(self.y)),
            (self.x / self.y, float(self.x) / float(self.y)),
        ]:
            assert float(value) == pytest.approx(expected, rel=1e-12)

    def test_division_is_exact(self):
        """Test (x / y) * y == x."""
        assert (self.x / self.y) * self.y == self.x

    def test_conjugate_and_norm(self):
        """Test x * conj(x) = norm(x)."""
        assert self.x * self.x.conjugate() == self.x.norm()
        assert TAU.conjugate() == 1 - TAU

    def test_division_by_zero(self):
        """Test that inverting zero raises."""
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()

    def test_coerce_float_is_exact(self):
        """Test that floats are converted through their exact binary value."""
        g = GoldenNumber.coerce(0.1)
        assert g.b == 0
        assert g.a == Fraction(0.1)
        with pytest.raises(ValueError):
            GoldenNumber.coerce(float("nan"))

    def test_integral(self):
        """Test the Z[tau] membership flag."""
        assert GoldenNumber(4, 2).is_integral
        assert GoldenNumber(Fraction(4, 2), 1).is_integral
        assert not DEFAULT_THETA.is_integral

    def test_default_theta(self):
        """Test (3 tau + 1) / 2 against its decimal value."""
        assert DEFAULT_THETA == (TAU * 3 + 1) / 2
        assert float(DEFAULT_THETA) == pytest.approx(2.9270509831, abs=1e-10)

    def test_hash_and_equality(self):
        """Test that equal numbers hash alike and compare with ints."""
        assert hash(GoldenNumber(2, 0)) == hash(GoldenNumber(Fraction(4, 2), 0))
        assert GoldenNumber(2, 0) == 2
        assert GoldenNumber(0, 1) != 1

    def test_to_json(self):
        """Test the coefficient-pair serialisation."""
        data = DEFAULT_THETA.to_json()
        assert data["a"] == "1/2"
        assert data["b"] == "3/2"
        assert data["approx"] == pytest.approx(float(DEFAULT_THETA))
        json.dumps(TAU.to_json())

    def test_str(self):
        """Test human-readable formatting."""
        assert str(GoldenNumber(1, -1)) == "1-1τ"
        assert str(TAU) == "1τ"
        assert str(GoldenNumber(7, 0)) == "7"

    def test_float_value(self):
        """Test float conversion of tau."""
        assert float(TAU) == TAU_FLOAT
