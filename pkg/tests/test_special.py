"""
Special function tests.
Bernoulli numbers and polynomials, log Γ, Λ, Barnes G and Υ.
"""

import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypergeometric_bps.errors import BranchCut, OrderTooLarge, PoleHit
from hypergeometric_bps.special import (
    ZETA_PRIME_MINUS_ONE,
    bernoulli_number,
    bernoulli_poly,
    lambda_asym,
    log_barnes_g,
    log_gamma,
    log_lambda,
    log_upsilon,
    principal_log,
    upsilon_asym,
)

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=50)


class TestBernoulli:
    """Bernoulli numbers and polynomials."""

    @pytest.mark.parametrize(
        "n, expected",
        [
            (0, Fraction(1)),
            (1, Fraction(-1, 2)),
            (2, Fraction(1, 6)),
            (3, Fraction(0)),
            (4, Fraction(-1, 30)),
            (6, Fraction(1, 42)),
            (12, Fraction(-691, 2730)),
        ],
    )
    def test_known_numbers(self, n, expected):
        assert bernoulli_number(n) == expected

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            bernoulli_number(-1)

    def test_polynomial_at_half(self):
        """B_2(1/2) = -1/12 exactly."""
        assert bernoulli_poly(2, Fraction(1, 2)) == Fraction(-1, 12)

    @given(rationals, st.integers(min_value=0, max_value=14))
    def test_reflection(self, t, k):
        """B_k(1 - t) = (-1)^k B_k(t)."""
        assert bernoulli_poly(k, 1 - t) == (-1) ** k * bernoulli_poly(k, t)

    @given(rationals, st.integers(min_value=1, max_value=14))
    def test_difference(self, t, k):
        """B_k(t + 1) - B_k(t) = k t^(k-1)."""
        assert bernoulli_poly(k, t + 1) - bernoulli_poly(k, t) == k * t ** (k - 1)

    def test_complex_argument_matches_exact(self):
        exact = bernoulli_poly(5, Fraction(1, 3))
        assert abs(bernoulli_poly(5, 1 / 3 + 0j) - float(exact)) < 1e-14

    def test_order_limit(self):
        with pytest.raises(OrderTooLarge):
            bernoulli_poly(10, 0.5, k_max=8)


class TestLogarithms:
    """log Γ and the principal logarithm."""

    @pytest.mark.parametrize("w", [0, -1, -5])
    def test_gamma_poles(self, w):
        with pytest.raises(PoleHit):
            log_gamma(w)

    def test_gamma_values(self):
        assert abs(log_gamma(5) - math.log(24)) < 1e-13
        assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-13

    def test_principal_log_cut(self):
        with pytest.raises(BranchCut):
            principal_log(-2.0)
        assert principal_log(1j) == pytest.approx(0.5j * math.pi)


class TestLambda:
    """log Λ and its asymptotic expansion."""

    @pytest.mark.parametrize("eta", [0.0, 0.3, 0.5 + 0.2j, 1.0])
    def test_matches_asymptotic_series(self, eta):
        w = 30 * cmath.exp(0.4j)
        assert abs(log_lambda(w, eta) - lambda_asym(w, eta, 10)) < 1e-10

    def test_branch_cut(self):
        with pytest.raises(BranchCut):
            log_lambda(-1.0, 0.5)

    def test_pole(self):
        with pytest.raises(PoleHit):
            log_lambda(0.5, -1.5)


class TestBarnesG:
    """Barnes G and Υ."""

    def test_zeta_derivative_constant(self):
        assert ZETA_PRIME_MINUS_ONE == pytest.approx(-0.16542114370045092, abs=1e-14)

    @pytest.mark.parametrize("n, value", [(1, 1), (2, 1), (3, 1), (4, 2), (5, 12), (6, 288)])
    def test_integer_values(self, n, value):
        assert abs(log_barnes_g(n) - math.log(value)) < 1e-11

    @given(
        st.floats(min_value=-3.5, max_value=6.0),
        st.floats(min_value=0.1, max_value=4.0),
    )
    def test_recurrence(self, x, y):
        """G(w + 1) = Γ(w) G(w)."""
        w = complex(x, y)
        diff = log_barnes_g(w + 1) - log_gamma(w) - log_barnes_g(w)
        assert abs(cmath.exp(diff) - 1) < 1e-9

    def test_zero_of_g(self):
        with pytest.raises(PoleHit):
            log_barnes_g(-2)

    @pytest.mark.parametrize("eta", [0.0, 0.25, -0.4 + 0.1j])
    def test_upsilon_asymptotics(self, eta):
        w = 25 * cmath.exp(-0.3j)
        assert abs(log_upsilon(w, eta) - upsilon_asym(w, eta, 10)) < 1e-9

    def test_upsilon_shift_by_one(self):
        """Υ(w, 1) = Υ(w, 0)."""
        w = 2.5 + 0.7j
        assert abs(cmath.exp(log_upsilon(w, 1) - log_upsilon(w, 0)) - 1) < 1e-11
