"""
Formal series tests.
Voros coefficients from BPS data, the per-curve closed forms, free energies
and the Weber difference equation.
"""

import math

import numpy as np
import pytest

from hypergeometric_bps.bps import bps_spectrum, random_generic_curve
from hypergeometric_bps.curves import get_curve
from hypergeometric_bps.errors import OrderTooLarge, Unsupported, UnsupportedClass
from hypergeometric_bps.lattice import LatticeElement
from hypergeometric_bps.series import (
    FormalSeries,
    closed_form_path_coeff,
    free_energy,
    generic_half_plane,
    tr_free_energy_sum,
    voros_cycle,
    voros_path_coeff,
    voros_path_series,
    voros_potential_coeff,
    voros_symbol_series,
    weber_difference_oracle,
)
from hypergeometric_bps.utils import relative_error

CLOSED_FORM_LABELS = ["HG", "dHG", "Kum", "Leg", "Bes", "Whi", "Web"]


def beta(curve, s):
    return LatticeElement.beta(curve.poles, s)


class TestFormalSeries:
    """Arithmetic of truncated series."""

    def test_product(self):
        a = FormalSeries(0, (1, 1, 0))
        b = FormalSeries(0, (1, -1, 0))
        assert (a * b).coeffs == (1, 0, -1)

    def test_exp(self):
        a = 0.7 - 0.2j
        series = FormalSeries(1, (a, 0, 0, 0)).exp()
        for k in range(5):
            assert series[k] == pytest.approx(a**k / math.factorial(k))

    def test_derivative(self):
        d = FormalSeries(1, (1, 2, 3)).derivative()
        assert d.k_min == 0
        assert d.coeffs == (1, 4, 9)

    def test_evaluation_and_orders(self):
        series = FormalSeries(-1, (2, 0, 3))
        assert list(series.orders()) == [-1, 0, 1]
        assert series(0.5) == pytest.approx(4 + 1.5)

    def test_order_limit(self):
        with pytest.raises(OrderTooLarge):
            FormalSeries(1, (1, 2)).coefficient(3)


class TestVorosCoefficients:
    """Voros coefficients from BPS data."""

    def test_weber_first_order(self):
        curve = get_curve("Web", 1)
        assert voros_path_coeff(curve, beta(curve, "inf"), 1) == pytest.approx(-1 / 24)

    def test_bessel_first_order(self):
        curve = get_curve("Bes", 1)
        assert voros_path_coeff(curve, beta(curve, "0"), 1) == pytest.approx(-1 / 12)

    def test_cycle_series(self):
        curve = get_curve("Web", 2, 0.5)
        series = voros_cycle(curve, LatticeElement.gamma(curve.poles, "inf"))
        assert series.k_min == -1
        assert series[-1] == pytest.approx(4j * math.pi)
        assert series[0] == pytest.approx(-0.5j * math.pi)

    def test_half_plane_independence(self):
        """Flipping the half-plane flips γ to −γ and leaves V_β unchanged."""
        curve = random_generic_curve("Kum", np.random.default_rng(5))
        structure = bps_spectrum(curve)
        theta = generic_half_plane(structure)
        b = beta(curve, "0")
        for k in range(1, 7):
            assert voros_path_coeff(curve, b, k, theta) == pytest.approx(
                voros_path_coeff(curve, b, k, theta + math.pi), rel=1e-12, abs=1e-14
            )

    def test_series_and_symbol(self):
        curve = get_curve("Whi", 1.2, 0.1)
        series = voros_path_series(curve, beta(curve, "inf"), 5)
        assert series.order == 5
        symbol = voros_symbol_series(curve, beta(curve, "inf"), 5)
        assert symbol[0] == pytest.approx(1)
        assert symbol[1] == pytest.approx(series[1])

    def test_linear_in_beta(self):
        curve = random_generic_curve("HG", np.random.default_rng(9))
        combined = beta(curve, "0") + 2 * beta(curve, "inf")
        for k in (1, 4):
            expected = voros_path_coeff(curve, beta(curve, "0"), k) + 2 * voros_path_coeff(
                curve, beta(curve, "inf"), k
            )
            assert voros_path_coeff(curve, combined, k) == pytest.approx(expected)

    def test_cycles_rejected(self):
        curve = get_curve("Web", 1)
        with pytest.raises(UnsupportedClass):
            voros_path_coeff(curve, LatticeElement.gamma(curve.poles, "inf"), 1)

    @pytest.mark.parametrize("label", ["Ai", "dBes"])
    def test_curves_without_voros_theory(self, label):
        curve = get_curve(label)
        with pytest.raises(Unsupported):
            voros_path_coeff(curve, LatticeElement.zero(()), 1)

    def test_degree_three(self):
        curve = get_curve("Deg3_23", 1.5)
        assert voros_path_coeff(curve, beta(curve, "inf"), 3) == 0


class TestClosedForms:
    """BPS sums against the per-curve Bernoulli formulas."""

    @pytest.mark.parametrize("label", CLOSED_FORM_LABELS)
    def test_random_draws(self, label):
        rng = np.random.default_rng(2024)
        for _ in range(20):
            curve = random_generic_curve(label, rng)
            for s in curve.poles:
                for k in range(1, 13):
                    value = voros_path_coeff(curve, beta(curve, s), k)
                    expected = closed_form_path_coeff(curve, s, k)
                    assert relative_error(value, expected) < 1e-10, (curve, s, k)

    @pytest.mark.parametrize(
        "s, permutation", [("1", (1, 0, 2)), ("inf", (2, 1, 0))]
    )
    def test_gauss_permutation_symmetry(self, s, permutation):
        rng = np.random.default_rng(17)
        for _ in range(5):
            curve = random_generic_curve("HG", rng)
            swapped = get_curve(
                "HG",
                [curve.masses[i] for i in permutation],
                [curve.nus[i] for i in permutation],
            )
            for k in range(1, 9):
                assert closed_form_path_coeff(curve, s, k) == pytest.approx(
                    closed_form_path_coeff(swapped, "0", k), rel=1e-10
                )
                assert voros_path_coeff(curve, beta(curve, s), k) == pytest.approx(
                    voros_path_coeff(swapped, beta(swapped, "0"), k), rel=1e-10
                )

    def test_degenerate_gauss_symmetry(self):
        rng = np.random.default_rng(23)
        curve = random_generic_curve("dHG", rng)
        swapped = get_curve("dHG", curve.masses[::-1], curve.nus[::-1])
        for k in range(1, 9):
            assert closed_form_path_coeff(curve, "inf", k) == pytest.approx(
                closed_form_path_coeff(swapped, "1", k), rel=1e-10
            )

    def test_errors(self):
        curve = get_curve("Web", 1)
        with pytest.raises(UnsupportedClass):
            closed_form_path_coeff(curve, "0", 1)
        with pytest.raises(ValueError):
            closed_form_path_coeff(curve, "inf", 0)
        with pytest.raises(OrderTooLarge):
            closed_form_path_coeff(curve, "inf", 10, k_max=8)
        with pytest.raises(Unsupported):
            closed_form_path_coeff(get_curve("Deg3_14", 1), "inf", 1)


class TestVorosPotential:
    """∂φ_k/∂m_s = V_{β_s,k}."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_mass_derivative(self, k):
        curve = random_generic_curve("Kum", np.random.default_rng(31))
        theta = generic_half_plane(bps_spectrum(curve))
        step = 1e-6
        for i, s in enumerate(curve.poles):
            shifted = []
            for delta in (step, -step):
                masses = list(curve.masses)
                masses[i] += delta
                shifted.append(voros_potential_coeff(curve.with_masses(masses), k, theta))
            derivative = (shifted[0] - shifted[1]) / (2 * step)
            expected = voros_path_coeff(curve, beta(curve, s), k, theta)
            assert relative_error(derivative, expected) < 1e-6


class TestFreeEnergies:
    """F_g from BPS data."""

    def test_weber_values(self):
        curve = get_curve("Web", 1)
        assert free_energy(curve, 2) == pytest.approx(-1 / 240)
        assert free_energy(curve, 3) == pytest.approx(1 / 1008)

    def test_weber_mass_scaling(self):
        assert free_energy(get_curve("Web", 2), 2) == pytest.approx(-1 / 960)

    def test_genus_one_needs_hbar(self):
        with pytest.raises(ValueError):
            free_energy(get_curve("Web", 1), 1)

    def test_partial_sum(self):
        curve = get_curve("Bes", 1.3)
        hbar = 0.1 + 0.02j
        expected = free_energy(curve, 1, None, hbar) + hbar**2 * free_energy(curve, 2)
        assert tr_free_energy_sum(curve, None, hbar, 2) == pytest.approx(expected)

    def test_empty_spectrum(self):
        assert free_energy(get_curve("Ai"), 2) == 0


class TestDifferenceEquation:
    """Weber Voros coefficients as a difference of free energies."""

    def test_against_bps_sum(self):
        rng = np.random.default_rng(41)
        for _ in range(5):
            curve = random_generic_curve("Web", rng)
            m, nu = curve.mass("inf"), curve.nu_of("inf")
            for k in range(1, 11):
                value = voros_path_coeff(curve, beta(curve, "inf"), k)
                assert relative_error(weber_difference_oracle(k, m, nu), value) < 1e-10

    def test_order_zero_rejected(self):
        with pytest.raises(ValueError):
            weber_difference_oracle(0, 1, 0)
