"""
WKB oracle tests.
Riccati recursion, odd forms and numerical path Voros coefficients.
"""

import numpy as np
import pytest

from hypergeometric_bps.bps import random_generic_curve
from hypergeometric_bps.curves import get_curve
from hypergeometric_bps.errors import OrderTooLarge, Unsupported
from hypergeometric_bps.lattice import LatticeElement
from hypergeometric_bps.series import voros_path_coeff
from hypergeometric_bps.utils import relative_error
from hypergeometric_bps.wkb import (
    odd_form_residues,
    path_integrals,
    path_voros_numeric,
    riccati_odd_forms,
    riccati_system,
)


class TestRiccati:
    """The Riccati recursion of the quantum curves."""

    @pytest.mark.parametrize("label", ["HG", "Web", "Bes"])
    def test_truncation_order(self, label):
        """The residual of the truncated series is O(ħ^(order + 2))."""
        curve = random_generic_curve(label, np.random.default_rng(61))
        system = riccati_system(curve, 2)
        z = 0.4 + 0.9j
        big = abs(system.riccati_residual(z, 1e-2))
        small = abs(system.riccati_residual(z, 5e-3))
        assert big / small > 10

    def test_leading_form_residue(self):
        curve = get_curve("Web", 1.4, 0.2)
        system = riccati_system(curve, 3)
        residues = odd_form_residues(system, system.param.pole_points["inf+"])
        assert residues[0] == pytest.approx(1.4, rel=1e-8)
        assert residues[1] == pytest.approx(-0.1, rel=1e-8)
        assert np.all(np.abs(residues[2:]) < 1e-8)

    @pytest.mark.parametrize("label", ["HG", "Web", "Bes"])
    def test_residues_at_pole_points(self, label):
        curve = random_generic_curve(label, np.random.default_rng(73))
        system = riccati_system(curve, 4)
        for s in curve.poles:
            for sign in (1, -1):
                point = system.param.pole_points[f"{s}{'+' if sign > 0 else '-'}"]
                residues = odd_form_residues(system, point)
                assert residues[0] == pytest.approx(sign * curve.mass(s), rel=1e-8)
                assert residues[1] == pytest.approx(-sign * curve.nu_of(s) / 2, rel=1e-8, abs=1e-10)
                assert np.all(np.abs(residues[2:]) < 1e-8), (s, sign)

    def test_split_drops_out(self):
        curve = random_generic_curve("HG", np.random.default_rng(79))
        default = riccati_system(curve, 4)
        split = riccati_system(curve, 4, split={"0": 0.2, "1": 0.5 + 0.1j, "inf": -0.4})
        for z in (0.4 + 0.9j, -1.3 + 0.2j, 2.2 - 0.7j):
            expected = default.odd_values(z)
            assert np.allclose(split.odd_values(z), expected, rtol=1e-9, atol=1e-12)

    def test_odd_forms(self):
        forms = riccati_odd_forms(get_curve("Bes", 1.1), 3)
        assert [form.k for form in forms] == [-1, 0, 1, 2, 3]

    def test_order_limit(self):
        with pytest.raises(OrderTooLarge):
            riccati_system(get_curve("Web", 1), 13)

    def test_unsupported_curve(self):
        with pytest.raises(Unsupported):
            riccati_system(get_curve("Kum", [1, 0.4]), 2)

    def test_order_zero_rejected(self):
        with pytest.raises(ValueError):
            path_voros_numeric(get_curve("Web", 1), "inf", 0)


@pytest.mark.slow
class TestPathIntegrals:
    """Numerical path Voros coefficients against the BPS sums."""

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("label", ["Web", "Bes"])
    def test_single_pole(self, label, seed):
        curve = random_generic_curve(label, np.random.default_rng(67 + seed))
        system = riccati_system(curve, 8)
        (s,) = curve.poles
        integrals = path_integrals(system, s)
        beta = LatticeElement.beta(curve.poles, s)
        for k in range(1, 9):
            assert relative_error(integrals[k - 1], voros_path_coeff(curve, beta, k)) < 1e-7, k

    @pytest.mark.parametrize("seed", range(5))
    def test_gauss(self, seed):
        curve = random_generic_curve("HG", np.random.default_rng(71 + seed))
        system = riccati_system(curve, 8)
        for s in curve.poles:
            integrals = path_integrals(system, s)
            beta = LatticeElement.beta(curve.poles, s)
            for k in range(1, 9):
                expected = voros_path_coeff(curve, beta, k)
                assert relative_error(integrals[k - 1], expected) < 1e-7, (s, k)

    def test_path_class(self):
        curve = random_generic_curve("HG", np.random.default_rng(71))
        beta = LatticeElement.beta(curve.poles, "0") + LatticeElement.beta(curve.poles, "1")
        value = path_voros_numeric(curve, beta, 2)
        assert relative_error(value, voros_path_coeff(curve, beta, 2)) < 1e-7

    def test_detour_side(self):
        curve = get_curve("Web", 1.2, 0.1)
        assert path_voros_numeric(curve, "inf", 2, side=1) == pytest.approx(
            path_voros_numeric(curve, "inf", 2, side=-1), rel=1e-8
        )
