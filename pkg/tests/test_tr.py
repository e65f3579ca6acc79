"""
Topological recursion tests.
Parametrizations, correlators and free energies against the BPS closed forms.
"""

import itertools

import numpy as np
import pytest

from hypergeometric_bps.bps import random_generic_curve
from hypergeometric_bps.curves import build_parametrization, get_curve
from hypergeometric_bps.errors import OrderTooLarge, Unsupported
from hypergeometric_bps.series import free_energy
from hypergeometric_bps.tr import default_pole_depth, eo_correlator, tr_free_energy
from hypergeometric_bps.utils import relative_error

SAMPLE_POINTS = (0.3 + 0.4j, 2.0 - 1.0j, -0.7 + 0.2j, 1.5j)
PARAMETRIZED = ["HG", "dHG", "Kum", "Leg", "Bes", "Whi", "Web", "dBes", "Ai"]


class TestParametrization:
    """Rational parametrizations of the catalog curves."""

    @pytest.mark.parametrize("label", PARAMETRIZED)
    def test_curve_identity(self, label):
        if label in ("Ai", "dBes"):
            curve = get_curve(label)
        else:
            curve = random_generic_curve(label, np.random.default_rng(3))
        param = build_parametrization(curve)
        assert param.identity_residual(SAMPLE_POINTS) < 1e-10

    @pytest.mark.parametrize("label", ["HG", "dHG", "Kum", "Leg", "Bes", "Whi", "Web"])
    def test_pole_residues(self, label):
        curve = random_generic_curve(label, np.random.default_rng(5))
        param = build_parametrization(curve)
        for s in curve.poles:
            assert param.residue_y_dx(param.pole_points[f"{s}+"]) == pytest.approx(curve.mass(s))
            assert param.residue_y_dx(param.pole_points[f"{s}-"]) == pytest.approx(-curve.mass(s))

    def test_degree_three_unsupported(self):
        with pytest.raises(Unsupported):
            build_parametrization(get_curve("Deg3_14", 1))


class TestCorrelators:
    """Eynard-Orantin correlators."""

    def test_w03_is_symmetric(self):
        param = build_parametrization(get_curve("Web", 1.3))
        w03 = eo_correlator(param, 0, 3)
        points = (0.4 + 0.3j, -1.2 + 0.5j, 2.1 - 0.4j)
        reference = w03.evaluate(points)
        for perm in itertools.permutations(points):
            assert w03.evaluate(perm) == pytest.approx(reference, rel=1e-10)

    def test_w11_poles(self):
        param = build_parametrization(get_curve("Web", 1.3, 0.2))
        w11 = eo_correlator(param, 1, 1)
        assert max(w11.pole_order(r) for r in range(len(w11.points))) == 4
        for r, a in enumerate(w11.points):
            assert w11.pole_order(r) <= 4
            assert abs(w11.jet(a, length=12).residue()) < 1e-12

    @pytest.mark.parametrize("g, n", [(0, 3), (1, 1), (1, 2), (2, 1)])
    def test_odd_part_only_at_punctures(self, g, n):
        curve = random_generic_curve("Bes", np.random.default_rng(7))
        param = build_parametrization(curve)
        w = eo_correlator(param, g, n)
        fixed = SAMPLE_POINTS[: n - 1]
        for name, p in param.pole_points.items():
            total = w.jet(p, fixed, length=12) + w.jet(p, fixed, length=12, conjugate=True)
            for order in range(-6, 0):
                assert abs(total.coefficient(order)) < 1e-9, (name, order)

    def test_deeper_basis_agrees(self):
        param = build_parametrization(get_curve("Web", 1.3, 0.2))
        points = (0.4 + 0.3j, -1.2 + 0.5j)
        shallow = eo_correlator(param, 1, 2).evaluate(points)
        deep = eo_correlator(param, 1, 2, pole_depth=default_pole_depth(1, 2) + 8).evaluate(points)
        assert deep == pytest.approx(shallow, rel=1e-10)

    def test_unstable_correlator(self):
        param = build_parametrization(get_curve("Web", 1))
        with pytest.raises(ValueError):
            eo_correlator(param, 0, 2)

    def test_range(self):
        param = build_parametrization(get_curve("Web", 1))
        with pytest.raises(OrderTooLarge):
            tr_free_energy(param, 4)
        with pytest.raises(ValueError):
            tr_free_energy(param, 1)


@pytest.mark.slow
class TestFreeEnergies:
    """F_g from the recursion against the BPS sums."""

    def test_gaussian_values(self):
        param = build_parametrization(get_curve("Web", 1))
        assert tr_free_energy(param, 2) == pytest.approx(-1 / 240, rel=1e-8)
        assert tr_free_energy(param, 3) == pytest.approx(1 / 1008, rel=1e-8)

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("label", ["Web", "Bes", "Whi", "Kum"])
    def test_genus_two(self, label, seed):
        curve = random_generic_curve(label, np.random.default_rng(43 + seed))
        oracle = tr_free_energy(build_parametrization(curve), 2)
        assert relative_error(oracle, free_energy(curve, 2)) < 1e-8

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("label", ["Web", "Bes", "Whi", "Kum"])
    def test_genus_three(self, label, seed):
        curve = random_generic_curve(label, np.random.default_rng(47 + seed))
        oracle = tr_free_energy(build_parametrization(curve), 3)
        assert relative_error(oracle, free_energy(curve, 3)) < 1e-8

    def test_deeper_basis_agrees(self):
        param = build_parametrization(random_generic_curve("Kum", np.random.default_rng(11)))
        shallow = tr_free_energy(param, 2)
        deep = tr_free_energy(param, 2, pole_depth=default_pole_depth(2) + 8)
        assert deep == pytest.approx(shallow, rel=1e-10)

    def test_primitive_constant_drops_out(self):
        param = build_parametrization(get_curve("Bes", 0.8))
        assert tr_free_energy(param, 2, phi_shift=0.7 - 0.2j) == pytest.approx(
            tr_free_energy(param, 2), rel=1e-10
        )
