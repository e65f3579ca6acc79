"""
Lattice tests.
Pairing, central charge, parsing, refinements and twisted values.
"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypergeometric_bps.bps import bps_spectrum, random_generic_curve
from hypergeometric_bps.curves import get_curve
from hypergeometric_bps.errors import UnsupportedClass
from hypergeometric_bps.lattice import (
    LatticeElement,
    TwistedValue,
    basis,
    central_charge,
    make_refinement,
    nu_functional,
    pairing,
    solve_gf2,
    twisted_eval,
    xi_nu,
)

POLES = ("0", "1", "inf")


@st.composite
def elements(draw, poles=POLES):
    n = len(poles)
    cycles = draw(st.lists(st.integers(-4, 4), min_size=2 * n, max_size=2 * n))
    paths = draw(st.lists(st.integers(-4, 4), min_size=n, max_size=n))
    return LatticeElement(poles, cycles, paths)


class TestPairing:
    """Intersection pairing."""

    @pytest.mark.parametrize("s", POLES)
    def test_generators(self, s):
        assert pairing(LatticeElement.gamma(POLES, s, 1), LatticeElement.beta(POLES, s)) == -1
        assert pairing(LatticeElement.gamma(POLES, s, -1), LatticeElement.beta(POLES, s)) == 1

    def test_different_poles_do_not_pair(self):
        assert pairing(LatticeElement.gamma(POLES, "0"), LatticeElement.beta(POLES, "1")) == 0

    @given(elements(), elements())
    def test_antisymmetric(self, a, b):
        assert pairing(a, b) == -pairing(b, a)

    @given(elements(), elements(), elements())
    def test_bilinear(self, a, b, c):
        assert pairing(a + b, c) == pairing(a, c) + pairing(b, c)

    def test_relation_is_zero(self):
        relation = LatticeElement.relation(POLES)
        assert relation == LatticeElement.zero(POLES)
        assert not relation

    @given(elements())
    def test_relation_pairs_trivially(self, a):
        assert pairing(LatticeElement.relation(POLES), a) == 0

    def test_lattices_must_match(self):
        with pytest.raises(UnsupportedClass):
            pairing(LatticeElement.beta(POLES, "0"), LatticeElement.beta(("inf",), "inf"))


class TestCentralCharge:
    """Z and ν on the lattice."""

    @pytest.fixture
    def curve(self):
        return get_curve("HG", [1, 2 + 0.5j, 0.7], [0.1, -0.2, 0.3])

    @pytest.mark.parametrize("s", POLES)
    def test_generators(self, curve, s):
        for sign in (1, -1):
            gamma = LatticeElement.gamma(POLES, s, sign)
            assert central_charge(curve, gamma) == pytest.approx(sign * 2j * math.pi * curve.mass(s))
            assert nu_functional(curve, gamma) == pytest.approx(sign * curve.nu_of(s))

    def test_paths_need_extension(self, curve):
        beta = LatticeElement.beta(POLES, "0")
        with pytest.raises(UnsupportedClass):
            central_charge(curve, beta)
        assert central_charge(curve, beta, extended=True) == 0

    def test_relation_has_no_charge(self, curve):
        assert central_charge(curve, LatticeElement.relation(POLES)) == 0


class TestParse:
    """Textual lattice elements."""

    def test_cycle_shorthand(self):
        assert LatticeElement.parse(POLES, "0+") == LatticeElement.gamma(POLES, "0", 1)
        assert LatticeElement.parse(POLES, "γ1-") == LatticeElement.gamma(POLES, "1", -1)

    def test_path_shorthand(self):
        assert LatticeElement.parse(POLES, "inf") == LatticeElement.beta(POLES, "inf")
        assert LatticeElement.parse(POLES, "β∞") == LatticeElement.beta(POLES, "inf")

    def test_combination(self):
        parsed = LatticeElement.parse(POLES, "g0+, -g0-, 2*b1")
        expected = LatticeElement.loop(POLES, "0") + 2 * LatticeElement.beta(POLES, "1")
        assert parsed == expected

    @pytest.mark.parametrize("text", ["g0", "b0+", "x1", "0++", "b2"])
    def test_invalid_terms(self, text):
        with pytest.raises(UnsupportedClass):
            LatticeElement.parse(POLES, text)

    def test_label_of_parsed_element(self):
        assert LatticeElement.parse(POLES, "g0+, -g0-").label() == "γ0+ - γ0-"


class TestRefinement:
    """Quadratic refinements and twisted values."""

    @pytest.mark.parametrize("label", ["HG", "dHG", "Kum", "Leg", "Bes", "Whi", "Web"])
    def test_signs_on_active_classes(self, label):
        curve = random_generic_curve(label, np.random.default_rng(7))
        structure = bps_spectrum(curve)
        sigma = make_refinement(structure)
        for gamma, omega in structure.active:
            assert sigma(gamma) == (1 if omega == -1 else -1)
        for s in curve.poles:
            assert sigma(LatticeElement.beta(curve.poles, s)) == 1

    @given(elements(), elements())
    def test_twisted_homomorphism(self, a, b):
        """ξ(a + b) = (-1)^<a,b> ξ(a) ξ(b)."""
        rng = np.random.default_rng(3)
        xi = TwistedValue(POLES, tuple(complex(*rng.normal(size=2)) for _ in basis(POLES)))
        diff = xi.log_eval(a + b) - xi.log_eval(a) - xi.log_eval(b) - 1j * math.pi * pairing(a, b)
        assert abs(cmath.exp(diff) - 1) < 1e-9

    def test_xi_nu_on_cycles(self):
        curve = get_curve("Web", 1, 0.3)
        sigma = make_refinement(bps_spectrum(curve))
        gamma = LatticeElement.gamma(curve.poles, "inf")
        value = xi_nu(curve, sigma)(gamma)
        assert value == pytest.approx(sigma(gamma) * cmath.exp(1j * math.pi * 0.3))

    def test_twisted_eval(self):
        curve = get_curve("Bes", 1, 0.2)
        xi = xi_nu(curve, make_refinement(bps_spectrum(curve)))
        for mu in basis(curve.poles):
            assert twisted_eval(xi, mu) == xi(mu)

    def test_gf2_inconsistent(self):
        rows = [np.array([1, 0]), np.array([1, 0])]
        assert solve_gf2(rows, [0, 1], 2) is None

    def test_gf2_solution(self):
        rows = [np.array([1, 1, 0]), np.array([0, 1, 1])]
        solution = solve_gf2(rows, [1, 0], 3)
        assert solution is not None
        for row, target in zip(rows, [1, 0]):
            assert int(row @ solution) % 2 == target
