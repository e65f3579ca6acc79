"""
Eynard-Orantin topological recursion on the rational parametrizations.

Correlators are stored as coefficient tensors on the polar basis
dz/(z − a)^d, with a a ramification point and 2 <= d <= D. Every residue is
taken on truncated Laurent jets in t = z − a, so the recursion never needs
multivariate rational functions:

    W_{g,n+1}(z0, J) = Σ_a Res_{z→a} K(z0, z) [W_{g−1,n+2}(z, σz, J)
                        + Σ' W_{g1,1+|I1|}(z, I1) W_{g2,1+|I2|}(σz, I2)]

    K(z0, z) = (1/(z0 − z) − 1/(z0 − σz)) dz0 / (2 (y(z) − y(σz)) dx(z))

Expanding 1/(z0 − z) in t turns the z0-dependence into the polar basis at a.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import TypeVar

from .curves import Parametrization
from .errors import OrderTooLarge, TruncationInsufficient
from .jets import Jet, RationalFunction

log = logging.getLogger(__name__)

MAX_GENUS = 3
MAX_POINTS = 3
MAX_RETRIES = 3
# Coefficients below this fraction of the largest one are cancellation noise.
_DROP_TOL = 1e-13
_EDGE_TOL = 1e-8

BasisIndex = tuple[int, int]
Key = tuple[BasisIndex, ...]
T = TypeVar("T")


def default_pole_depth(g: int, n: int = 1) -> int:
    """Polar degree D of the basis; W_{g,n} has poles of order at most 6g + 2n − 4."""
    return max(6 * g + 2 * n - 2, 4)


@dataclass(frozen=True)
class Correlator:
    """
    W_{g,n} as a coefficient tensor on the polar basis.

    ``coefficients`` maps ((r_1, d_1), ..., (r_n, d_n)) to the coefficient of
    Π dz_i/(z_i − a_{r_i})^{d_i}, where a_r are the ramification points.
    """

    g: int
    n: int
    points: tuple[complex, ...]
    coefficients: Mapping[Key, complex]
    conjugation: RationalFunction = field(repr=False)

    def evaluate(self, zs: Sequence[complex]) -> complex:
        """Coefficient of dz_1 ... dz_n at the given points."""
        if len(zs) != self.n:
            raise ValueError(f"W_{{{self.g},{self.n}}} takes {self.n} points, got {len(zs)}")
        total = 0j
        for key, c in self.coefficients.items():
            term = c
            for (r, d), z in zip(key, zs, strict=True):
                term /= (complex(z) - self.points[r]) ** d
            total += term
        return total

    def pole_order(self, r: int) -> int:
        """Largest polar degree at the r-th ramification point in the first variable."""
        return max((key[0][1] for key in self.coefficients if key[0][0] == r), default=0)

    def jet(
        self,
        point: complex,
        fixed: Sequence[complex] = (),
        length: int = 16,
        conjugate: bool = False,
    ) -> Jet:
        """
        Jet of W_{g,n}(z, fixed...) in the first variable at a point.

        The local coordinate is t = z − point, or t = 1/z when point is ∞. With
        ``conjugate`` the first variable is replaced by its image under the
        covering involution, giving the jet of the pulled-back form.
        """
        if len(fixed) != self.n - 1:
            raise ValueError(f"pass {self.n - 1} fixed points, got {len(fixed)}")
        z = Parametrization.chart(point, length)
        if conjugate:
            z = self.conjugation.on_jet(z)
        dz = z.derivative()
        total: Jet | None = None
        for key, c in self.coefficients.items():
            weight = c
            for (r, d), w in zip(key[1:], fixed, strict=True):
                weight /= (complex(w) - self.points[r]) ** d
            r, d = key[0]
            term = ((z - self.points[r]).stripped() ** (-d)) * dz * weight
            total = term if total is None else total + term
        if total is None:
            return Jet.constant(0j, length)
        return total

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "points": list(self.points),
            "terms": [
                {"basis": [list(b) for b in key], "coefficient": c}
                for key, c in sorted(self.coefficients.items())
            ],
        }


@dataclass
class _Local:
    """Jets in t = z − a at one ramification point a."""

    index: int
    basis: dict[BasisIndex, Jet]
    basis_conj: dict[BasisIndex, Jet]
    bergman: dict[int, Jet]
    bergman_conj: dict[int, Jet]
    bergman_diag: Jet
    kernels: list[Jet]
    phi: Jet
    _pairs: dict[tuple[BasisIndex, BasisIndex], Jet] = field(default_factory=dict)

    def pair(self, first: BasisIndex, second: BasisIndex) -> Jet:
        """Jet of e_first(z) e_second(σz) σ'(z)."""
        jet = self._pairs.get((first, second))
        if jet is None:
            jet = self.basis[first] * self.basis_conj[second]
            self._pairs[(first, second)] = jet
        return jet


class TopologicalRecursion:
    """
    One recursion session on a parametrized curve.

    Correlators are memoized per (g, n) inside the session; sessions share no
    state, so they can run in parallel.

    Args:
        param: Parametrization of the curve
        pole_depth: Largest polar degree D of the basis
        jet_length: Length of the local jets (default 2D + 10)
    """

    def __init__(self, param: Parametrization, pole_depth: int, jet_length: int | None = None):
        self.param = param
        self.points = tuple(complex(a) for a in param.ramification_points)
        self.pole_depth = pole_depth
        self.jet_length = jet_length or 2 * pole_depth + 10
        self._correlators: dict[tuple[int, int], Correlator] = {}
        self._first: dict[tuple[int, int, int, bool], dict[Key, Jet]] = {}

    @cached_property
    def locals(self) -> list[_Local]:
        return [self._build_local(r, a) for r, a in enumerate(self.points)]

    def _build_local(self, r: int, a: complex) -> _Local:
        n_len, depth = self.jet_length, self.pole_depth
        z = Jet.variable(a, n_len)
        t = Jet.monomial(1, n_len)
        sigma = self.param.conjugation
        sz = sigma.on_jet(z)
        s = (sz - a).with_valuation(1)
        dsz = sz.derivative()

        basis: dict[BasisIndex, Jet] = {}
        basis_conj: dict[BasisIndex, Jet] = {}
        for b, p in enumerate(self.points):
            if b == r:
                near, near_conj = Jet.monomial(-1, n_len), s.inverse()
            else:
                near, near_conj = (z - p).inverse(), (sz - p).inverse()
            for d in range(2, depth + 1):
                basis[(b, d)] = near**d
                basis_conj[(b, d)] = (near_conj**d) * dsz

        bergman = {d: Jet.monomial(d - 2, n_len, d - 1) for d in range(2, depth + 1)}
        bergman_conj = {d: (s ** (d - 2)) * dsz * (d - 1) for d in range(2, depth + 1)}
        bergman_diag = ((t - s).with_valuation(1) ** (-2)) * dsz

        # y is odd under the involution for every catalog curve, so
        # (y(z) − y(σz)) dx(z) = 2 y dx(z).
        y_dx = (self.param.y * self.param.dx).laurent(a, n_len)
        denominator = (4 * y_dx).inverse()
        kernels = [((t**j) - (s**j)) * denominator for j in range(1, depth)]
        return _Local(
            index=r,
            basis=basis,
            basis_conj=basis_conj,
            bergman=bergman,
            bergman_conj=bergman_conj,
            bergman_diag=bergman_diag,
            kernels=kernels,
            phi=y_dx.integrate(),
        )

    # -- recursion ---------------------------------------------------------------

    def correlator(self, g: int, n: int) -> Correlator:
        """W_{g,n} for 2g − 2 + n >= 1, memoized."""
        if 2 * g - 2 + n < 1:
            raise ValueError(f"W_{{{g},{n}}} is not given by the recursion")
        key = (g, n)
        if key not in self._correlators:
            self._correlators[key] = self._recurse(g, n)
        return self._correlators[key]

    def _recurse(self, g: int, n: int) -> Correlator:
        rest = n - 1
        coefficients: dict[Key, complex] = {}
        for local in self.locals:
            for tail, jet in self._integrand(g, rest, local).items():
                for j, kernel in enumerate(local.kernels, start=1):
                    c = (kernel * jet).residue()
                    if c != 0:
                        head = ((local.index, j + 1),)
                        coefficients[head + tail] = coefficients.get(head + tail, 0j) + c
        coefficients = self._prune(coefficients, g, n)
        log.debug("W_{%d,%d}: %d basis terms at depth %d", g, n, len(coefficients), self.pole_depth)
        return Correlator(g, n, self.points, coefficients, self.param.conjugation)

    def _prune(self, coefficients: dict[Key, complex], g: int, n: int) -> dict[Key, complex]:
        scale = max((abs(c) for c in coefficients.values()), default=0.0)
        kept = {k: c for k, c in coefficients.items() if abs(c) > _DROP_TOL * scale}
        for key, c in kept.items():
            if any(d == self.pole_depth for _, d in key) and abs(c) > _EDGE_TOL * scale:
                raise TruncationInsufficient(
                    f"W_{{{g},{n}}} reaches the polar degree {self.pole_depth} of the basis"
                )
        return kept

    def _integrand(self, g: int, n: int, local: _Local) -> dict[Key, Jet]:
        """Quadratic-differential coefficient of the bracket, keyed by the basis in J."""
        acc: dict[Key, Jet] = {}
        if g >= 1:
            if (g - 1, n + 2) == (0, 2):
                _accumulate(acc, (), local.bergman_diag)
            else:
                for key, c in self.correlator(g - 1, n + 2).coefficients.items():
                    _accumulate(acc, key[2:], local.pair(key[0], key[1]) * c)

        positions = range(n)
        for g1 in range(g + 1):
            g2 = g - g1
            for size in range(n + 1):
                for part in itertools.combinations(positions, size):
                    other = tuple(i for i in positions if i not in part)
                    if (g1, len(part)) == (0, 0) or (g2, len(other)) == (0, 0):
                        continue
                    left = self._first_variable(g1, len(part) + 1, local, conjugate=False)
                    right = self._first_variable(g2, len(other) + 1, local, conjugate=True)
                    for k1, j1 in left.items():
                        for k2, j2 in right.items():
                            _accumulate(acc, _merge(part, k1, other, k2, n), j1 * j2)
        return acc

    def _first_variable(self, g: int, n: int, local: _Local, conjugate: bool) -> dict[Key, Jet]:
        """W_{g,n}(z or σz, ·) at a ramification point, keyed by the remaining basis."""
        cache_key = (g, n, local.index, conjugate)
        cached = self._first.get(cache_key)
        if cached is not None:
            return cached
        out: dict[Key, Jet] = {}
        if (g, n) == (0, 2):
            table = local.bergman_conj if conjugate else local.bergman
            for d, jet in table.items():
                out[((local.index, d),)] = jet
        else:
            basis = local.basis_conj if conjugate else local.basis
            for key, c in self.correlator(g, n).coefficients.items():
                _accumulate(out, key[1:], basis[key[0]] * c)
        self._first[cache_key] = out
        return out

    # -- free energies -------------------------------------------------------------

    def free_energy(self, g: int, phi_shift: complex = 0j) -> complex:
        """
        F_g = (2 − 2g)^{-1} Σ_a Res_{z→a} Φ(z) W_{g,1}(z), with dΦ = y dx.

        ``phi_shift`` adds a constant to the local primitives Φ; the result does
        not depend on it.
        """
        if g < 2:
            raise ValueError("the recursion defines F_g for g >= 2 only")
        correlator = self.correlator(g, 1)
        total = 0j
        for local in self.locals:
            phi = local.phi + phi_shift
            for ((r, d),), c in correlator.coefficients.items():
                if r == local.index:
                    total += c * phi.coefficient(d - 1)
        return total / (2 - 2 * g)


def _accumulate(acc: dict[Key, Jet], key: Key, jet: Jet) -> None:
    current = acc.get(key)
    acc[key] = jet if current is None else current + jet


def _merge(part: tuple[int, ...], k1: Key, other: tuple[int, ...], k2: Key, n: int) -> Key:
    slots: list[BasisIndex | None] = [None] * n
    for i, b in zip(part, k1, strict=True):
        slots[i] = b
    for i, b in zip(other, k2, strict=True):
        slots[i] = b
    return tuple(slots)  # type: ignore[arg-type]


def _check_range(g: int, n: int) -> None:
    if g > MAX_GENUS or n > MAX_POINTS:
        raise OrderTooLarge(
            f"W_{{{g},{n}}} is beyond the supported range g <= {MAX_GENUS}, n <= {MAX_POINTS}"
        )


def _with_retries(
    param: Parametrization, pole_depth: int, action: Callable[[TopologicalRecursion], T]
) -> T:
    depth, length = pole_depth, None
    for attempt in range(MAX_RETRIES + 1):
        session = TopologicalRecursion(param, depth, length)
        try:
            return action(session)
        except TruncationInsufficient as e:
            if attempt == MAX_RETRIES:
                raise
            log.debug("Retrying with a deeper basis after: %s", e)
            depth, length = depth + 4, session.jet_length + 8
    raise AssertionError("unreachable")


def eo_correlator(
    param: Parametrization, g: int, n: int, pole_depth: int | None = None
) -> Correlator:
    """
    Eynard-Orantin correlator W_{g,n} of a parametrized curve.

    Args:
        param: Parametrization of the curve
        g: Genus, at most 3
        n: Number of points, at most 3
        pole_depth: Polar degree of the basis; the default fits the known pole orders

    Returns:
        The correlator as a coefficient tensor

    Raises:
        OrderTooLarge: If g > 3 or n > 3
        TruncationInsufficient: If the basis stays too short after the retries
    """
    _check_range(g, n)
    if 2 * g - 2 + n < 1:
        raise ValueError(f"W_{{{g},{n}}} is not given by the recursion")
    depth = pole_depth or default_pole_depth(g, n)
    return _with_retries(param, depth, lambda session: session.correlator(g, n))


def tr_free_energy(
    param: Parametrization, g: int, phi_shift: complex = 0j, pole_depth: int | None = None
) -> complex:
    """
    Genus-g free energy from the recursion, for g in {2, 3}.

    Raises:
        OrderTooLarge: If g > 3
        TruncationInsufficient: If the basis stays too short after the retries
    """
    _check_range(g, 1)
    if g < 2:
        raise ValueError("the recursion defines F_g for g >= 2 only")
    depth = pole_depth or default_pole_depth(g)
    return _with_retries(param, depth, lambda session: session.free_energy(g, phi_shift))

