"""
WKB oracle: odd parts of the Riccati solution of the quantum curves.

For (ħ² d²/dx² + q1 ħ² d/dx + r0 + ħ r1 + ħ² r2) ψ = 0 the logarithmic
derivative S' = Σ ħ^k s_k of ψ = exp S solves a Riccati equation. Writing
t_n = s_{n−1}:

    t_0 = ±y,   t_n = −(Σ_{a=1}^{n−1} t_a t_{n−a} + dt_{n−1}/dx + q1 t_{n−1} + r_n) / (2 t_0)

The odd part (run(+y) − run(−y))/2 pulled back along x(z) gives the forms
dS_k^odd = s_k^odd x'(z) dz on the parametrizing sphere. They are evaluated on
short Taylor jets at every quadrature node, so no rational simplification is
needed.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad_vec

from .config import QUAD_TOL
from .curves import (
    INFINITY,
    Parametrization,
    QuantumOdeCoeffs,
    SpectralCurve,
    build_parametrization,
    is_infinite,
    pole_key,
    quantum_ode,
)
from .errors import ContourHitsPole, OrderTooLarge, QuadratureFail
from .jets import Jet
from .lattice import LatticeElement

log = logging.getLogger(__name__)

MAX_ORDER = 12
RESIDUE_NODES = 512
DETOUR_ATTEMPTS = 6
_SAME_POINT = 1e-9


def _ddx(f: Jet, x_prime: Jet) -> Jet:
    return f.derivative().with_valuation(0) / x_prime


@dataclass(frozen=True, eq=False)
class RiccatiSystem:
    """Riccati recursion of one quantum curve, pulled back to the z-sphere."""

    param: Parametrization
    ode: QuantumOdeCoeffs
    order: int

    @property
    def curve(self) -> SpectralCurve:
        return self.param.curve

    def branch(self, z: complex, sign: int, length: int | None = None) -> list[Jet]:
        """Taylor jets at z of t_0, ..., t_{order+1} on the branch t_0 = sign·y."""
        length = length or self.order + 3
        zj = Jet.variable(complex(z), length)
        xj = self.param.x.on_jet(zj)
        x_prime = self.param.dx.on_jet(zj)
        q1 = self.ode.q1.on_jet(xj)
        t = [self.param.y.on_jet(zj) * sign]
        for n in range(1, self.order + 2):
            acc = _ddx(t[n - 1], x_prime) + q1 * t[n - 1]
            for a in range(1, n):
                acc = acc + t[a] * t[n - a]
            r = self.ode.r(n)
            if r is not None:
                acc = acc + r.on_jet(xj)
            t.append(acc / (t[0] * -2))
        return t

    def odd_values(self, z: complex) -> np.ndarray:
        """s_k^odd(z) x'(z) for k = −1, ..., order."""
        z = complex(z)
        plus = self.branch(z, 1)
        minus = self.branch(z, -1)
        x_prime = self.param.dx(z)
        return np.array(
            [(p.value() - m.value()) / 2 * x_prime for p, m in zip(plus, minus, strict=True)]
        )

    def riccati_residual(self, z: complex, hbar: complex) -> complex:
        """
        Riccati equation evaluated on the truncated series T = Σ_{n<=order+1} ħ^n t_n.

        The result is O(ħ^{order+2}).
        """
        hbar = complex(hbar)
        length = self.order + 3
        zj = Jet.variable(complex(z), length)
        xj = self.param.x.on_jet(zj)
        x_prime = self.param.dx.on_jet(zj)
        t = self.branch(z, 1, length)
        series = t[0]
        for n, tn in enumerate(t[1:], start=1):
            series = series + tn * hbar**n
        value = series * series + _ddx(series, x_prime) * hbar
        value = value + self.ode.q1.on_jet(xj) * series * hbar
        for n in range(3):
            value = value + self.ode.r(n).on_jet(xj) * hbar**n
        return value.value()

    @cached_property
    def special_points(self) -> tuple[complex, ...]:
        """Finite points where some odd form may be singular."""
        param = self.param
        candidates: list[complex] = [
            *param.ramification_points,
            *param.singular_points,
            *(p for p in param.pole_points.values() if not is_infinite(p)),
            *param.x.poles(),
            *param.dx.zeros(),
            *param.y.poles(),
            *param.y.zeros(),
        ]
        points: list[complex] = []
        for p in candidates:
            p = complex(p)
            if all(abs(p - q) > _SAME_POINT for q in points):
                points.append(p)
        return tuple(points)


@dataclass(frozen=True)
class OddForm:
    """dS_k^odd = s_k^odd(x(z)) x'(z) dz as a function of z."""

    k: int
    system: RiccatiSystem

    def __call__(self, z: complex) -> complex:
        return complex(self.system.odd_values(z)[self.k + 1])

    def pullback(self, z: complex) -> complex:
        """Coefficient of the form pulled back by the covering involution at z."""
        sigma = self.param.conjugation
        return self(sigma(z)) * sigma.derivative()(z)

    @property
    def param(self) -> Parametrization:
        return self.system.param

    def residue(self, point: complex, nodes: int = RESIDUE_NODES) -> complex:
        return complex(odd_form_residues(self.system, point, nodes)[self.k + 1])


def riccati_odd_forms(
    curve: SpectralCurve, order: int, split: Mapping[str, complex] | None = None
) -> list[OddForm]:
    """
    Odd forms dS_k^odd for k = −1, ..., order.

    Args:
        curve: HG, Web or Bes curve
        order: Largest order K, at most 12
        split: HG only, the sums ν_{s+} + ν_{s−} of the unsplit parameters

    Raises:
        Unsupported: For labels outside the oracle set
        OrderTooLarge: If order > 12
    """
    system = riccati_system(curve, order, split)
    return [OddForm(k, system) for k in range(-1, order + 1)]


def riccati_system(
    curve: SpectralCurve, order: int, split: Mapping[str, complex] | None = None
) -> RiccatiSystem:
    if order > MAX_ORDER:
        raise OrderTooLarge(f"the WKB oracle stops at order {MAX_ORDER}, got {order}")
    ode = quantum_ode(curve, split)
    return RiccatiSystem(build_parametrization(curve), ode, max(order, 0))


def odd_form_residues(
    system: RiccatiSystem, point: complex, nodes: int = RESIDUE_NODES
) -> np.ndarray:
    """
    Residues of all odd forms at a point, by the trapezoid rule on a circle.

    The circle has a third of the distance to the nearest other special point as
    radius; at z = ∞ a large circle is used and its orientation reversed.
    """
    angles = 2 * math.pi * np.arange(nodes) / nodes
    finite = [p for p in system.special_points if not is_infinite(p)]
    if is_infinite(point):
        radius = 3 * (1 + max((abs(p) for p in finite), default=1.0))
        sign = -1
        center = 0j
    else:
        others = [abs(p - point) for p in finite if abs(p - point) > _SAME_POINT]
        radius = min(others, default=1.0) / 3
        sign = 1
        center = complex(point)
    total = np.zeros(system.order + 2, dtype=complex)
    for angle in angles:
        step = radius * cmath.exp(1j * angle)
        total += system.odd_values(center + step) * step
    return sign * total / nodes


# -- path integrals ----------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    """u = (z − α)/(z − β); z = ∞ maps to u = 1."""

    alpha: complex
    beta: complex

    def to_u(self, z: complex) -> complex:
        if is_infinite(z):
            return 1 + 0j
        return (z - self.alpha) / (z - self.beta)

    def to_z(self, u: complex) -> complex:
        return (self.alpha - self.beta * u) / (1 - u)

    def dz_du(self, u: complex) -> complex:
        return (self.alpha - self.beta) / (1 - u) ** 2


def default_chart(system: RiccatiSystem) -> Chart:
    """Chart with α = 0 and β placed far from every special point."""
    points = system.special_points
    big = 1 + 2 * max((abs(p) for p in points), default=1.0)
    candidates = [big * cmath.exp(1j * (0.3 + 2 * math.pi * j / 12)) for j in range(12)]
    beta = max(candidates, key=lambda c: min((abs(c - p) for p in points), default=big))
    return Chart(0j, beta)


def detour_polyline(
    start: complex, end: complex, obstacles: Sequence[complex], side: int, radius: float
) -> list[complex]:
    """
    Waypoints from start to end that pass obstacles near the segment on one side.

    Obstacles closer than ``radius`` to the segment are grouped into clusters and
    bypassed by a rectangle at distance ``radius``.
    """
    length = abs(end - start)
    direction = (end - start) / length
    normal = 1j * direction
    near: list[tuple[float, float]] = []
    for c in obstacles:
        rel = (c - start) / direction
        along, offset = rel.real, rel.imag
        if -radius < along < length + radius and abs(offset) < radius:
            near.append((along, offset))
    near.sort()

    clusters: list[list[tuple[float, float]]] = []
    for item in near:
        if clusters and item[0] - clusters[-1][-1][0] < 2 * radius:
            clusters[-1].append(item)
        else:
            clusters.append([item])

    points = [start]
    for cluster in clusters:
        lo, hi = cluster[0][0] - radius, cluster[-1][0] + radius
        if lo <= 0 or hi >= length:
            raise ContourHitsPole("a singular point lies too close to an endpoint")
        offsets = [o for _, o in cluster]
        height = max(offsets) + radius if side > 0 else min(offsets) - radius
        points.append(start + direction * lo + normal * height)
        points.append(start + direction * hi + normal * height)
    points.append(end)
    return points


def _segment_distance(a: complex, b: complex, c: complex) -> float:
    ab = b - a
    s = min(max(((c - a) * ab.conjugate()).real / abs(ab) ** 2, 0.0), 1.0)
    return abs(c - (a + s * ab))


def _contour(
    chart: Chart, start: complex, end: complex, obstacles: Sequence[complex], side: int
) -> list[complex]:
    u0, u1 = chart.to_u(start), chart.to_u(end)
    images = [chart.to_u(p) for p in obstacles]
    gap = min((min(abs(w - u0), abs(w - u1)) for w in images), default=abs(u1 - u0))
    radius = min(0.3 * gap, 0.25 * abs(u1 - u0))
    for attempt in range(DETOUR_ATTEMPTS):
        try:
            path = detour_polyline(u0, u1, images, side, radius)
        except ContourHitsPole:
            path = None
        if path is not None:
            clearance = min(
                (_segment_distance(a, b, w) for a, b in zip(path, path[1:]) for w in images),
                default=math.inf,
            )
            if clearance >= radius / 4:
                log.debug("Contour with %d waypoints, radius %.3g", len(path), radius)
                return path
        log.debug("Detour attempt %d failed, shrinking the radius", attempt + 1)
        radius /= 2
    raise ContourHitsPole(
        f"no pole-free contour from {start} to {end} after {DETOUR_ATTEMPTS} attempts"
    )


def _integrate_segment(
    system: RiccatiSystem, chart: Chart, a: complex, b: complex, quad_tol: float
) -> np.ndarray:
    count = system.order

    def integrand(s: float) -> np.ndarray:
        u = a + s * (b - a)
        values = system.odd_values(chart.to_z(u))[2:] * chart.dz_du(u) * (b - a)
        return np.concatenate([values.real, values.imag])

    result, error, info = quad_vec(
        integrand, 0.0, 1.0, epsabs=quad_tol, epsrel=quad_tol, full_output=True
    )
    if not info.success:
        raise QuadratureFail(f"segment integral did not converge: {info.message}")
    log.debug("Segment %s -> %s: %d intervals, error %.2e", a, b, len(info.intervals), error)
    return result[:count] + 1j * result[count:]


def path_integrals(
    system: RiccatiSystem,
    pole: str,
    side: int = 1,
    chart: Chart | None = None,
    quad_tol: float = QUAD_TOL,
) -> np.ndarray:
    """
    ∫ dS_k^odd from p_{s−} to p_{s+} for k = 1, ..., order.

    Raises:
        ContourHitsPole: If no detour keeps clear of the special points
        QuadratureFail: If a segment integral does not converge
    """
    s = pole_key(pole)
    param = system.param
    start, end = param.pole_points[f"{s}-"], param.pole_points[f"{s}+"]
    chart = chart or default_chart(system)
    obstacles = [
        p
        for p in (*system.special_points, INFINITY)
        if not _same(p, start) and not _same(p, end)
    ]
    path = _contour(chart, start, end, obstacles, side)
    total = np.zeros(system.order, dtype=complex)
    for a, b in zip(path, path[1:]):
        total += _integrate_segment(system, chart, a, b, quad_tol)
    return total


def _same(p: complex, q: complex) -> bool:
    if is_infinite(p) or is_infinite(q):
        return is_infinite(p) and is_infinite(q)
    return abs(p - q) <= _SAME_POINT


def path_voros_numeric(
    curve: SpectralCurve,
    beta: LatticeElement | str,
    k: int,
    side: int = 1,
    quad_tol: float = QUAD_TOL,
) -> complex:
    """
    Numerical path Voros coefficient V_{β,k} for k >= 1.

    A path class Σ n_s β_s contributes Σ n_s ∫_{p_{s−}}^{p_{s+}} dS_k^odd. Cycle
    parts contribute nothing at k >= 1 since the forms have no residues.

    Args:
        curve: HG, Web or Bes curve
        beta: Lattice element or pole key s for β_s
        k: Order in ħ, 1 <= k <= 12
        side: Side (+1 or −1) on which the contour passes the special points

    Raises:
        ContourHitsPole: If no contour avoids the special points
    """
    if k < 1:
        raise ValueError("path integrals are taken for k >= 1 only")
    system = riccati_system(curve, k)
    if isinstance(beta, str):
        weights = {pole_key(beta): 1}
    else:
        weights = dict(zip(curve.poles, beta.paths, strict=True))
    total = 0j
    for s, n in weights.items():
        if n:
            total += n * path_integrals(system, s, side, quad_tol=quad_tol)[k - 1]
    return total
