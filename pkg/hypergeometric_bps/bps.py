"""
BPS spectra of the catalog curves and the geometry of their rays.

The spectra are static data: for masses in the admissible set the active
classes and their indices do not depend on m, only the central charges do.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from .config import TOL_ANGLE
from .curves import EVEN_POLES, CurveLabel, SpectralCurve, get_curve
from .errors import BoundaryIsBps, InvalidMass
from .lattice import LatticeElement, central_charge, pairing

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


class BpsClass(NamedTuple):
    gamma: LatticeElement
    omega: int


def _saddle(poles: Sequence[str], signs: dict[str, int]) -> LatticeElement:
    total = LatticeElement.zero(poles)
    for s, sign in signs.items():
        total = total + LatticeElement.gamma(poles, s, sign)
    return total


def _spectrum_table(label: CurveLabel, poles: tuple[str, ...]) -> list[BpsClass]:
    loop = LatticeElement.loop
    gamma = LatticeElement.gamma
    match label:
        case CurveLabel.HG:
            rows = [
                BpsClass(_saddle(poles, {"0": 1, "1": e1, "inf": e2}), 1)
                for e1, e2 in itertools.product((1, -1), repeat=2)
            ]
            rows += [BpsClass(loop(poles, s), -1) for s in poles]
        case CurveLabel.dHG:
            rows = [
                BpsClass(_saddle(poles, {"1": 1, "inf": e}), 2) for e in (1, -1)
            ]
            rows += [BpsClass(loop(poles, s), -1) for s in poles]
        case CurveLabel.Kum:
            rows = [BpsClass(_saddle(poles, {"0": 1, "inf": e}), 1) for e in (1, -1)]
            rows.append(BpsClass(loop(poles, "0"), -1))
        case CurveLabel.Leg:
            rows = [BpsClass(gamma(poles, "inf"), 4), BpsClass(loop(poles, "inf"), -1)]
        case CurveLabel.Bes:
            rows = [BpsClass(loop(poles, "0"), -1)]
        case CurveLabel.Whi:
            rows = [BpsClass(gamma(poles, "inf"), 2)]
        case CurveLabel.Web | CurveLabel.Deg3_14:
            rows = [BpsClass(gamma(poles, "inf"), 1)]
        case _:
            rows = []
    return rows


def wrap_angle(theta: float) -> float:
    """Angle in [0, 2π)."""
    wrapped = math.fmod(theta, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle."""
    d = wrap_angle(a - b)
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class Ray:
    angle: float
    classes: tuple[BpsClass, ...] = ()

    @property
    def is_bps(self) -> bool:
        return bool(self.classes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "angle": self.angle,
            "kind": "BPS" if self.is_bps else "NonBPS",
            "classes": [
                {"gamma": c.gamma, "label": c.gamma.label(), "omega": c.omega}
                for c in self.classes
            ],
        }


@dataclass(frozen=True)
class BpsStructure:
    """Active classes of a curve, both orientations included."""

    curve: SpectralCurve
    active: tuple[BpsClass, ...]
    tol_angle: float = TOL_ANGLE

    def central_charge(self, gamma: LatticeElement) -> complex:
        return central_charge(self.curve, gamma, extended=True)

    def omega(self, gamma: LatticeElement) -> int:
        for c in self.active:
            if c.gamma == gamma:
                return c.omega
        return 0

    def arg(self, gamma: LatticeElement) -> float:
        return wrap_angle(cmath.phase(self.central_charge(gamma)))

    @property
    def is_empty(self) -> bool:
        return not self.active

    def is_uncoupled(self) -> bool:
        return all(
            pairing(a.gamma, b.gamma) == 0
            for a, b in itertools.combinations(self.active, 2)
        )

    def support_constant(self) -> float:
        """min |Z(γ)| / ‖γ‖ over active classes; infinity for an empty spectrum."""
        if not self.active:
            return math.inf
        return min(abs(self.central_charge(c.gamma)) / c.gamma.norm() for c in self.active)

    def rays(self) -> list[Ray]:
        """BPS rays sorted by angle, with the classes on each."""
        groups: list[tuple[float, list[BpsClass]]] = []
        for c in sorted(self.active, key=lambda c: self.arg(c.gamma)):
            angle = self.arg(c.gamma)
            if groups and angle_distance(groups[-1][0], angle) <= self.tol_angle:
                groups[-1][1].append(c)
            else:
                groups.append((angle, [c]))
        if len(groups) > 1 and angle_distance(groups[0][0], groups[-1][0]) <= self.tol_angle:
            _, first = groups.pop(0)
            groups[-1][1].extend(first)
        return [Ray(angle, tuple(classes)) for angle, classes in groups]

    def half_plane_classes(self, theta: float) -> list[BpsClass]:
        """
        Active classes with arg Z(γ) ∈ (ϑ, ϑ + π), the half-plane iℍ_ℓ.

        Raises:
            BoundaryIsBps: If ϑ or ϑ + π is a BPS ray
        """
        selected: list[BpsClass] = []
        for c in self.active:
            d = wrap_angle(self.arg(c.gamma) - theta)
            if min(d, TWO_PI - d) <= self.tol_angle or abs(d - math.pi) <= self.tol_angle:
                raise BoundaryIsBps(
                    f"the ray at {theta:.6g} or its opposite carries {c.gamma.label()}"
                )
            if d < math.pi:
                selected.append(c)
        return selected

    def sector_classes(self, theta1: float, theta2: float) -> list[BpsClass]:
        """
        Active classes with arg Z(γ) strictly inside the sector swept
        counterclockwise from ϑ₁ to ϑ₂.

        Raises:
            BoundaryIsBps: If ϑ₁ or ϑ₂ is a BPS ray
        """
        for theta in (theta1, theta2):
            ray = classify_ray(self, theta)
            if ray.is_bps:
                raise BoundaryIsBps(f"sector boundary {theta:.6g} is a BPS ray")
        width = wrap_angle(theta2 - theta1)
        return [c for c in self.active if wrap_angle(self.arg(c.gamma) - theta1) < width]

    def to_dict(self) -> dict[str, Any]:
        return {
            "curve": self.curve,
            "active": [
                {
                    "gamma": c.gamma,
                    "label": c.gamma.label(),
                    "omega": c.omega,
                    "Z": self.central_charge(c.gamma),
                    "Z_over_2pi_i": self.central_charge(c.gamma) / (2j * math.pi),
                    "arg_Z": self.arg(c.gamma),
                    "abs_Z": abs(self.central_charge(c.gamma)),
                }
                for c in self.active
            ],
            "rays": self.rays(),
            "uncoupled": self.is_uncoupled(),
            "support_constant": self.support_constant(),
        }


def bps_spectrum(curve: SpectralCurve, tol_angle: float = TOL_ANGLE) -> BpsStructure:
    """
    Active classes and BPS indices of a catalog curve, both orientations.

    Args:
        curve: A validated curve
        tol_angle: Angular tolerance used by ray classification

    Returns:
        The BpsStructure of the curve
    """
    rows = _spectrum_table(curve.label, curve.poles)
    active = tuple(rows) + tuple(BpsClass(-c.gamma, c.omega) for c in rows)
    log.debug("Spectrum of %s: %d active classes", curve.label.value, len(active))
    return BpsStructure(curve, active, tol_angle)


def classify_ray(structure: BpsStructure, theta: float) -> Ray:
    angle = wrap_angle(theta)
    on_ray = tuple(
        c
        for c in structure.active
        if angle_distance(structure.arg(c.gamma), angle) <= structure.tol_angle
    )
    return Ray(angle, on_ray)


def _proportional(a: LatticeElement, b: LatticeElement) -> bool:
    return bool(np.linalg.matrix_rank(np.vstack([a.coordinates(), b.coordinates()])) < 2)


@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    witness: tuple[str, str] | None
    margin: float

    def __iter__(self):
        return iter((self.generic, self.witness, self.margin))

    def to_dict(self) -> dict[str, Any]:
        return {"generic": self.generic, "witness": self.witness, "margin": self.margin}


def is_generic(curve: SpectralCurve, tol_angle: float = TOL_ANGLE) -> GenericityReport:
    """
    Whether no two non-proportional active classes share a BPS ray.

    The margin is the smallest angle between the rays of such a pair, so a
    small positive margin flags masses close to a wall rather than proving
    anything.
    """
    structure = bps_spectrum(curve, tol_angle)
    margin = math.inf
    witness: tuple[str, str] | None = None
    for a, b in itertools.combinations(structure.active, 2):
        if _proportional(a.gamma, b.gamma):
            continue
        d = angle_distance(structure.arg(a.gamma), structure.arg(b.gamma))
        if d < margin:
            margin = d
            witness = (a.gamma.label(), b.gamma.label())
    generic = margin > tol_angle
    return GenericityReport(generic, None if generic else witness, margin)


# -- BPS automorphisms ----------------------------------------------------------


@dataclass(frozen=True)
class TransformDescription:
    """The product of BPS automorphisms over the classes in a sector."""

    curve: SpectralCurve
    theta1: float
    theta2: float
    factors: tuple[BpsClass, ...]

    def exponents(self, mu: LatticeElement) -> list[tuple[LatticeElement, int]]:
        """The pairs (γ, Ω(γ)⟨γ, μ⟩) with a nonzero exponent."""
        pairs = [(c.gamma, c.omega * pairing(c.gamma, mu)) for c in self.factors]
        return [(g, n) for g, n in pairs if n]

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta1": self.theta1,
            "theta2": self.theta2,
            "factors": [{"gamma": c.gamma, "omega": c.omega} for c in self.factors],
        }


def bps_automorphism(
    structure: BpsStructure, sector: tuple[float, float]
) -> TransformDescription:
    """
    Describe the BPS automorphism of a sector.

    Raises:
        BoundaryIsBps: If a boundary ray of the sector is a BPS ray
    """
    theta1, theta2 = sector
    factors = structure.sector_classes(theta1, theta2)
    return TransformDescription(structure.curve, theta1, theta2, tuple(factors))


def compose(first: TransformDescription, second: TransformDescription) -> TransformDescription:
    """Automorphism of the union of two adjacent sectors."""
    if angle_distance(first.theta2, second.theta1) > TOL_ANGLE:
        raise BoundaryIsBps("sectors are not adjacent")
    return TransformDescription(
        first.curve, first.theta1, second.theta2, first.factors + second.factors
    )


def apply(
    transform: TransformDescription,
    X: Callable[[LatticeElement], complex],
    mu: LatticeElement,
) -> complex:
    """X(μ)·Π(1 − X(γ))^{Ω(γ)⟨γ, μ⟩}."""
    value = complex(X(mu))
    for gamma, n in transform.exponents(mu):
        value *= (1 - complex(X(gamma))) ** n
    return value


def random_generic_curve(
    label: CurveLabel | str,
    rng: np.random.Generator,
    nu: bool = True,
    attempts: int = 100,
) -> SpectralCurve:
    """
    Draw masses (and ν) for a label until the curve is valid and generic.

    Masses are drawn with modulus in [0.5, 2] and uniform phase; ν has real
    part in (−0.9, 0.9) and a small imaginary part.
    """
    label = CurveLabel.parse(label)
    n = len(EVEN_POLES[label])
    for _ in range(attempts):
        masses = rng.uniform(0.5, 2.0, n) * np.exp(1j * rng.uniform(0, TWO_PI, n))
        nus = rng.uniform(-0.9, 0.9, n) + 0.1j * rng.uniform(-1, 1, n) if nu else None
        try:
            curve = get_curve(label, list(masses), None if nus is None else list(nus))
        except InvalidMass:
            continue
        if is_generic(curve).generic:
            return curve
    raise InvalidMass(f"no generic masses for {label.value} after {attempts} draws")

