"""
Catalog of spectral curves of hypergeometric type.

Each curve y² = Q(x) is determined by its label, one mass per even pole of
Q(x)dx² and one quantization parameter per even pole. The module also builds a
rational parametrization of every curve by the Riemann sphere and the quantum
ODE coefficients used by the WKB oracle.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np

from .errors import DimensionMismatch, InvalidMass, Unsupported
from .jets import Jet, RationalFunction
from .utils import parse_complex

log = logging.getLogger(__name__)

INFINITY = complex(math.inf, 0.0)
POLE_ORDER = ("0", "1", "inf")
_MASS_TOL = 1e-12
_RESIDUE_JET_LENGTH = 16


class CurveLabel(str, Enum):
    HG = "HG"
    dHG = "dHG"
    Kum = "Kum"
    Leg = "Leg"
    Bes = "Bes"
    Whi = "Whi"
    Web = "Web"
    dBes = "dBes"
    Ai = "Ai"
    Deg3_14 = "Deg3_14"
    Deg3_23 = "Deg3_23"

    @property
    def experimental(self) -> bool:
        return self in (CurveLabel.Deg3_14, CurveLabel.Deg3_23)

    @classmethod
    def parse(cls, value: str | CurveLabel) -> CurveLabel:
        if isinstance(value, CurveLabel):
            return value
        for label in cls:
            if label.value.lower() == str(value).strip().lower():
                return label
        names = ", ".join(label.value for label in cls)
        raise DimensionMismatch(f"Unknown curve label {value!r}; expected one of {names}")


EVEN_POLES: dict[CurveLabel, tuple[str, ...]] = {
    CurveLabel.HG: ("0", "1", "inf"),
    CurveLabel.dHG: ("1", "inf"),
    CurveLabel.Kum: ("0", "inf"),
    CurveLabel.Leg: ("inf",),
    CurveLabel.Bes: ("0",),
    CurveLabel.Whi: ("inf",),
    CurveLabel.Web: ("inf",),
    CurveLabel.dBes: (),
    CurveLabel.Ai: (),
    CurveLabel.Deg3_14: ("inf",),
    CurveLabel.Deg3_23: ("inf",),
}

ODD_POLES: dict[CurveLabel, tuple[str, ...]] = {
    CurveLabel.HG: (),
    CurveLabel.dHG: ("0",),
    CurveLabel.Kum: (),
    CurveLabel.Leg: ("1", "-1"),
    CurveLabel.Bes: ("inf",),
    CurveLabel.Whi: ("0",),
    CurveLabel.Web: (),
    CurveLabel.dBes: ("0", "inf"),
    CurveLabel.Ai: ("inf",),
    CurveLabel.Deg3_14: (),
    CurveLabel.Deg3_23: (),
}

EQUATIONS: dict[CurveLabel, str] = {
    CurveLabel.HG: "y^2 = (m_inf^2 x^2 - (m_inf^2 + m_0^2 - m_1^2) x + m_0^2)"
    " / (x^2 (x-1)^2)",
    CurveLabel.dHG: "y^2 = (m_inf^2 x + m_1^2 - m_inf^2) / (x (x-1)^2)",
    CurveLabel.Kum: "y^2 = (x^2 + 4 m_inf x + 4 m_0^2) / (4 x^2)",
    CurveLabel.Leg: "y^2 = m_inf^2 / (x^2 - 1)",
    CurveLabel.Bes: "y^2 = (x + 4 m_0^2) / (4 x^2)",
    CurveLabel.Whi: "y^2 = (x - 4 m_inf) / (4 x)",
    CurveLabel.Web: "y^2 = x^2/4 - m_inf",
    CurveLabel.dBes: "y^2 = 1/x",
    CurveLabel.Ai: "y^2 = x",
    CurveLabel.Deg3_14: "3 y^3 + 2 t y^2 + x y - m_inf = 0",
    CurveLabel.Deg3_23: "4 y^3 - 2 x y^2 + 2 m_inf y - t = 0",
}


def pole_key(s: Any) -> str:
    text = str(s).strip().lower()
    if text in {"inf", "infinity", "oo", "∞"}:
        return "inf"
    if text in POLE_ORDER:
        return text
    raise DimensionMismatch(f"Unknown pole {s!r}; expected one of 0, 1, inf")


@dataclass(frozen=True)
class SpectralCurve:
    """A validated curve of the catalog with numeric masses and ν."""

    label: CurveLabel
    masses: tuple[complex, ...]
    nus: tuple[complex, ...]
    Q: RationalFunction | None = field(default=None, compare=False, repr=False)

    @property
    def poles(self) -> tuple[str, ...]:
        return EVEN_POLES[self.label]

    @property
    def odd_poles(self) -> tuple[str, ...]:
        return ODD_POLES[self.label]

    @property
    def m(self) -> dict[str, complex]:
        return dict(zip(self.poles, self.masses, strict=True))

    @property
    def nu(self) -> dict[str, complex]:
        return dict(zip(self.poles, self.nus, strict=True))

    @property
    def equation(self) -> str:
        return EQUATIONS[self.label]

    def mass(self, s: str) -> complex:
        return self.masses[self.poles.index(pole_key(s))]

    def nu_of(self, s: str) -> complex:
        return self.nus[self.poles.index(pole_key(s))]

    def with_nu(self, nu: Any) -> SpectralCurve:
        return replace(self, nus=_parameter_tuple(self.label, nu, "nu", default=0j))

    def with_masses(self, m: Any) -> SpectralCurve:
        return get_curve(self.label, m, self.nus)

    def scaled(self, factor: complex) -> SpectralCurve:
        """Same curve with every mass multiplied by factor."""
        return self.with_masses(tuple(factor * m for m in self.masses))

    def turning_points(self) -> np.ndarray:
        """Zeros of Q in the x-plane."""
        if self.Q is None:
            return np.zeros(0, dtype=complex)
        return self.Q.zeros()

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label.value, "m": self.m, "nu": self.nu}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SpectralCurve:
        try:
            label = data["label"]
        except KeyError as e:
            raise DimensionMismatch("curve description needs a 'label'") from e
        return get_curve(label, data.get("m"), data.get("nu"))


def get_curve(label: str | CurveLabel, m: Any = None, nu: Any = None) -> SpectralCurve:
    """
    Build and validate a curve of the catalog.

    Args:
        label: Curve label, e.g. "Web" or CurveLabel.HG
        m: Masses as a mapping pole -> value, a sequence in pole order or a scalar
        nu: Quantization parameters in the same formats; zero when omitted

    Returns:
        The validated SpectralCurve

    Raises:
        DimensionMismatch: If the number of masses or ν does not fit the label
        InvalidMass: If the masses violate the admissibility conditions
    """
    label = CurveLabel.parse(label)
    masses = _parameter_tuple(label, m, "m", default=None)
    nus = _parameter_tuple(label, nu, "nu", default=0j)
    _validate_masses(label, masses)
    curve = SpectralCurve(label, masses, nus, _build_q(label, masses))
    log.debug("Built curve %s with m=%s nu=%s", label.value, masses, nus)
    return curve


def _parameter_tuple(label: CurveLabel, value: Any, name: str, default) -> tuple:
    poles = EVEN_POLES[label]
    if value is None or (isinstance(value, Sequence | Mapping) and len(value) == 0):
        if not poles or default is not None:
            return tuple(complex(default or 0j) for _ in poles)
        raise DimensionMismatch(f"{label.value} needs {len(poles)} value(s) for {name}")
    if isinstance(value, Mapping):
        keyed = {pole_key(k): parse_complex(v) for k, v in value.items()}
        if set(keyed) != set(poles):
            raise DimensionMismatch(
                f"{label.value} expects {name} for poles {list(poles)}, "
                f"got {sorted(keyed)}"
            )
        return tuple(keyed[s] for s in poles)
    if isinstance(value, str) and "," in value:
        value = [v for v in value.split(",") if v.strip()]
    if isinstance(value, str | int | float | complex):
        value = [value]
    values = tuple(parse_complex(v) for v in value)
    if len(values) != len(poles):
        raise DimensionMismatch(
            f"{label.value} expects {len(poles)} value(s) for {name}, got {len(values)}"
        )
    return values


def _vanishes(value: complex, scale: float) -> bool:
    return abs(value) <= _MASS_TOL * max(scale, 1e-300)


def _validate_masses(label: CurveLabel, masses: tuple[complex, ...]) -> None:
    checks: list[tuple[str, complex, float]] = []
    if label is CurveLabel.HG:
        m0, m1, mi = masses
        scale = max(abs(m0), abs(m1), abs(mi))
        checks = [("m_0", m0, scale), ("m_1", m1, scale), ("m_inf", mi, scale)]
        for s1 in (1, -1):
            for s2 in (1, -1):
                checks.append((f"m_0 {_sign(s1)} m_1 {_sign(s2)} m_inf", m0 + s1 * m1 + s2 * mi, scale))
    elif label is CurveLabel.dHG:
        m1, mi = masses
        scale = max(abs(m1), abs(mi))
        checks = [
            ("m_1", m1, scale),
            ("m_inf", mi, scale),
            ("m_1 + m_inf", m1 + mi, scale),
            ("m_1 - m_inf", m1 - mi, scale),
        ]
    elif label is CurveLabel.Kum:
        m0, mi = masses
        scale = max(abs(m0), abs(mi))
        checks = [("m_0", m0, scale), ("m_0 + m_inf", m0 + mi, scale), ("m_0 - m_inf", m0 - mi, scale)]
    elif masses:
        (mass,) = masses
        checks = [(f"m_{EVEN_POLES[label][0]}", mass, 1.0)]

    for name, value, scale in checks:
        if not math.isfinite(abs(value)) or _vanishes(value, scale if scale else 1.0):
            raise InvalidMass(f"{label.value}: {name} must be nonzero (got {value})")


def _sign(s: int) -> str:
    return "+" if s > 0 else "-"


def _build_q(label: CurveLabel, masses: tuple[complex, ...]) -> RationalFunction | None:
    rf = RationalFunction.from_coeffs
    match label:
        case CurveLabel.HG:
            m0, m1, mi = masses
            return rf([m0**2, -(mi**2 + m0**2 - m1**2), mi**2], [0, 0, 1, -2, 1])
        case CurveLabel.dHG:
            m1, mi = masses
            return rf([m1**2 - mi**2, mi**2], [0, 1, -2, 1])
        case CurveLabel.Kum:
            m0, mi = masses
            return rf([4 * m0**2, 4 * mi, 1], [0, 0, 4])
        case CurveLabel.Leg:
            (mi,) = masses
            return rf([mi**2], [-1, 0, 1])
        case CurveLabel.Bes:
            (m0,) = masses
            return rf([4 * m0**2, 1], [0, 0, 4])
        case CurveLabel.Whi:
            (mi,) = masses
            return rf([-4 * mi, 1], [0, 4])
        case CurveLabel.Web:
            (mi,) = masses
            return rf([-mi, 0, 0.25])
        case CurveLabel.dBes:
            return rf([1], [0, 1])
        case CurveLabel.Ai:
            return rf([0, 1])
    return None


# -- parametrizations ------------------------------------------------------------


def is_infinite(z: complex) -> bool:
    return not cmath.isfinite(z)


@dataclass(frozen=True, eq=False)
class Parametrization:
    """
    Rational parametrization z ↦ (x(z), y(z)) of a catalog curve.

    ``pole_points`` maps "s+" and "s-" to the two preimages of each even pole
    (complex infinity stands for z = ∞), labelled so that Res y dx = ±m_s.
    The covering involution is z ↦ 1/z for every curve.
    """

    curve: SpectralCurve
    x: RationalFunction
    y: RationalFunction
    pole_points: dict[str, complex]
    ramification_points: tuple[complex, ...]
    singular_points: tuple[complex, ...]
    conjugation: RationalFunction

    @cached_property
    def dx(self) -> RationalFunction:
        return self.x.derivative()

    def local_jet(self, f: RationalFunction, point: complex, length: int) -> Jet:
        """Jet of f at a point in the local coordinate t = z − p, or t = 1/z at ∞."""
        return f.on_jet(self.chart(point, length))

    @staticmethod
    def chart(point: complex, length: int) -> Jet:
        if is_infinite(point):
            return Jet.variable(0.0, length + 1).inverse()
        return Jet.variable(point, length)

    def form_jet(self, f: RationalFunction, point: complex, length: int) -> Jet:
        """Jet of the 1-form f(z) dz in the local coordinate at point."""
        z = self.chart(point, length)
        return f.on_jet(z) * z.derivative()

    def y_dx_jet(self, point: complex, length: int = _RESIDUE_JET_LENGTH) -> Jet:
        z = self.chart(point, length)
        return self.y.on_jet(z) * self.x.on_jet(z).derivative()

    def residue_y_dx(self, point: complex) -> complex:
        return self.y_dx_jet(point).residue()

    def identity_residual(self, zs: Sequence[complex]) -> float:
        """Largest relative |y² − Q(x)| over the sample points."""
        worst = 0.0
        for z in zs:
            xz, yz = self.x(z), self.y(z)
            q = self.curve.Q(xz)
            worst = max(worst, abs(yz * yz - q) / max(1.0, abs(q)))
        return worst

    def preimages(self, x_value: complex) -> list[complex]:
        """The z with x(z) = x_value (complex ∞ allowed)."""
        num, den = self.x.num, self.x.den
        if is_infinite(x_value):
            roots = list(den.roots()) if den.degree() > 0 else []
            if num.degree() > den.degree():
                roots.append(INFINITY)
            return roots
        roots = (num - x_value * den).roots()
        return [complex(r) for r in roots]


def build_parametrization(curve: SpectralCurve) -> Parametrization:
    """
    Build the rational parametrization of a catalog curve.

    Curves with two finite branch points e1, e2 use x = a(z + 1/z) + b with
    b = (e1 + e2)/2 and a = (e1 − e2)/4, so that √((x − e1)(x − e2)) = a(z − 1/z).
    Curves with one finite branch point e1 and the other at x = ∞ use
    x = e1 + λ²u² with u = (z − 1)/(z + 1).

    Raises:
        Unsupported: For the experimental degree-3 labels
    """
    if curve.label.experimental:
        raise Unsupported(f"{curve.label.value} has no parametrization in this catalog")

    z = RationalFunction.identity()
    conj = 1 / z
    m = curve.m
    label = curve.label
    two_branch = label not in (CurveLabel.Bes, CurveLabel.dBes, CurveLabel.Ai)

    if two_branch:
        if label is CurveLabel.HG:
            m0, m1, mi = m["0"], m["1"], m["inf"]
            delta = (m0 + m1 + mi) * (m0 + m1 - mi) * (m0 - m1 + mi) * (m0 - m1 - mi)
            b = (mi**2 + m0**2 - m1**2) / (2 * mi**2)
            a = cmath.sqrt(delta) / (4 * mi**2)
        elif label is CurveLabel.dHG:
            e1 = 1 - m["1"] ** 2 / m["inf"] ** 2
            a, b = e1 / 4, e1 / 2
        elif label is CurveLabel.Kum:
            a, b = cmath.sqrt(m["inf"] ** 2 - m["0"] ** 2), -2 * m["inf"]
        elif label is CurveLabel.Leg:
            a, b = 0.5, 0.0
        elif label is CurveLabel.Whi:
            a, b = m["inf"], 2 * m["inf"]
        else:  # Web
            a, b = cmath.sqrt(m["inf"]), 0.0
        x = a * (z + conj) + b
        root = a * (z - conj)
        y = {
            CurveLabel.HG: lambda: m["inf"] * root / (x * (x - 1)),
            CurveLabel.dHG: lambda: m["inf"] * root / (x * (x - 1)),
            CurveLabel.Kum: lambda: root / (2 * x),
            CurveLabel.Leg: lambda: m["inf"] * root / (x * x - 1),
            CurveLabel.Whi: lambda: root / (2 * x),
            CurveLabel.Web: lambda: root / 2,
        }[label]()
        ramification = (1.0 + 0j, -1.0 + 0j)
        singular = ramification
    else:
        u = (z - 1) / (z + 1)
        if label is CurveLabel.Bes:
            m0 = m["0"]
            x = -4 * m0**2 + 16 * m0**2 * u * u
            y = 2 * m0 * u / x
        elif label is CurveLabel.dBes:
            x = u * u
            y = 1 / u
        else:  # Ai
            x = u * u
            y = u
        ramification = (1.0 + 0j,)
        singular = (1.0 + 0j, -1.0 + 0j)

    partial = Parametrization(curve, x, y, {}, ramification, singular, conj)
    pole_points = _label_pole_points(partial)
    return replace(partial, pole_points=pole_points)


def _pole_x_value(s: str) -> complex:
    return INFINITY if s == "inf" else complex(float(s))


def _label_pole_points(param: Parametrization) -> dict[str, complex]:
    points: dict[str, complex] = {}
    for s in param.curve.poles:
        candidates = param.preimages(_pole_x_value(s))
        if len(candidates) != 2:
            raise Unsupported(
                f"expected two preimages of the pole {s}, found {len(candidates)}"
            )
        mass = param.curve.mass(s)
        r0 = param.residue_y_dx(candidates[0])
        r1 = param.residue_y_dx(candidates[1])
        if abs(r0 - mass) + abs(r1 + mass) <= abs(r0 + mass) + abs(r1 - mass):
            points[f"{s}+"], points[f"{s}-"] = candidates
        else:
            points[f"{s}-"], points[f"{s}+"] = candidates
        log.debug("Pole %s: residues %s, %s (mass %s)", s, r0, r1, mass)
    return points


# -- quantum curves ------------------------------------------------------------

ORACLE_LABELS = (CurveLabel.HG, CurveLabel.Web, CurveLabel.Bes)


@dataclass(frozen=True, eq=False)
class QuantumOdeCoeffs:
    """
    Coefficients of (ħ² d²/dx² + (q0 + ħ q1) ħ d/dx + r0 + ħ r1 + ħ² r2) ψ = 0.

    q0 vanishes for every curve of the oracle set.
    """

    curve: SpectralCurve
    q1: RationalFunction
    r0: RationalFunction
    r1: RationalFunction
    r2: RationalFunction

    @property
    def q0(self) -> RationalFunction:
        return RationalFunction.constant(0.0)

    def r(self, n: int) -> RationalFunction | None:
        return {0: self.r0, 1: self.r1, 2: self.r2}.get(n)


def quantum_ode(
    curve: SpectralCurve, split: Mapping[str, complex] | None = None
) -> QuantumOdeCoeffs:
    """
    Quantum curve whose WKB solution reproduces the odd forms of the curve.

    Args:
        curve: HG, Web or Bes curve
        split: For HG only, the sums c_s = ν_{s+} + ν_{s−} per pole (default 1/3
            each, so that the six unsplit parameters add up to 1)

    Raises:
        Unsupported: For labels outside the oracle set
    """
    X = RationalFunction.identity()
    zero = RationalFunction.constant(0.0)
    if curve.label is CurveLabel.HG:
        c = {"0": 1 / 3, "1": 1 / 3, "inf": 1 / 3}
        if split:
            c.update({pole_key(k): complex(v) for k, v in split.items()})
        m, nu = curve.m, curve.nu
        prod = {s: (c[s] ** 2 - nu[s] ** 2) / 4 for s in curve.poles}
        d0 = X * X * (X - 1)
        d1 = X * (X - 1) * (X - 1)
        di = X * (X - 1)
        q1 = (1 - c["0"]) / X + (1 - c["1"]) / (X - 1)
        r1 = -nu["0"] * m["0"] / d0 + nu["1"] * m["1"] / d1 + nu["inf"] * m["inf"] / di
        r2 = -prod["0"] / d0 + prod["1"] / d1 + prod["inf"] / di
        return QuantumOdeCoeffs(curve, q1, -curve.Q, r1, r2)
    if curve.label is CurveLabel.Web:
        r1 = RationalFunction.constant(-curve.nu_of("inf") / 2)
        return QuantumOdeCoeffs(curve, zero, -curve.Q, r1, zero)
    if curve.label is CurveLabel.Bes:
        m0, nu0 = curve.mass("0"), curve.nu_of("0")
        r1 = nu0 * m0 / (X * X)
        r2 = (1 - nu0**2) / (4 * X * X)
        return QuantumOdeCoeffs(curve, zero, -curve.Q, r1, r2)
    raise Unsupported(
        f"no quantum curve for {curve.label.value}; the WKB oracle covers "
        f"{', '.join(label.value for label in ORACLE_LABELS)}"
    )
