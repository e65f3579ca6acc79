"""
Formal series in ħ built from the BPS data of a curve.

Voros coefficients, the Voros potential and the free energies are sums over
the active classes of one half-plane; for a fixed curve they do not depend on
which half-plane is used, as long as its boundary avoids the BPS rays.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .bps import BpsClass, BpsStructure, bps_spectrum, wrap_angle
from .config import K_MAX
from .curves import CurveLabel, SpectralCurve
from .errors import OrderTooLarge, Unsupported, UnsupportedClass
from .lattice import LatticeElement, central_charge, nu_functional, pairing
from .special import bernoulli_number, bernoulli_poly, principal_log

log = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
NO_VOROS = (CurveLabel.Ai, CurveLabel.dBes)


@dataclass(frozen=True)
class FormalSeries:
    """Σ_{k=k_min}^{K} c_k ħ^k, known up to and including order K."""

    k_min: int
    coeffs: tuple[complex, ...]

    @classmethod
    def zero(cls, k_min: int, order: int) -> FormalSeries:
        return cls(k_min, tuple(0j for _ in range(k_min, order + 1)))

    @classmethod
    def from_coeffs(cls, k_min: int, coeffs: Sequence[complex]) -> FormalSeries:
        return cls(k_min, tuple(complex(c) for c in coeffs))

    @property
    def order(self) -> int:
        return self.k_min + len(self.coeffs) - 1

    def coefficient(self, k: int) -> complex:
        if k > self.order:
            raise OrderTooLarge(f"order {k} requested from a series known to {self.order}")
        if k < self.k_min:
            return 0j
        return self.coeffs[k - self.k_min]

    def __getitem__(self, k: int) -> complex:
        return self.coefficient(k)

    def truncate(self, order: int) -> FormalSeries:
        return FormalSeries(self.k_min, self.coeffs[: max(0, order - self.k_min + 1)])

    def __add__(self, other: FormalSeries | complex) -> FormalSeries:
        if not isinstance(other, FormalSeries):
            other = FormalSeries(0, (complex(other),) + (0j,) * max(0, self.order))
        lo = min(self.k_min, other.k_min)
        hi = min(self.order, other.order)
        return FormalSeries(
            lo, tuple(self.coefficient(k) + other.coefficient(k) for k in range(lo, hi + 1))
        )

    __radd__ = __add__

    def __neg__(self) -> FormalSeries:
        return FormalSeries(self.k_min, tuple(-c for c in self.coeffs))

    def __sub__(self, other: FormalSeries | complex) -> FormalSeries:
        return self + (-other)

    def __mul__(self, other: FormalSeries | complex) -> FormalSeries:
        if not isinstance(other, FormalSeries):
            return FormalSeries(self.k_min, tuple(c * complex(other) for c in self.coeffs))
        lo = self.k_min + other.k_min
        hi = min(self.order + other.k_min, other.order + self.k_min)
        out = []
        for k in range(lo, hi + 1):
            total = 0j
            for i in range(self.k_min, k - other.k_min + 1):
                total += self.coefficient(i) * other.coefficient(k - i)
            out.append(total)
        return FormalSeries(lo, tuple(out))

    __rmul__ = __mul__

    def exp(self) -> FormalSeries:
        """exp of a series without negative powers."""
        if self.k_min < 0 and any(self.coeffs[: -self.k_min]):
            raise UnsupportedClass("exp of a series with negative powers of ħ")
        c0 = self.coefficient(0)
        n = self.order
        a = [self.coefficient(k) if k >= 1 else 0j for k in range(n + 1)]
        # E' = A' E, solved order by order.
        e = [1.0 + 0j] + [0j] * n
        for k in range(1, n + 1):
            e[k] = sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k
        scale = cmath.exp(c0)
        return FormalSeries(0, tuple(scale * c for c in e))

    def derivative(self) -> FormalSeries:
        """∂/∂ħ."""
        coeffs = [k * self.coefficient(k) for k in range(self.k_min, self.order + 1)]
        return FormalSeries(self.k_min - 1, tuple(coeffs))

    def __call__(self, hbar: complex) -> complex:
        hbar = complex(hbar)
        return sum((c * hbar**k for k, c in zip(self.orders(), self.coeffs)), 0j)

    def orders(self) -> range:
        return range(self.k_min, self.order + 1)

    def to_dict(self) -> dict[str, Any]:
        return {"k_min": self.k_min, "coefficients": list(self.coeffs)}


# -- per-class Bernoulli factors ---------------------------------------------------


def class_bernoulli(k: int, omega: int, nu_gamma: complex, k_max: int = K_MAX) -> complex:
    """
    𝓑_k(γ): B_k((1 + ν(γ))/2) when Ω(γ) ≠ −1, and
    ½(B_k(ν(γ)/2) + B_k(1 + ν(γ)/2)) when Ω(γ) = −1.
    """
    if omega == -1:
        return 0.5 * (
            bernoulli_poly(k, nu_gamma / 2, k_max) + bernoulli_poly(k, 1 + nu_gamma / 2, k_max)
        )
    return complex(bernoulli_poly(k, (1 + nu_gamma) / 2, k_max))


def generic_half_plane(structure: BpsStructure) -> float:
    """An angle ϑ such that neither ϑ nor ϑ + π is a BPS ray."""
    angles = sorted(
        {wrap_angle(structure.arg(c.gamma) + shift) for c in structure.active for shift in (0, math.pi)}
    )
    if not angles:
        return 0.0
    gaps = [
        (angles[(i + 1) % len(angles)] - a) % (2 * math.pi) or 2 * math.pi
        for i, a in enumerate(angles)
    ]
    i = max(range(len(gaps)), key=gaps.__getitem__)
    return wrap_angle(angles[i] + gaps[i] / 2)


def _half_plane(
    structure: BpsStructure, theta: float | None
) -> list[BpsClass]:
    if theta is None:
        theta = generic_half_plane(structure)
    return structure.half_plane_classes(theta)


def _require_voros(curve: SpectralCurve) -> None:
    if curve.label in NO_VOROS:
        raise Unsupported(f"Voros coefficients are not defined for {curve.label.value}")


# -- Voros coefficients ---------------------------------------------------------------


def voros_cycle(curve: SpectralCurve, gamma: LatticeElement) -> FormalSeries:
    """V_γ = Z(γ)/ħ − πiν(γ)."""
    z = central_charge(curve, gamma)
    nu = nu_functional(curve, gamma)
    return FormalSeries(-1, (z, -1j * math.pi * nu))


def voros_path_coeff(
    curve: SpectralCurve,
    beta: LatticeElement,
    k: int,
    theta: float | None = None,
    k_max: int = K_MAX,
) -> complex:
    """
    Coefficient of ħ^k in the path Voros series of β.

    V_{β,k} = Σ Ω(γ)⟨β,γ⟩ 𝓑_{k+1}(γ)/(k(k+1)) · (2πi/Z(γ))^k, summed over the
    active classes in a half-plane with non-BPS boundary.

    Args:
        curve: Curve with a non-trivial Voros theory
        beta: Path-only lattice element
        k: Order, k >= 1
        theta: Half-plane angle; chosen automatically when None
        k_max: Largest Bernoulli degree

    Raises:
        Unsupported: For Ai and dBes
        UnsupportedClass: If beta has a cycle part
        OrderTooLarge: If k + 1 exceeds k_max
    """
    _require_voros(curve)
    if not beta.is_path:
        raise UnsupportedClass(f"{beta.label()} is not a path class")
    if k < 1:
        raise ValueError(f"Voros path coefficients start at k = 1, got {k}")
    if k + 1 > k_max:
        raise OrderTooLarge(f"order {k} exceeds the maximum {k_max - 1}")

    if curve.label is CurveLabel.Deg3_14:
        n = beta.reduced.paths[0]
        m, nu = curve.mass("inf"), curve.nu_of("inf")
        return n * bernoulli_poly(k + 1, nu, k_max) / (k * (k + 1) * m**k)
    if curve.label is CurveLabel.Deg3_23:
        return 0j

    structure = bps_spectrum(curve)
    total = 0j
    for gamma, omega in _half_plane(structure, theta):
        weight = omega * pairing(beta, gamma)
        if weight == 0:
            continue
        b = class_bernoulli(k + 1, omega, nu_functional(curve, gamma), k_max)
        total += weight * b / (k * (k + 1)) * (TWO_PI_I / central_charge(curve, gamma)) ** k
    return total


def voros_path_series(
    curve: SpectralCurve,
    beta: LatticeElement,
    order: int,
    theta: float | None = None,
    k_max: int = K_MAX,
) -> FormalSeries:
    """V_β = Σ_{k=1}^{order} V_{β,k} ħ^k."""
    coeffs = [voros_path_coeff(curve, beta, k, theta, k_max) for k in range(1, order + 1)]
    return FormalSeries(1, tuple(coeffs))


def voros_symbol_series(
    curve: SpectralCurve, beta: LatticeElement, order: int, theta: float | None = None
) -> FormalSeries:
    """e^{V_β} as a formal series in ħ."""
    return voros_path_series(curve, beta, order, theta).exp()


def voros_potential_coeff(curve: SpectralCurve, k: int, theta: float | None = None) -> complex:
    """
    φ_k of the Voros potential, with ∂φ_k/∂m_s = V_{β_s,k}.

    φ_1 = ½ Σ Ω 𝓑₂(γ) log(Z/2πi) and, for k >= 2,
    φ_k = −Σ Ω 𝓑_{k+1}(γ)/((k−1)k(k+1)) · (2πi/Z)^{k−1}.
    """
    if curve.label in NO_VOROS:
        return 0j
    structure = bps_spectrum(curve)
    total = 0j
    for gamma, omega in _half_plane(structure, theta):
        z = central_charge(curve, gamma)
        b = class_bernoulli(k + 1, omega, nu_functional(curve, gamma))
        if k == 1:
            total += 0.5 * omega * b * principal_log(z / TWO_PI_I)
        else:
            total -= omega * b / ((k - 1) * k * (k + 1)) * (TWO_PI_I / z) ** (k - 1)
    return total


# -- closed forms per curve ------------------------------------------------------------


def _pair_term(k: int, nu_sum: complex, m_sum: complex, k_max: int) -> complex:
    """B_{k+1}((1 + ν)/2)/m^k for a combined mass and ν."""
    return bernoulli_poly(k + 1, (1 + nu_sum) / 2, k_max) / m_sum**k


def _self_term(k: int, nu: complex, m: complex, k_max: int) -> complex:
    """(B_{k+1}(ν) + B_{k+1}(1 + ν))/(2m)^k."""
    return (bernoulli_poly(k + 1, nu, k_max) + bernoulli_poly(k + 1, 1 + nu, k_max)) / (
        2 * m
    ) ** k


# sign of each (m_0 ± m_1 ± m_∞) term in the Gauss closed forms
_HG_SIGNS = {
    "0": (1, 1, 1, 1),
    "1": (1, -1, 1, -1),
    "inf": (1, 1, -1, -1),
}


def _closed_braces(curve: SpectralCurve, s: str, k: int, k_max: int) -> complex:
    label = curve.label
    m, nu = curve.m, curve.nu
    if label is CurveLabel.HG:
        m0, m1, mi = m["0"], m["1"], m["inf"]
        n0, n1, ni = nu["0"], nu["1"], nu["inf"]
        terms = (
            _pair_term(k, n0 + n1 + ni, m0 + m1 + mi, k_max),
            _pair_term(k, n0 - n1 + ni, m0 - m1 + mi, k_max),
            _pair_term(k, n0 + n1 - ni, m0 + m1 - mi, k_max),
            _pair_term(k, n0 - n1 - ni, m0 - m1 - mi, k_max),
        )
        braces = sum(sign * t for sign, t in zip(_HG_SIGNS[s], terms, strict=True))
        return braces - _self_term(k, nu[s], m[s], k_max)
    if label is CurveLabel.dHG:
        m1, mi, n1, ni = m["1"], m["inf"], nu["1"], nu["inf"]
        plus = 2 * _pair_term(k, n1 + ni, m1 + mi, k_max)
        minus = 2 * _pair_term(k, n1 - ni, m1 - mi, k_max)
        sign = 1 if s == "1" else -1
        return plus + sign * minus - _self_term(k, nu[s], m[s], k_max)
    if label is CurveLabel.Kum:
        m0, mi, n0, ni = m["0"], m["inf"], nu["0"], nu["inf"]
        plus = _pair_term(k, n0 + ni, m0 + mi, k_max)
        minus = _pair_term(k, n0 - ni, m0 - mi, k_max)
        if s == "0":
            return plus + minus - _self_term(k, n0, m0, k_max)
        return plus - minus
    if label is CurveLabel.Leg:
        mi, ni = m["inf"], nu["inf"]
        return 4 * _pair_term(k, ni, mi, k_max) - _self_term(k, ni, mi, k_max)
    if label is CurveLabel.Bes:
        return -_self_term(k, nu["0"], m["0"], k_max)
    if label is CurveLabel.Whi:
        return 2 * _pair_term(k, nu["inf"], m["inf"], k_max)
    if label is CurveLabel.Web:
        return _pair_term(k, nu["inf"], m["inf"], k_max)
    raise Unsupported(f"no closed form for the path Voros coefficients of {label.value}")


def closed_form_path_coeff(
    curve: SpectralCurve, s: str, k: int, k_max: int = K_MAX
) -> complex:
    """
    V_{β_s,k} from the per-curve Bernoulli closed forms.

    These are written directly in the masses and ν, without reference to the
    BPS spectrum, and serve as an independent check of voros_path_coeff.
    For the Gauss curve the β_1 and β_∞ forms are the β_0 form with the
    parameters permuted.

    Raises:
        Unsupported: For curves without a closed form (Ai, dBes and degree 3)
        UnsupportedClass: If s is not an even pole of the curve
    """
    _require_voros(curve)
    if s not in curve.poles:
        raise UnsupportedClass(f"no path β_{s} on {curve.label.value}")
    if k < 1:
        raise ValueError(f"Voros path coefficients start at k = 1, got {k}")
    if k + 1 > k_max:
        raise OrderTooLarge(f"order {k} exceeds the maximum {k_max - 1}")
    return complex(_closed_braces(curve, s, k, k_max)) / (k * (k + 1))


# -- free energies ---------------------------------------------------------------------


def free_energy(
    curve: SpectralCurve, g: int, theta: float | None = None, hbar: complex | None = None
) -> complex:
    """
    Genus-g free energy from the BPS data.

    g >= 2: B_{2g}/(2g(2g−2)) Σ Ω (2πi/Z)^{2g−2}.
    g = 1:  −(1/12) Σ Ω log(Z/(2πiħ)), which needs ħ.
    g = 0:  ½ Σ Ω (Z/2πi)² log(Z/2πi), fixed up to a quadratic polynomial in m.

    Raises:
        BoundaryIsBps: If the half-plane of theta has a BPS boundary
    """
    if g < 0:
        raise ValueError(f"genus must be non-negative, got {g}")
    structure = bps_spectrum(curve)
    classes = _half_plane(structure, theta)
    total = 0j
    if g >= 2:
        b = float(bernoulli_number(2 * g)) / (2 * g * (2 * g - 2))
        for gamma, omega in classes:
            total += omega * b * (TWO_PI_I / central_charge(curve, gamma)) ** (2 * g - 2)
    elif g == 1:
        if hbar is None:
            raise ValueError("F_1 is normalized with ħ; pass hbar")
        for gamma, omega in classes:
            total -= omega / 12 * principal_log(central_charge(curve, gamma) / (TWO_PI_I * hbar))
    else:
        for gamma, omega in classes:
            w = central_charge(curve, gamma) / TWO_PI_I
            total += 0.5 * omega * w * w * principal_log(w)
    return total


def tr_free_energy_sum(
    curve: SpectralCurve, theta: float | None, hbar: complex, genus: int
) -> complex:
    """Σ_{g=1}^{genus} ħ^{2g−2} F_g with the ħ-dependent F_1."""
    hbar = complex(hbar)
    return sum(
        (hbar ** (2 * g - 2) * free_energy(curve, g, theta, hbar) for g in range(1, genus + 1)),
        0j,
    )


# -- Weber difference equation -------------------------------------------------------


def _falling(p: int, j: int) -> int:
    out = 1
    for i in range(j):
        out *= p - i
    return out


def _weber_free_energy_derivative(g: int, j: int, m: complex) -> complex:
    """j-th m-derivative of F_g for the Weber curve, j >= 1 (j >= 3 when g = 0)."""
    if g == 0:
        return (-1) ** (j - 1) * math.factorial(j - 3) / m ** (j - 2)
    if g == 1:
        return -(-1) ** (j - 1) * math.factorial(j - 1) / (12 * m**j)
    b = float(bernoulli_number(2 * g)) / (2 * g * (2 * g - 2))
    return b * _falling(2 - 2 * g, j) * m ** (2 - 2 * g - j)


def weber_difference_oracle(k: int, m: complex, nu: complex) -> complex:
    """
    Coefficient of ħ^k in F(m + c₊ħ, ħ) − F(m + c₋ħ, ħ), c± = (±1 − ν)/2.

    F = Σ_g ħ^{2g−2} F_g(m) with F_0 = ½m² log m and F_1 = −(1/12) log m; only
    third and higher derivatives of F_0 and first and higher of F_1 enter for
    k >= 1, so the normalization of F_0 and F_1 drops out.
    """
    if k < 1:
        raise ValueError(f"the difference oracle starts at k = 1, got {k}")
    m, nu = complex(m), complex(nu)
    c_plus, c_minus = (1 - nu) / 2, (-1 - nu) / 2
    total = 0j
    for g in range(0, (k + 1) // 2 + 1):
        j = k + 2 - 2 * g
        if j < 1 or (g == 0 and j < 3):
            continue
        derivative = _weber_free_energy_derivative(g, j, m)
        total += derivative * (c_plus**j - c_minus**j) / math.factorial(j)
    return total
