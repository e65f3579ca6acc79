"""
Solutions of the BPS Riemann-Hilbert problem and their τ-functions.

Three solutions are evaluated in log form on the almost-doubled lattice: the
Voros solution built from Borel-summed Voros symbols, the minimal solution for
a given constant term ξ, and the holomorphic solution (ξ ≡ 1 on the active
classes). All products run over the active classes in the half-plane iℍ_ℓ.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .borel import check_half_plane, check_ray
from .bps import BpsStructure, apply, bps_automorphism, bps_spectrum, wrap_angle
from .curves import CurveLabel, SpectralCurve, pole_key
from .errors import NuOutOfStrip
from .lattice import (
    LatticeElement,
    QuadraticRefinement,
    TwistedValue,
    central_charge,
    make_refinement,
    nu_functional,
    pairing,
    xi_hol,
    xi_nu,
)
from .series import tr_free_energy_sum
from .special import log_lambda, log_upsilon, principal_log, upsilon_asym

log = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
_STRIP_TOL = 1e-12


class SolutionKind(str, Enum):
    VOR = "vor"
    MIN = "min"
    HOL = "hol"


def nu_star(curve: SpectralCurve, chosen_pole: str | None = None) -> tuple[complex, ...]:
    """
    Quantization parameters at which the Voros and holomorphic solutions agree
    up to the explicit factor ϱ.

    Weber, Whittaker, Legendre and the degree-3 curves take ν∞ = 1, Bessel
    ν₀ = 0 and Kummer (ν₀, ν∞) = (0, 1). For the Gauss and degenerate Gauss
    curves one chosen pole (the first by default) gets ν = 1, the others 0.
    """
    poles = curve.poles
    if curve.label in (CurveLabel.HG, CurveLabel.dHG):
        chosen = pole_key(chosen_pole) if chosen_pole is not None else poles[0]
        if chosen not in poles:
            raise NuOutOfStrip(f"{curve.label.value} has no even pole {chosen!r}")
        return tuple(1 + 0j if s == chosen else 0j for s in poles)
    if curve.label is CurveLabel.Kum:
        return (0j, 1 + 0j)
    if curve.label is CurveLabel.Bes:
        return (0j,)
    return tuple(1 + 0j for _ in poles)


def at_nu_star(curve: SpectralCurve, chosen_pole: str | None = None) -> SpectralCurve:
    return curve.with_nu(nu_star(curve, chosen_pole))


def _w(curve: SpectralCurve, gamma: LatticeElement, hbar: complex) -> complex:
    return central_charge(curve, gamma) / (TWO_PI_I * hbar)


def _prepare(curve: SpectralCurve, theta: float, hbar: complex) -> BpsStructure:
    structure = bps_spectrum(curve)
    check_ray(structure, theta)
    check_half_plane(theta, hbar)
    return structure


def _eta(xi: TwistedValue, gamma: LatticeElement) -> complex:
    """log ξ(−γ)/(2πi) with the imaginary part of the log taken in [0, 2π)."""
    value = xi.log_eval(-gamma)
    return complex(value.real, value.imag % (2 * math.pi)) / TWO_PI_I


# -- the three solutions --------------------------------------------------------------


def log_x_voros(
    curve: SpectralCurve,
    mu: LatticeElement,
    theta: float,
    hbar: complex,
    refinement: QuadraticRefinement | None = None,
) -> complex:
    """
    log X^Vor_{ℓ,μ}(ħ) = −Z(μ)/ħ + log ξ_{Đ,ν}(μ) + Λ-terms.

    Each class in iℍ_ℓ contributes Ω⟨μ,γ⟩ log Λ(w, (1 − ν(γ))/2), or for
    Ω = −1 (Ω⟨μ,γ⟩/2)(log Λ(w, 1 − ν(γ)/2) + log Λ(w, −ν(γ)/2)).

    Raises:
        RayIsBps: If ϑ is a BPS ray
        HalfPlaneError: If ħ is outside ℍ_ℓ
        PoleHit: If a Λ factor is singular
    """
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    refinement = refinement or make_refinement(structure)
    value = -central_charge(curve, mu, extended=True) / hbar
    value += xi_nu(curve, refinement).log_eval(mu)
    for gamma, omega in structure.half_plane_classes(theta):
        n = omega * pairing(mu, gamma)
        if n == 0:
            continue
        w, nu = _w(curve, gamma, hbar), nu_functional(curve, gamma)
        if omega == -1:
            value += n / 2 * (log_lambda(w, 1 - nu / 2) + log_lambda(w, -nu / 2))
        else:
            value += n * log_lambda(w, (1 - nu) / 2)
    return value


def x_voros(
    curve: SpectralCurve,
    mu: LatticeElement,
    theta: float,
    hbar: complex,
    refinement: QuadraticRefinement | None = None,
) -> complex:
    return cmath.exp(log_x_voros(curve, mu, theta, hbar, refinement))


def log_x_min(
    curve: SpectralCurve,
    mu: LatticeElement,
    xi: TwistedValue,
    theta: float,
    hbar: complex,
) -> complex:
    """
    log X^min_{ℓ,μ}(ħ) = −Z(μ)/ħ + log ξ(μ) + Σ Ω⟨μ,γ⟩ log Λ(w, log ξ(−γ)/2πi).

    The logarithm of ξ(−γ) is taken with imaginary part in [0, 2π).
    """
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    value = -central_charge(curve, mu, extended=True) / hbar + xi.log_eval(mu)
    for gamma, omega in structure.half_plane_classes(theta):
        n = omega * pairing(mu, gamma)
        if n:
            value += n * log_lambda(_w(curve, gamma, hbar), _eta(xi, gamma))
    return value


def x_min(
    curve: SpectralCurve, mu: LatticeElement, xi: TwistedValue, theta: float, hbar: complex
) -> complex:
    return cmath.exp(log_x_min(curve, mu, xi, theta, hbar))


def log_x_hol(curve: SpectralCurve, mu: LatticeElement, theta: float, hbar: complex) -> complex:
    return log_x_min(curve, mu, xi_hol(curve), theta, hbar)


def x_hol(curve: SpectralCurve, mu: LatticeElement, theta: float, hbar: complex) -> complex:
    return cmath.exp(log_x_hol(curve, mu, theta, hbar))


@dataclass(frozen=True)
class RhpSolution:
    """One of the three solutions, evaluated lazily at (μ, ϑ, ħ)."""

    kind: SolutionKind
    curve: SpectralCurve
    xi: TwistedValue

    @classmethod
    def create(
        cls, kind: SolutionKind | str, curve: SpectralCurve, xi: TwistedValue | None = None
    ) -> RhpSolution:
        kind = SolutionKind(kind)
        if kind is SolutionKind.HOL:
            xi = xi_hol(curve)
        elif xi is None:
            xi = xi_nu(curve, make_refinement(bps_spectrum(curve)))
        return cls(kind, curve, xi)

    def log_value(self, mu: LatticeElement, theta: float, hbar: complex) -> complex:
        if self.kind is SolutionKind.VOR:
            return log_x_voros(self.curve, mu, theta, hbar)
        return log_x_min(self.curve, mu, self.xi, theta, hbar)

    def __call__(self, mu: LatticeElement, theta: float, hbar: complex) -> complex:
        return cmath.exp(self.log_value(mu, theta, hbar))


# -- checks on the solutions ----------------------------------------------------------


def _orient(theta1: float, theta2: float) -> tuple[float, float]:
    """(counterclockwise ray, clockwise ray) of the acute sector they bound."""
    if wrap_angle(theta2 - theta1) < math.pi:
        return theta2, theta1
    return theta1, theta2


def jump_check(
    curve: SpectralCurve,
    mu: LatticeElement,
    theta1: float,
    theta2: float,
    hbar: complex,
    solution: RhpSolution | None = None,
) -> float:
    """
    Residual of X_{ℓ_b,μ} = X_{ℓ_a,μ} Π(1 − X_{ℓ_a,γ})^{Ω⟨γ,μ⟩} across a sector.

    ℓ_a is the counterclockwise and ℓ_b the clockwise boundary; the angles may
    be passed in either order.

    Raises:
        BoundaryIsBps: If a boundary is a BPS ray
    """
    solution = solution or RhpSolution.create(SolutionKind.VOR, curve)
    theta_a, theta_b = _orient(theta1, theta2)
    structure = bps_spectrum(curve)
    transform = bps_automorphism(structure, (theta_b, theta_a))
    log_b = solution.log_value(mu, theta_b, hbar)
    predicted = apply(transform, lambda nu: solution(nu, theta_a, hbar), mu)
    if predicted == 0:
        return math.inf
    return abs(cmath.exp(log_b - cmath.log(predicted)) - 1)


def rh2_residual(
    curve: SpectralCurve,
    mu: LatticeElement,
    theta: float,
    hbar: complex,
    solution: RhpSolution | None = None,
) -> float:
    """|X_{ℓ,μ}(ħ) e^{Z(μ)/ħ}/ξ(μ) − 1|."""
    solution = solution or RhpSolution.create(SolutionKind.VOR, curve)
    hbar = complex(hbar)
    log_ratio = (
        solution.log_value(mu, theta, hbar)
        + central_charge(curve, mu, extended=True) / hbar
        - solution.xi.log_eval(mu)
    )
    return abs(cmath.exp(log_ratio) - 1)


# -- comparison factors -------------------------------------------------------------


def _check_strips(structure: BpsStructure, theta: float) -> None:
    curve = structure.curve
    for gamma, omega in structure.half_plane_classes(theta):
        re_nu = nu_functional(curve, gamma).real
        if omega == -1:
            inside = -2 + _STRIP_TOL < re_nu <= _STRIP_TOL
        else:
            inside = -1 + _STRIP_TOL < re_nu <= 1 + _STRIP_TOL
        if not inside:
            raise NuOutOfStrip(
                f"Re ν({gamma.label()}) = {re_nu:.6g} is outside the strip for Ω = {omega}"
            )


def log_rho(curve: SpectralCurve, mu: LatticeElement, theta: float, hbar: complex) -> complex:
    """
    log ρ_μ with X^Vor = ρ X^min for ξ = ξ_{Đ,ν}:
    ρ_μ = Π (1 − πiν(γ)ħ/Z(γ))^{Ω⟨μ,γ⟩/2} over the Ω = −1 classes in iℍ_ℓ.

    Raises:
        NuOutOfStrip: If ν leaves the strips where this closed form holds
    """
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    _check_strips(structure, theta)
    total = 0j
    for gamma, omega in structure.half_plane_classes(theta):
        n = omega * pairing(mu, gamma)
        if omega != -1 or n == 0:
            continue
        factor = 1 - 1j * math.pi * nu_functional(curve, gamma) * hbar / central_charge(curve, gamma)
        total += n / 2 * cmath.log(factor)
    return total


def log_varrho(
    curve: SpectralCurve,
    mu: LatticeElement,
    theta: float,
    hbar: complex,
    chosen_pole: str | None = None,
) -> complex:
    """
    log ϱ_μ with X^Vor|_{ν*} = ϱ X^hol.

    ϱ_μ = ξ_{Đ,ν*}(μ)/ξ_hol(μ) · Π (1 − n/w)^{−nΩ⟨μ,γ⟩/2} over the Ω = −1
    classes in iℍ_ℓ with ν*(γ) = 2n ≠ 0. The ξ ratio is 1 on paths and on the
    active classes.
    """
    star = at_nu_star(curve, chosen_pole)
    hbar = complex(hbar)
    structure = _prepare(star, theta, hbar)
    refinement = make_refinement(structure)
    total = xi_nu(star, refinement).log_eval(mu) - xi_hol(star).log_eval(mu)
    for gamma, omega in structure.half_plane_classes(theta):
        k = omega * pairing(mu, gamma)
        n = round(nu_functional(star, gamma).real / 2)
        if omega != -1 or k == 0 or n == 0:
            continue
        total += -n * k / 2 * cmath.log(1 - n / _w(star, gamma, hbar))
    return total


def log_kappa(curve: SpectralCurve, theta: float, hbar: complex) -> complex:
    """
    log κ_ℓ with τ^Vor = κ_ℓ τ^min: Σ (ν(γ)Ω/4) log(w − ν(γ)/2) over Ω = −1
    classes in iℍ_ℓ.

    Raises:
        NuOutOfStrip: If ν leaves the strips
    """
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    _check_strips(structure, theta)
    total = 0j
    for gamma, omega in structure.half_plane_classes(theta):
        nu = nu_functional(curve, gamma)
        if omega == -1 and nu != 0:
            total += nu * omega / 4 * principal_log(_w(curve, gamma, hbar) - nu / 2)
    return total


def log_varkappa(
    curve: SpectralCurve, theta: float, hbar: complex, chosen_pole: str | None = None
) -> complex:
    """
    log ϰ with τ^Vor|_{ν*} = ϰ τ^hol: Σ ½ log(w − ν*(γ)/2) over the Ω = −1
    classes in iℍ_ℓ with ν*(γ) ≠ 0.
    """
    star = at_nu_star(curve, chosen_pole)
    hbar = complex(hbar)
    structure = _prepare(star, theta, hbar)
    total = 0j
    for gamma, omega in structure.half_plane_classes(theta):
        nu = nu_functional(star, gamma)
        if omega == -1 and abs(nu) > _STRIP_TOL:
            total += 0.5 * principal_log(_w(star, gamma, hbar) - nu / 2)
    return total


@dataclass(frozen=True)
class ComparisonFactors:
    rho: complex | None
    varrho: complex
    kappa: complex | None
    varkappa: complex

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho": self.rho,
            "varrho": self.varrho,
            "kappa": self.kappa,
            "varkappa": self.varkappa,
        }


def comparison_factors(
    curve: SpectralCurve,
    mu: LatticeElement,
    theta: float,
    hbar: complex,
    chosen_pole: str | None = None,
) -> ComparisonFactors:
    """
    ρ_μ, ϱ_μ, κ_ℓ and ϰ at (ϑ, ħ).

    ρ and κ are None when ν is outside the strips; ϱ and ϰ are taken at ν*.
    """
    try:
        rho = cmath.exp(log_rho(curve, mu, theta, hbar))
        kappa = cmath.exp(log_kappa(curve, theta, hbar))
    except NuOutOfStrip as e:
        log.debug("ρ and κ skipped: %s", e)
        rho = kappa = None
    return ComparisonFactors(
        rho,
        cmath.exp(log_varrho(curve, mu, theta, hbar, chosen_pole)),
        kappa,
        cmath.exp(log_varkappa(curve, theta, hbar, chosen_pole)),
    )


# -- τ-functions -------------------------------------------------------------------------


def log_tau_min(
    curve: SpectralCurve, xi: TwistedValue, theta: float, hbar: complex
) -> complex:
    """Σ Ω log Υ(w, log ξ(−γ)/2πi) over iℍ_ℓ."""
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    return sum(
        (
            omega * log_upsilon(_w(curve, gamma, hbar), _eta(xi, gamma))
            for gamma, omega in structure.half_plane_classes(theta)
        ),
        0j,
    )


def log_tau_hol(curve: SpectralCurve, theta: float, hbar: complex) -> complex:
    return log_tau_min(curve, xi_hol(curve), theta, hbar)


def log_tau_voros(curve: SpectralCurve, theta: float, hbar: complex) -> complex:
    """
    Closed form of the Borel-summed Voros τ-function:
    Σ_{Ω≠−1} Ω log Υ(w, (1−ν)/2) + Σ_{Ω=−1} (Ω/2)(log Υ(w, 1−ν/2) + log Υ(w, −ν/2)).
    """
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    total = 0j
    for gamma, omega in structure.half_plane_classes(theta):
        w, nu = _w(curve, gamma, hbar), nu_functional(curve, gamma)
        if omega == -1:
            total += omega / 2 * (log_upsilon(w, 1 - nu / 2) + log_upsilon(w, -nu / 2))
        else:
            total += omega * log_upsilon(w, (1 - nu) / 2)
    return total


def log_tau_voros_asym(curve: SpectralCurve, theta: float, hbar: complex, order: int) -> complex:
    """
    Asymptotic partial sum of log τ^Vor: per class −½𝓑₂ log w plus
    Σ_{k=2}^{order} 𝓑_{k+1}/((k−1)(k+1)) w^{1−k}, weighted by Ω.
    """
    hbar = complex(hbar)
    structure = _prepare(curve, theta, hbar)
    total = 0j
    for gamma, omega in structure.half_plane_classes(theta):
        w, nu = _w(curve, gamma, hbar), nu_functional(curve, gamma)
        if omega == -1:
            total += omega / 2 * (
                upsilon_asym(w, 1 - nu / 2, order) + upsilon_asym(w, -nu / 2, order)
            )
        else:
            total += omega * upsilon_asym(w, (1 - nu) / 2, order)
    return total


def tau(
    kind: SolutionKind | str,
    curve: SpectralCurve,
    theta: float,
    hbar: complex,
    xi: TwistedValue | None = None,
) -> complex:
    """log τ of the given kind; the minimal one uses ξ_{Đ,ν} unless xi is given."""
    kind = SolutionKind(kind)
    if kind is SolutionKind.VOR:
        return log_tau_voros(curve, theta, hbar)
    if kind is SolutionKind.HOL:
        return log_tau_hol(curve, theta, hbar)
    if xi is None:
        xi = xi_nu(curve, make_refinement(bps_spectrum(curve)))
    return log_tau_min(curve, xi, theta, hbar)


def tau_tr_check(curve: SpectralCurve, theta: float, hbar: complex, genus: int) -> float:
    """|log τ^hol − Σ_{g=1}^{genus} ħ^{2g−2} F_g|."""
    hbar = complex(hbar)
    _prepare(curve, theta, hbar)
    return abs(log_tau_hol(curve, theta, hbar) - tr_free_energy_sum(curve, theta, hbar, genus))


def fit_order(hbars: list[complex], residuals: list[float]) -> float:
    """Least-squares slope of log residual against log |ħ|."""
    xs = np.log(np.abs(np.asarray(hbars, dtype=complex)))
    ys = np.log(np.asarray(residuals, dtype=float))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def tau_defining_relation(
    curve: SpectralCurve,
    pole: str,
    theta: float,
    hbar: complex,
    step: float = 1e-5,
) -> float:
    """
    |∂_{m_s} log τ^Vor + ∂_ħ log X^Vor_{β_s}| by central differences.
    """
    s = pole_key(pole)
    hbar = complex(hbar)
    index = curve.poles.index(s)
    beta = LatticeElement.beta(curve.poles, s)

    def shifted(delta: float) -> SpectralCurve:
        masses = list(curve.masses)
        masses[index] += delta
        return curve.with_masses(masses)

    d_tau = (
        log_tau_voros(shifted(step), theta, hbar) - log_tau_voros(shifted(-step), theta, hbar)
    ) / (2 * step)
    d_x = (
        log_x_voros(curve, beta, theta, hbar + step) - log_x_voros(curve, beta, theta, hbar - step)
    ) / (2 * step)
    return abs(d_tau + d_x)


def scale_invariance_residual(
    curve: SpectralCurve, theta: float, hbar: complex, factor: complex
) -> float:
    """|log τ^Vor(λm, λħ) − log τ^Vor(m, ħ)| with the ray rotated by arg λ."""
    factor = complex(factor)
    scaled = curve.scaled(factor)
    rotated = wrap_angle(theta + cmath.phase(factor))
    return abs(
        log_tau_voros(scaled, rotated, factor * complex(hbar)) - log_tau_voros(curve, theta, hbar)
    )

