"""
Borel summation of path Voros symbols.

The closed form is a product of Λ-functions over the active classes of the
half-plane iℍ_ℓ. For the Weber and Bessel curves the Borel transform is known
in closed form as well, and the Laplace integral along the ray gives an
independent numerical value.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.integrate import quad_vec

from .bps import BpsStructure, angle_distance, bps_spectrum, classify_ray
from .config import QUAD_TOL
from .curves import CurveLabel, SpectralCurve
from .errors import (
    HalfPlaneError,
    PoleHit,
    QuadratureFail,
    RayIsBps,
    Unsupported,
    UnsupportedClass,
)
from .lattice import LatticeElement, central_charge, nu_functional, pairing
from .series import voros_path_coeff, voros_symbol_series
from .special import bernoulli_poly, log_lambda

log = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
BOREL_LABELS = (CurveLabel.Web, CurveLabel.Bes)

# e^{−t·Re(e^{iϑ}/ħ)} drops below 1e-18 at the upper end of the Laplace integral.
_DAMPING_DIGITS = 18
_TAYLOR_RADIUS = 0.5
_TAYLOR_TERMS = 40
_POLE_TOL = 1e-10


@dataclass(frozen=True)
class BorelContext:
    """A non-BPS ray ϑ together with ħ values in its half-plane ℍ_ℓ."""

    structure: BpsStructure
    theta: float
    hbars: tuple[complex, ...] = ()

    @classmethod
    def create(
        cls, curve: SpectralCurve, theta: float, hbars: Sequence[complex] = ()
    ) -> BorelContext:
        ctx = cls(bps_spectrum(curve), float(theta), tuple(complex(h) for h in hbars))
        ctx.validate()
        return ctx

    @property
    def curve(self) -> SpectralCurve:
        return self.structure.curve

    def validate(self) -> None:
        check_ray(self.structure, self.theta)
        for hbar in self.hbars:
            check_half_plane(self.theta, hbar)


def check_ray(structure: BpsStructure, theta: float) -> None:
    ray = classify_ray(structure, theta)
    if ray.is_bps:
        labels = ", ".join(c.gamma.label() for c in ray.classes)
        raise RayIsBps(f"ϑ = {theta:.6g} is the BPS ray of {labels}")


def check_half_plane(theta: float, hbar: complex) -> None:
    hbar = complex(hbar)
    if hbar == 0 or angle_distance(cmath.phase(hbar), theta) >= math.pi / 2:
        raise HalfPlaneError(f"ħ = {hbar} is not in the half-plane of ϑ = {theta:.6g}")


def _lambda_weight(omega: int, exponent: int, w: complex, nu: complex) -> complex:
    """Log of the Λ factor of one class raised to its exponent."""
    if omega == -1:
        return exponent / 2 * (log_lambda(w, 1 - nu / 2) + log_lambda(w, -nu / 2))
    return exponent * log_lambda(w, (1 - nu) / 2)


def log_borel_sum_path_symbol(
    ctx_or_curve: BorelContext | SpectralCurve,
    beta: LatticeElement,
    hbar: complex,
    theta: float | None = None,
) -> complex:
    """
    log 𝒮_ℓ e^{V_β}(ħ) as a sum of log Λ over the active classes in iℍ_ℓ.

    Each class contributes Ω⟨β,γ⟩ log Λ(w, (1 − ν(γ))/2), or for Ω = −1
    (Ω⟨β,γ⟩/2)(log Λ(w, 1 − ν(γ)/2) + log Λ(w, −ν(γ)/2)), with w = Z(γ)/(2πiħ).

    Raises:
        RayIsBps: If ϑ is a BPS ray
        HalfPlaneError: If ħ is outside ℍ_ℓ
        PoleHit: If a Λ factor hits a pole of Γ
    """
    if isinstance(ctx_or_curve, BorelContext):
        structure, theta = ctx_or_curve.structure, ctx_or_curve.theta
    else:
        if theta is None:
            raise ValueError("pass theta together with a curve")
        structure = bps_spectrum(ctx_or_curve)
    if not beta.is_path:
        raise UnsupportedClass(f"{beta.label()} is not a path class")
    curve = structure.curve
    check_ray(structure, theta)
    check_half_plane(theta, hbar)
    hbar = complex(hbar)

    total = 0j
    for gamma, omega in structure.half_plane_classes(theta):
        exponent = omega * pairing(beta, gamma)
        if exponent == 0:
            continue
        w = central_charge(curve, gamma) / (TWO_PI_I * hbar)
        total += _lambda_weight(omega, exponent, w, nu_functional(curve, gamma))
    return total


def borel_sum_path_symbol(
    ctx_or_curve: BorelContext | SpectralCurve,
    beta: LatticeElement,
    hbar: complex,
    theta: float | None = None,
) -> complex:
    """𝒮_ℓ e^{V_β}(ħ); see log_borel_sum_path_symbol."""
    return cmath.exp(log_borel_sum_path_symbol(ctx_or_curve, beta, hbar, theta))


# -- Borel transforms ----------------------------------------------------------------


def _bernoulli_tail(w: complex, t: complex) -> complex:
    """e^{tw}/(e^w − 1) − 1/w − B₁(t) = Σ_{n≥2} B_n(t) w^{n−1}/n!."""
    if abs(w) < _TAYLOR_RADIUS:
        total = 0j
        power = w
        for n in range(2, _TAYLOR_TERMS):
            total += bernoulli_poly(n, t) * power / math.factorial(n)
            power *= w
        return total
    n = round((w / TWO_PI_I).real)
    if n != 0 and abs(w - TWO_PI_I * n) < _POLE_TOL * max(1.0, abs(w)):
        raise PoleHit(f"Borel transform has a pole at w = {w}")
    if w.real > 0:
        kernel = cmath.exp((t - 1) * w) / (1 - cmath.exp(-w))
    else:
        kernel = cmath.exp(t * w) / (cmath.exp(w) - 1)
    return kernel - 1 / w - (t - 0.5)


def borel_transform(curve: SpectralCurve, beta: LatticeElement, zeta: complex) -> complex:
    """
    Borel transform of V_β for the Weber and Bessel curves.

    Weber, with w = ζ/m∞ and t = (1 + ν∞)/2:
        (1/ζ)(e^{tw}/(e^w − 1) − 1/w − t + ½)
    Bessel, with w = ζ/(2m₀):
        −(1/ζ)(e^{ν₀w}(1 + e^w)/(e^w − 1) − 2/w − 2ν₀)

    The value at ζ = 0 is the limit V_{β,1}. Both are linear in the β
    coefficient.

    Raises:
        Unsupported: For other curves
        PoleHit: On the pole lattice 2πi m∞ ℤ (Weber) or 4πi m₀ ℤ (Bessel)
    """
    if curve.label not in BOREL_LABELS:
        raise Unsupported(f"no closed Borel transform for {curve.label.value}")
    if not beta.is_path:
        raise UnsupportedClass(f"{beta.label()} is not a path class")
    n = beta.reduced.paths[0]
    if n == 0:
        return 0j
    zeta = complex(zeta)
    if zeta == 0:
        return voros_path_coeff(curve, beta, 1)
    if curve.label is CurveLabel.Web:
        m, nu = curve.mass("inf"), curve.nu_of("inf")
        w = zeta / m
        return n * _bernoulli_tail(w, (1 + nu) / 2) / zeta
    m, nu = curve.mass("0"), curve.nu_of("0")
    w = zeta / (2 * m)
    return -n * (_bernoulli_tail(w, nu) + _bernoulli_tail(w, nu + 1)) / zeta


def laplace_quadrature(
    transform: Callable[[complex], complex],
    theta: float,
    hbar: complex,
    quad_tol: float = QUAD_TOL,
) -> complex:
    """
    ∫_0^{∞e^{iϑ}} transform(ζ) e^{−ζ/ħ} dζ by adaptive Gauss-Kronrod quadrature.

    The ray is cut where the integrand falls below 10^{-18} of its scale.

    Raises:
        HalfPlaneError: If Re(e^{iϑ}/ħ) <= 0
        QuadratureFail: If the error estimate stays above quad_tol
    """
    hbar = complex(hbar)
    direction = cmath.exp(1j * theta)
    rate = (direction / hbar).real
    if rate <= 0:
        raise HalfPlaneError(
            f"the Laplace integral along ϑ = {theta:.6g} diverges for ħ = {hbar}"
        )
    upper = _DAMPING_DIGITS * math.log(10) / rate

    def integrand(t: float) -> np.ndarray:
        zeta = t * direction
        value = transform(zeta) * cmath.exp(-zeta / hbar) * direction
        return np.array([value.real, value.imag])

    result, error, info = quad_vec(
        integrand, 0.0, upper, epsabs=quad_tol, epsrel=0.0, full_output=True
    )
    log.debug(
        "Laplace integral on [0, %.3g]: %d intervals, error %.2e",
        upper,
        len(info.intervals),
        error,
    )
    if not info.success or error > quad_tol:
        raise QuadratureFail(
            f"quadrature error {error:.2e} above {quad_tol:.0e} ({info.message})"
        )
    return complex(result[0], result[1])


def borel_sum_numeric(
    ctx: BorelContext, beta: LatticeElement, hbar: complex, quad_tol: float = QUAD_TOL
) -> complex:
    """Numerical 𝒮_ℓ V_β(ħ), the logarithm of the Borel-summed Voros symbol."""
    check_ray(ctx.structure, ctx.theta)
    check_half_plane(ctx.theta, hbar)
    transform = partial(borel_transform, ctx.curve, beta)
    return laplace_quadrature(transform, ctx.theta, hbar, quad_tol)


def watson_residual(
    ctx: BorelContext, beta: LatticeElement, hbar: complex, order: int
) -> float:
    """
    |𝒮_ℓ e^{V_β}(ħ) − [e^{V_β}]_{≤order}(ħ)|, which is O(ħ^{order+1}) as ħ → 0
    inside the half-plane of the ray.
    """
    closed = borel_sum_path_symbol(ctx, beta, hbar)
    partial_sum = voros_symbol_series(ctx.curve, beta, order, ctx.theta)(hbar)
    return abs(closed - partial_sum)
