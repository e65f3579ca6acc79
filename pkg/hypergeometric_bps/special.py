"""
Special functions on the principal branch.

Bernoulli numbers and polynomials are built in exact rational arithmetic.
The gamma-type functions Λ, G and Υ are returned as logarithms; callers
exponentiate only at the end so that long products keep their branch.
"""

import cmath
import logging
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
from scipy.special import loggamma

from .config import K_MAX
from .errors import BranchCut, OrderTooLarge, PoleHit

log = logging.getLogger(__name__)

LOG_2PI = math.log(2 * math.pi)

# ζ'(−1) = 1/12 − log A with A the Glaisher–Kinkelin constant.
ZETA_PRIME_MINUS_ONE = float(mpmath.zeta(-1, derivative=1))

_G_SHIFT_TARGET = 12.0
_G_ASYMPTOTIC_TERMS = 15
_POLE_TOL = 1e-13


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = −1/2 (generating function w/(e^w − 1))."""
    if n < 0:
        raise ValueError(f"Bernoulli index must be non-negative, got {n}")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    total = sum(
        (math.comb(n + 1, j) * bernoulli_number(j) for j in range(n)), Fraction(0)
    )
    return -total / (n + 1)


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(k: int) -> tuple[Fraction, ...]:
    """Coefficients of B_k(t) in increasing powers of t."""
    return tuple(math.comb(k, j) * bernoulli_number(k - j) for j in range(k + 1))


def bernoulli_poly(k: int, t, k_max: int = K_MAX):
    """
    Evaluate the Bernoulli polynomial B_k at t.

    Args:
        k: Degree, 0 <= k <= k_max
        t: Point of evaluation; int and Fraction give an exact Fraction
        k_max: Largest admissible degree

    Returns:
        B_k(t) as a Fraction for rational t, as a complex number otherwise

    Raises:
        OrderTooLarge: If k exceeds k_max
    """
    if k > k_max:
        raise OrderTooLarge(f"Bernoulli degree {k} exceeds the maximum {k_max}")
    if k < 0:
        raise ValueError(f"Bernoulli degree must be non-negative, got {k}")
    coeffs = bernoulli_poly_coeffs(k)
    if isinstance(t, Rational):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc
    t = complex(t)
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * t + float(c)
    return acc


def log_gamma(w: complex) -> complex:
    """Principal log Γ(w)."""
    w = complex(w)
    if w.imag == 0 and w.real <= 0 and _near_integer(w.real):
        raise PoleHit(f"log Γ has a pole at w = {w}")
    return complex(loggamma(w))


def principal_log(w: complex) -> complex:
    w = complex(w)
    if w.imag == 0 and w.real <= 0:
        raise BranchCut(f"w = {w} lies on the branch cut of log")
    return cmath.log(w)


def log_lambda(w: complex, eta: complex) -> complex:
    """
    log Λ(w, η) = w + log Γ(w + η) − ½ log 2π − (w + η − ½) log w.

    Args:
        w: Point off the cut (−∞, 0]
        eta: Shift parameter

    Raises:
        BranchCut: If w lies on (−∞, 0]
        PoleHit: If w + η is a non-positive integer
    """
    w, eta = complex(w), complex(eta)
    log_w = principal_log(w)
    return w + log_gamma(w + eta) - 0.5 * LOG_2PI - (w + eta - 0.5) * log_w


def log_barnes_g(w: complex) -> complex:
    """
    log G(w) for the Barnes G-function, continued from the right half-plane.

    The value is computed from the large-argument expansion at w + N, with
    Re(w + N) >= 12, and brought back down with G(w + 1) = Γ(w) G(w).

    Raises:
        PoleHit: If w is a non-positive integer (a zero of G)
    """
    w = complex(w)
    if w.imag == 0 and w.real <= 0 and _near_integer(w.real):
        raise PoleHit(f"G vanishes at w = {w}")
    shift = max(0, math.ceil(_G_SHIFT_TARGET - w.real))
    value = _log_barnes_g_asymptotic(w + shift)
    for j in range(shift):
        value -= log_gamma(w + j)
    return value


def _log_barnes_g_asymptotic(w: complex) -> complex:
    z = w - 1
    log_z = cmath.log(z)
    value = (
        0.5 * z * z * log_z
        - 0.75 * z * z
        + 0.5 * z * LOG_2PI
        - log_z / 12
        + ZETA_PRIME_MINUS_ONE
    )
    inv_z2 = 1 / (z * z)
    power = inv_z2
    for k in range(1, _G_ASYMPTOTIC_TERMS + 1):
        value += float(bernoulli_number(2 * k + 2)) / (4 * k * (k + 1)) * power
        power *= inv_z2
    return value


def log_upsilon(w: complex, eta: complex) -> complex:
    """
    log Υ(w, η) with
    Υ(w, η) = e^{−ζ'(−1)} e^{3w²/4} G(w + η + 1) / ((2π)^{w/2} w^{w²/2} Γ(w + η)^η).

    Raises:
        BranchCut: If w lies on (−∞, 0]
        PoleHit: If w + η + 1 is a non-positive integer, or Γ(w + η) is
            singular while η ≠ 0
    """
    w, eta = complex(w), complex(eta)
    log_w = principal_log(w)
    value = (
        -ZETA_PRIME_MINUS_ONE
        + 0.75 * w * w
        + log_barnes_g(w + eta + 1)
        - 0.5 * w * LOG_2PI
        - 0.5 * w * w * log_w
    )
    if eta != 0:
        value -= eta * log_gamma(w + eta)
    return value


def lambda_asym(w: complex, eta: complex, order: int, k_max: int = K_MAX) -> complex:
    """Σ_{k=1}^{order} B_{k+1}(1 − η)/(k(k+1)) · w^{−k}."""
    if order + 1 > k_max:
        raise OrderTooLarge(f"Asymptotic order {order} exceeds the maximum {k_max}")
    w, eta = complex(w), complex(eta)
    total = 0j
    for k in range(1, order + 1):
        total += bernoulli_poly(k + 1, 1 - eta, k_max) / (k * (k + 1)) * w**-k
    return total


def upsilon_asym(w: complex, eta: complex, order: int, k_max: int = K_MAX) -> complex:
    """−B₂(η)/2 · log w + Σ_{k=2}^{order} B_{k+1}(1 − η)/((k−1)(k+1)) · w^{1−k}."""
    if order + 1 > k_max:
        raise OrderTooLarge(f"Asymptotic order {order} exceeds the maximum {k_max}")
    w, eta = complex(w), complex(eta)
    total = -bernoulli_poly(2, eta, k_max) / 2 * principal_log(w)
    for k in range(2, order + 1):
        total += bernoulli_poly(k + 1, 1 - eta, k_max) / ((k - 1) * (k + 1)) * w ** (
            1 - k
        )
    return total


def _near_integer(x: float) -> bool:
    return abs(x - round(x)) < _POLE_TOL * max(1.0, abs(x))
