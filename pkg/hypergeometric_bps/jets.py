"""
Truncated Laurent jets and rational functions with complex coefficients.

A Jet stores c_0 t^v + c_1 t^(v+1) + ... known up to (but excluding) the order
``prec = v + len(coeffs)``. Ring operations keep track of that precision, so a
coefficient that was not determined is never returned silently.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from numbers import Number

import numpy as np
from numpy.polynomial import Polynomial

from .errors import PoleHit, TruncationInsufficient

log = logging.getLogger(__name__)

# Leading coefficients below this fraction of the largest nearby one are rounding noise.
STRIP_TOL = 1e-11
STRIP_WINDOW = 8
ROOT_TOL = 1e-9


class Jet:
    __slots__ = ("val", "coeffs")

    def __init__(self, val: int, coeffs: Sequence[complex] | np.ndarray):
        self.val = int(val)
        self.coeffs = np.asarray(coeffs, dtype=complex)

    @classmethod
    def constant(cls, c: complex, length: int) -> Jet:
        coeffs = np.zeros(length, dtype=complex)
        coeffs[0] = c
        return cls(0, coeffs)

    @classmethod
    def variable(cls, z0: complex, length: int) -> Jet:
        """The jet of z = z0 + t."""
        coeffs = np.zeros(length, dtype=complex)
        coeffs[0] = z0
        if length > 1:
            coeffs[1] = 1.0
        return cls(0, coeffs)

    @classmethod
    def monomial(cls, order: int, length: int, c: complex = 1.0) -> Jet:
        coeffs = np.zeros(length, dtype=complex)
        coeffs[0] = c
        return cls(order, coeffs)

    @property
    def prec(self) -> int:
        return self.val + len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"Jet(val={self.val}, prec={self.prec})"

    def coefficient(self, order: int) -> complex:
        if order >= self.prec:
            raise TruncationInsufficient(
                f"coefficient of order {order} requested from a jet known to order "
                f"{self.prec - 1}"
            )
        if order < self.val:
            return 0j
        return complex(self.coeffs[order - self.val])

    def residue(self) -> complex:
        return self.coefficient(-1)

    def value(self) -> complex:
        return self.coefficient(0)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients of orders lo..hi−1 as a dense array."""
        if hi > self.prec:
            raise TruncationInsufficient(
                f"orders up to {hi - 1} requested from a jet known to order "
                f"{self.prec - 1}"
            )
        out = np.zeros(hi - lo, dtype=complex)
        start = max(lo, self.val)
        if start < hi:
            out[start - lo : hi - lo] = self.coeffs[start - self.val : hi - self.val]
        if self.val < lo and _significant(self.coeffs[: lo - self.val], self.coeffs):
            raise TruncationInsufficient(
                f"jet has terms of order {self.val} below the window start {lo}"
            )
        return out

    def stripped(self, tol: float = STRIP_TOL) -> Jet:
        """Drop leading coefficients that are zero up to rounding.

        The scale is taken from the first few coefficients only, since Taylor
        coefficients near a pole grow geometrically with the order.
        """
        if len(self.coeffs) == 0:
            return self
        scale = np.max(np.abs(self.coeffs[:STRIP_WINDOW]))
        if scale == 0:
            return Jet(self.prec, np.zeros(0, dtype=complex))
        nonzero = np.nonzero(np.abs(self.coeffs) > tol * scale)[0]
        first = int(nonzero[0])
        return Jet(self.val + first, self.coeffs[first:])

    def with_valuation(self, val: int) -> Jet:
        """Drop the coefficients below order val, known to vanish exactly."""
        if val <= self.val:
            return self
        return Jet(val, self.coeffs[val - self.val :])

    def _coerce(self, other) -> Jet:
        if isinstance(other, Jet):
            return other
        if isinstance(other, Number):
            # Exact constants never limit precision.
            length = max(self.prec, 1)
            return Jet.constant(complex(other), length)
        return NotImplemented

    def __add__(self, other) -> Jet:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        lo = min(self.val, other.val)
        hi = min(self.prec, other.prec)
        if hi <= lo:
            return Jet(hi, np.zeros(0, dtype=complex))
        out = np.zeros(hi - lo, dtype=complex)
        for jet in (self, other):
            n = min(len(jet.coeffs), hi - jet.val)
            if n > 0:
                out[jet.val - lo : jet.val - lo + n] += jet.coeffs[:n]
        return Jet(lo, out)

    __radd__ = __add__

    def __neg__(self) -> Jet:
        return Jet(self.val, -self.coeffs)

    def __sub__(self, other) -> Jet:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Jet:
        return (-self) + other

    def __mul__(self, other) -> Jet:
        if isinstance(other, Number):
            return Jet(self.val, self.coeffs * complex(other))
        if not isinstance(other, Jet):
            return NotImplemented
        n = min(len(self.coeffs), len(other.coeffs))
        coeffs = np.convolve(self.coeffs[:n], other.coeffs[:n])[:n]
        return Jet(self.val + other.val, coeffs)

    __rmul__ = __mul__

    def inverse(self) -> Jet:
        a = self.stripped()
        if len(a.coeffs) == 0:
            raise PoleHit("inverse of a jet that vanishes to its known order")
        n = len(a.coeffs)
        b = np.zeros(n, dtype=complex)
        b[0] = 1 / a.coeffs[0]
        for j in range(1, n):
            b[j] = -np.dot(a.coeffs[1 : j + 1], b[j - 1 :: -1][:j]) / a.coeffs[0]
        return Jet(-a.val, b)

    def __truediv__(self, other) -> Jet:
        if isinstance(other, Number):
            return Jet(self.val, self.coeffs / complex(other))
        if not isinstance(other, Jet):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> Jet:
        if isinstance(other, Number):
            return self.inverse() * complex(other)
        return NotImplemented

    def __pow__(self, n: int) -> Jet:
        if not isinstance(n, int | np.integer):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result: Jet | None = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return Jet.constant(1.0, max(len(self.coeffs), 1))
        return result

    def derivative(self) -> Jet:
        orders = np.arange(self.val, self.prec)
        return Jet(self.val - 1, self.coeffs * orders)

    def integrate(self, constant: complex = 0.0) -> Jet:
        """Primitive in t; the t^{-1} coefficient must vanish."""
        if self.val <= -1 < self.prec:
            res = self.coeffs[-1 - self.val]
            scale = max(1.0, float(np.max(np.abs(self.coeffs))))
            if abs(res) > STRIP_TOL * scale:
                raise PoleHit(f"cannot integrate a jet with residue {res}")
        orders = np.arange(self.val, self.prec) + 1
        safe = np.where(orders == 0, 1, orders)
        coeffs = np.where(orders == 0, 0, self.coeffs / safe)
        primitive = Jet(self.val + 1, coeffs)
        if constant != 0:
            primitive = primitive + constant
        return primitive


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """num(z)/den(z) with numpy polynomial numerator and denominator."""

    num: Polynomial
    den: Polynomial

    @classmethod
    def constant(cls, c: complex) -> RationalFunction:
        return cls(Polynomial([complex(c)]), Polynomial([1.0 + 0j]))

    @classmethod
    def identity(cls) -> RationalFunction:
        return cls(Polynomial([0j, 1.0 + 0j]), Polynomial([1.0 + 0j]))

    @classmethod
    def from_coeffs(
        cls, num: Sequence[complex], den: Sequence[complex] = (1.0,)
    ) -> RationalFunction:
        """Build from coefficient lists in increasing powers."""
        return cls(
            Polynomial(np.asarray(num, dtype=complex)),
            Polynomial(np.asarray(den, dtype=complex)),
        )

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        den = self.den(z_arr)
        if np.any(den == 0):
            raise PoleHit(f"rational function evaluated at a pole: {z}")
        value = self.num(z_arr) / den
        return complex(value) if np.ndim(value) == 0 else value

    def on_jet(self, jet: Jet) -> Jet:
        """Compose with a jet by Horner's rule on numerator and denominator."""
        return _horner(self.num, jet) / _horner(self.den, jet)

    def taylor(self, z0: complex, length: int) -> Jet:
        return self.on_jet(Jet.variable(z0, length))

    def laurent(self, z0: complex, length: int) -> Jet:
        """
        Laurent jet at a finite point with the exact valuation.

        Leading zeros of numerator and denominator are removed using their root
        multiplicities at z0, so no rounding noise survives below the true order.
        """
        t = Jet.variable(z0, length)
        num = _horner(self.num, t).with_valuation(root_order(self.num, z0))
        den = _horner(self.den, t).with_valuation(root_order(self.den, z0))
        return num / den

    def derivative(self) -> RationalFunction:
        num = self.num.deriv() * self.den - self.num * self.den.deriv()
        return RationalFunction(num, self.den * self.den)

    def poles(self) -> np.ndarray:
        return self.den.roots() if self.den.degree() > 0 else np.zeros(0, complex)

    def zeros(self) -> np.ndarray:
        return self.num.roots() if self.num.degree() > 0 else np.zeros(0, complex)

    def _coerce(self, other) -> RationalFunction:
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Number):
            return RationalFunction.constant(other)
        return NotImplemented

    def __add__(self, other) -> RationalFunction:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if _is_one(self.den) and _is_one(other.den):
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> RationalFunction:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RationalFunction:
        return (-self) + other

    def __mul__(self, other) -> RationalFunction:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> RationalFunction:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> RationalFunction:
        if n < 0:
            return RationalFunction(self.den**-n, self.num**-n)
        return RationalFunction(self.num**n, self.den**n)


def _horner(poly: Polynomial, jet: Jet) -> Jet:
    coeffs = poly.coef
    acc: Jet | complex = complex(coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * jet + complex(c) if isinstance(acc, Jet) else jet * acc + complex(c)
    if not isinstance(acc, Jet):
        return Jet.constant(acc, max(len(jet), 1))
    return acc


def root_order(poly: Polynomial, z0: complex, tol: float = ROOT_TOL) -> int:
    """Multiplicity of z0 as a root of poly, relative to the coefficient scale."""
    scale = float(np.max(np.abs(poly.coef))) * (1 + abs(z0)) ** poly.degree()
    order = 0
    while order < poly.degree() and abs(poly(z0)) <= tol * scale:
        poly = poly.deriv()
        order += 1
    return order


def _is_one(poly: Polynomial) -> bool:
    return poly.degree() == 0 and poly.coef[0] == 1


def _significant(part: np.ndarray, whole: np.ndarray) -> bool:
    scale = float(np.max(np.abs(whole))) if len(whole) else 0.0
    return bool(np.any(np.abs(part) > STRIP_TOL * max(scale, 1.0)))
