"""
The almost-doubled charge lattice of a catalog curve.

Generators are the cycles γ_{s±} around the two preimages of every even pole
and the paths β_s running from s− to s+. The cycles satisfy the single relation
Σ_s (γ_{s+} + γ_{s−}) = 0, so elements are compared after a canonical reduction
that eliminates the coefficient of the last γ_{s−}.
"""

from __future__ import annotations

import cmath
import logging
import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Any

import numpy as np

from .errors import Inconsistent, UnsupportedClass

if TYPE_CHECKING:
    from .bps import BpsStructure
    from .curves import SpectralCurve

log = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
_TERM = re.compile(
    r"(?P<sign>[+-]?)(?:(?P<count>\d+)\*)?(?P<kind>[gbγβ]?)(?P<pole>0|1|inf|∞)(?P<orient>[+-])?",
    re.IGNORECASE,
)


def cycle_keys(poles: Sequence[str]) -> tuple[str, ...]:
    return tuple(f"{s}{sign}" for s in poles for sign in "+-")


class LatticeElement:
    """
    Integer combination of the γ_{s±} and β_s of one curve.

    Equality and hashing work modulo the cycle relation.
    """

    def __init__(
        self, poles: Sequence[str], cycles: Sequence[int], paths: Sequence[int]
    ):
        self.poles = tuple(poles)
        self.cycles = tuple(int(c) for c in cycles)
        self.paths = tuple(int(p) for p in paths)
        if len(self.cycles) != 2 * len(self.poles) or len(self.paths) != len(
            self.poles
        ):
            raise UnsupportedClass(
                f"coefficient vectors do not match the poles {list(self.poles)}"
            )

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, poles: Sequence[str]) -> LatticeElement:
        return cls(poles, [0] * (2 * len(poles)), [0] * len(poles))

    @classmethod
    def gamma(cls, poles: Sequence[str], s: str, sign: int = 1) -> LatticeElement:
        """The cycle γ_{s+} (sign = 1) or γ_{s−} (sign = −1)."""
        cycles = [0] * (2 * len(poles))
        cycles[_index(poles, s) * 2 + (0 if sign > 0 else 1)] = 1
        return cls(poles, cycles, [0] * len(poles))

    @classmethod
    def beta(cls, poles: Sequence[str], s: str) -> LatticeElement:
        paths = [0] * len(poles)
        paths[_index(poles, s)] = 1
        return cls(poles, [0] * (2 * len(poles)), paths)

    @classmethod
    def loop(cls, poles: Sequence[str], s: str) -> LatticeElement:
        """γ_{s+} − γ_{s−}."""
        return cls.gamma(poles, s, 1) - cls.gamma(poles, s, -1)

    @classmethod
    def relation(cls, poles: Sequence[str]) -> LatticeElement:
        return cls(poles, [1] * (2 * len(poles)), [0] * len(poles))

    @classmethod
    def from_dict(cls, poles: Sequence[str], data: Mapping[str, Any]) -> LatticeElement:
        """Parse {"cycles": {"0+": n, ...}, "paths": {"0": n, ...}}."""
        keys = cycle_keys(poles)
        cycles = [0] * len(keys)
        paths = [0] * len(poles)
        unknown = set(data) - {"cycles", "paths"}
        if unknown:
            raise UnsupportedClass(f"unknown lattice keys {sorted(unknown)}")
        for key, n in (data.get("cycles") or {}).items():
            if key not in keys:
                raise UnsupportedClass(f"no generator γ_{key} for poles {list(poles)}")
            cycles[keys.index(key)] = int(n)
        for key, n in (data.get("paths") or {}).items():
            paths[_index(poles, str(key))] = int(n)
        return cls(poles, cycles, paths)

    @classmethod
    def parse(cls, poles: Sequence[str], text: str) -> LatticeElement:
        """
        Parse comma-separated terms such as ``"g0+, -g0-"`` or ``"2*binf"``.

        ``g<s>±`` (or ``γ<s>±``) is the cycle γ_{s±} and ``b<s>`` (or ``β<s>``)
        the path β_s. The prefix may be dropped: ``0+`` is γ_{0+} and ``inf`` is β_∞.
        """
        total = cls.zero(poles)
        for raw in str(text).split(","):
            token = raw.strip().replace(" ", "")
            if not token:
                continue
            match = _TERM.fullmatch(token)
            if match is None:
                raise UnsupportedClass(f"cannot parse lattice term {raw.strip()!r}")
            sign = -1 if match["sign"] == "-" else 1
            n = sign * int(match["count"] or 1)
            s = match["pole"].lower().replace("∞", "inf")
            kind, orient = match["kind"].lower(), match["orient"]
            if kind in {"g", "γ"} and orient is None:
                raise UnsupportedClass(f"cycle term {raw.strip()!r} needs + or -")
            if kind in {"b", "β"} and orient is not None:
                raise UnsupportedClass(f"path term {raw.strip()!r} takes no orientation")
            if orient is None:
                total = total + n * cls.beta(poles, s)
            else:
                total = total + n * cls.gamma(poles, s, 1 if orient == "+" else -1)
        return total

    # -- algebra -----------------------------------------------------------------

    def _check(self, other: LatticeElement) -> None:
        if self.poles != other.poles:
            raise UnsupportedClass(
                f"elements of different lattices: {self.poles} vs {other.poles}"
            )

    def __add__(self, other: LatticeElement) -> LatticeElement:
        if not isinstance(other, LatticeElement):
            return NotImplemented
        self._check(other)
        return LatticeElement(
            self.poles,
            [a + b for a, b in zip(self.cycles, other.cycles, strict=True)],
            [a + b for a, b in zip(self.paths, other.paths, strict=True)],
        )

    def __neg__(self) -> LatticeElement:
        return LatticeElement(
            self.poles, [-a for a in self.cycles], [-a for a in self.paths]
        )

    def __sub__(self, other: LatticeElement) -> LatticeElement:
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, n: int) -> LatticeElement:
        if not isinstance(n, int | np.integer):
            return NotImplemented
        n = int(n)
        return LatticeElement(
            self.poles, [n * a for a in self.cycles], [n * a for a in self.paths]
        )

    __rmul__ = __mul__

    @cached_property
    def reduced(self) -> LatticeElement:
        """Representative with zero coefficient on the last γ_{s−}."""
        if not self.poles or self.cycles[-1] == 0:
            return self
        c = self.cycles[-1]
        return LatticeElement(self.poles, [a - c for a in self.cycles], self.paths)

    def coordinates(self) -> np.ndarray:
        """Coefficients on the reduced basis: cycles but the last γ_{s−}, then paths."""
        r = self.reduced
        return np.array(r.cycles[:-1] + r.paths, dtype=np.int64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.poles == other.poles and np.array_equal(
            self.coordinates(), other.coordinates()
        )

    def __hash__(self) -> int:
        return hash((self.poles, tuple(self.coordinates().tolist())))

    def __bool__(self) -> bool:
        return bool(np.any(self.coordinates()))

    # -- classification ----------------------------------------------------------

    @property
    def is_cycle(self) -> bool:
        return not any(self.paths)

    @property
    def is_path(self) -> bool:
        return not any(self.reduced.cycles)

    def in_gamma(self) -> bool:
        """Anti-invariance under the covering involution, modulo the relation."""
        if not self.is_cycle:
            return False
        c = self.cycles
        return len({c[2 * i] + c[2 * i + 1] for i in range(len(self.poles))}) <= 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coordinates()))

    def path_part(self) -> LatticeElement:
        return LatticeElement(self.poles, [0] * len(self.cycles), self.paths)

    def cycle_part(self) -> LatticeElement:
        return LatticeElement(self.poles, self.cycles, [0] * len(self.paths))

    # -- presentation --------------------------------------------------------------

    def to_dict(self) -> dict[str, dict[str, int]]:
        keys = cycle_keys(self.poles)
        return {
            "cycles": {k: n for k, n in zip(keys, self.cycles, strict=True) if n},
            "paths": {s: n for s, n in zip(self.poles, self.paths, strict=True) if n},
        }

    def label(self) -> str:
        """Readable form such as ``γ0+ - γ0-``, as constructed (not reduced)."""
        terms = [
            (f"γ{k}", n)
            for k, n in zip(cycle_keys(self.poles), self.cycles, strict=True)
        ]
        terms += [(f"β{s}", n) for s, n in zip(self.poles, self.paths, strict=True)]
        parts: list[str] = []
        for name, n in terms:
            if n == 0:
                continue
            mag = "" if abs(n) == 1 else str(abs(n))
            if parts:
                parts.append(f"{'-' if n < 0 else '+'} {mag}{name}")
            else:
                parts.append(f"{'-' if n < 0 else ''}{mag}{name}")
        return " ".join(parts) or "0"

    def __repr__(self) -> str:
        return f"LatticeElement({self.label()})"


def _index(poles: Sequence[str], s: str) -> int:
    try:
        return tuple(poles).index(s)
    except ValueError as e:
        raise UnsupportedClass(f"no pole {s!r} among {list(poles)}") from e


def basis(poles: Sequence[str]) -> tuple[LatticeElement, ...]:
    """Reduced basis of the almost-doubled lattice, in coordinate order."""
    keys = cycle_keys(poles)
    elements = [
        LatticeElement.gamma(poles, key[:-1], 1 if key[-1] == "+" else -1)
        for key in keys[:-1]
    ]
    elements += [LatticeElement.beta(poles, s) for s in poles]
    return tuple(elements)


def pairing(a: LatticeElement, b: LatticeElement) -> int:
    """
    Intersection pairing on the almost-doubled lattice.

    Cycles pair trivially with cycles, paths with paths, and
    ⟨γ_{s±}, β_{s'}⟩ = ∓δ_{s,s'}.
    """
    a._check(b)
    total = 0
    for i in range(len(a.poles)):
        a_plus, a_minus = a.cycles[2 * i], a.cycles[2 * i + 1]
        b_plus, b_minus = b.cycles[2 * i], b.cycles[2 * i + 1]
        total += (a_minus - a_plus) * b.paths[i] + a.paths[i] * (b_plus - b_minus)
    return total


@dataclass(frozen=True)
class PairingTable:
    """Gram matrix of the pairing on the reduced basis."""

    poles: tuple[str, ...]

    @cached_property
    def matrix(self) -> np.ndarray:
        elements = basis(self.poles)
        n = len(elements)
        gram = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                gram[i, j] = pairing(elements[i], elements[j])
        return gram

    def strict_upper(self, coords: np.ndarray) -> int:
        """Σ_{i<j} n_i n_j ⟨e_i, e_j⟩."""
        outer = np.outer(coords, coords) * self.matrix
        return int(np.triu(outer, k=1).sum())


def _generator_values(
    curve: SpectralCurve, values: Sequence[complex], gamma: LatticeElement
) -> complex:
    total = 0j
    for i in range(len(curve.poles)):
        total += values[i] * (gamma.cycles[2 * i] - gamma.cycles[2 * i + 1])
    return total


def central_charge(
    curve: SpectralCurve, gamma: LatticeElement, extended: bool = False
) -> complex:
    """
    Z(γ) with Z(γ_{s±}) = ±2πi m_s.

    Args:
        curve: Curve providing the masses
        gamma: Lattice element
        extended: Extend Z by zero on the paths β_s

    Raises:
        UnsupportedClass: If gamma has a path part and extended is False
    """
    if gamma.poles != curve.poles:
        raise UnsupportedClass(f"{gamma!r} is not in the lattice of {curve.label.value}")
    if not extended and not gamma.is_cycle:
        raise UnsupportedClass(f"central charge of {gamma!r} needs the path extension")
    return TWO_PI_I * _generator_values(curve, curve.masses, gamma)


def nu_functional(
    curve: SpectralCurve, gamma: LatticeElement, extended: bool = False
) -> complex:
    """ν(γ) with ν(γ_{s±}) = ±ν_s; same contract as central_charge."""
    if gamma.poles != curve.poles:
        raise UnsupportedClass(f"{gamma!r} is not in the lattice of {curve.label.value}")
    if not extended and not gamma.is_cycle:
        raise UnsupportedClass(f"ν of {gamma!r} needs the path extension")
    return _generator_values(curve, curve.nus, gamma)


# -- refinements and twisted values -------------------------------------------


@dataclass(frozen=True)
class QuadraticRefinement:
    """
    Sign σ on the almost-doubled lattice.

    ``bits`` gives σ(e_i) = (−1)^{bits_i} on the reduced basis; other values
    follow from σ(μ₁ + μ₂) = (−1)^{⟨μ₁,μ₂⟩} σ(μ₁) σ(μ₂).
    """

    poles: tuple[str, ...]
    bits: tuple[int, ...]

    def exponent(self, mu: LatticeElement) -> int:
        coords = mu.coordinates()
        linear = int(np.dot(coords, np.asarray(self.bits, dtype=np.int64)))
        return (linear + PairingTable(self.poles).strict_upper(coords)) % 2

    def __call__(self, mu: LatticeElement) -> int:
        return -1 if self.exponent(mu) else 1

    def to_twisted(self) -> TwistedValue:
        return TwistedValue(self.poles, tuple(cmath.pi * 1j * b for b in self.bits))


def make_refinement(structure: BpsStructure) -> QuadraticRefinement:
    """
    Quadratic refinement with σ(γ) = −1 for Ω(γ) ≠ −1, σ(γ) = +1 for Ω(γ) = −1.

    Active classes are cycles, on which σ is a homomorphism to ±1, so the
    constraints form a linear system over GF(2). Free bits and all path bits
    are set to zero, which gives σ(β_s) = +1.

    Raises:
        Inconsistent: If the constraints admit no solution
    """
    poles = structure.curve.poles
    n = len(basis(poles))
    rows: list[np.ndarray] = []
    targets: list[int] = []
    for gamma, omega in structure.active:
        rows.append(np.mod(gamma.coordinates(), 2))
        targets.append(0 if omega == -1 else 1)

    bits = solve_gf2(rows, targets, n)
    if bits is None:
        raise Inconsistent(
            f"no quadratic refinement fits the spectrum of {structure.curve.label.value}"
        )
    log.debug("Refinement bits for %s: %s", structure.curve.label.value, bits)
    return QuadraticRefinement(poles, tuple(int(b) for b in bits))


def solve_gf2(
    rows: Iterable[np.ndarray], targets: Iterable[int], n: int
) -> np.ndarray | None:
    """Solve A b = t over GF(2); free variables are set to 0. None if inconsistent."""
    rows = [np.asarray(r, dtype=np.int64) % 2 for r in rows]
    targets = [int(t) % 2 for t in targets]
    if not rows:
        return np.zeros(n, dtype=np.int64)
    aug = np.column_stack([np.array(rows), np.array(targets)])
    pivots: list[int] = []
    r = 0
    for col in range(n):
        hits = np.nonzero(aug[r:, col])[0]
        if len(hits) == 0:
            continue
        p = r + int(hits[0])
        aug[[r, p]] = aug[[p, r]]
        for i in range(len(aug)):
            if i != r and aug[i, col]:
                aug[i] ^= aug[r]
        pivots.append(col)
        r += 1
        if r == len(aug):
            break
    if np.any((aug[r:, :n].sum(axis=1) == 0) & (aug[r:, n] == 1)):
        return None
    solution = np.zeros(n, dtype=np.int64)
    for i, col in enumerate(pivots):
        solution[col] = aug[i, n]
    return solution


@dataclass(frozen=True)
class TwistedValue:
    """
    Twisted homomorphism ξ on the almost-doubled lattice.

    Stored as log ξ(e_i) on the reduced basis. Then
    log ξ(Σ n_i e_i) = Σ n_i log ξ(e_i) + πi Σ_{i<j} n_i n_j ⟨e_i, e_j⟩.
    """

    poles: tuple[str, ...]
    log_values: tuple[complex, ...]

    @classmethod
    def trivial(cls, poles: Sequence[str]) -> TwistedValue:
        return cls(tuple(poles), tuple(0j for _ in basis(poles)))

    @classmethod
    def from_values(cls, poles: Sequence[str], values: Sequence[complex]) -> TwistedValue:
        return cls(tuple(poles), tuple(cmath.log(complex(v)) for v in values))

    def log_eval(self, mu: LatticeElement) -> complex:
        coords = mu.coordinates()
        linear = complex(np.dot(coords, np.asarray(self.log_values, dtype=complex)))
        return linear + 1j * math.pi * PairingTable(self.poles).strict_upper(coords)

    def __call__(self, mu: LatticeElement) -> complex:
        return cmath.exp(self.log_eval(mu))


def twisted_eval(xi: TwistedValue, mu: LatticeElement) -> complex:
    return xi(mu)


def xi_nu(curve: SpectralCurve, refinement: QuadraticRefinement) -> TwistedValue:
    """ξ_{Đ,ν}: σ(e) e^{πiν(e)} on cycles and 1 on the paths."""
    logs = []
    for e, bit in zip(basis(curve.poles), refinement.bits, strict=True):
        if e.is_cycle:
            logs.append(1j * math.pi * (bit + nu_functional(curve, e)))
        else:
            logs.append(0j)
    return TwistedValue(curve.poles, tuple(logs))


def xi_hol(curve: SpectralCurve) -> TwistedValue:
    return TwistedValue.trivial(curve.poles)
