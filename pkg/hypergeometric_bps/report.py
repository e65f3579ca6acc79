"""
Verification matrix behind ``hgbps report``.

Every check compares two independent routes to the same quantity: the BPS
closed forms against the per-curve Bernoulli formulas, the topological
recursion and the WKB recursion against the BPS sums, numerical Laplace
integrals against Λ products, and the Riemann-Hilbert solutions and
τ-functions against each other. Checks that do not apply to the configured
curve are reported as skipped, which counts as passing.

ħ values of the configuration are taken relative to the ray: the cell
(ϑ, h) is evaluated at ħ = h·e^{iϑ}, so |arg h| < π/2 is required.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TypeVar

from .bps import BpsStructure, bps_spectrum, classify_ray, random_generic_curve, wrap_angle
from .borel import (
    BOREL_LABELS,
    BorelContext,
    borel_sum_numeric,
    log_borel_sum_path_symbol,
    watson_residual,
)
from .config import CHECK_TOL, K_MAX, RunConfig
from .curves import ORACLE_LABELS, CurveLabel, SpectralCurve, build_parametrization, get_curve
from .errors import ConfigError, HgbpsError, NuOutOfStrip, ReportWriteError
from .lattice import LatticeElement, basis, make_refinement, xi_nu
from .rhp import (
    at_nu_star,
    fit_order,
    jump_check,
    log_kappa,
    log_rho,
    log_tau_hol,
    log_tau_min,
    log_tau_voros,
    log_tau_voros_asym,
    log_varkappa,
    log_varrho,
    log_x_hol,
    log_x_min,
    log_x_voros,
    rh2_residual,
    scale_invariance_residual,
    tau_defining_relation,
    tau_tr_check,
)
from .series import (
    NO_VOROS,
    closed_form_path_coeff,
    free_energy,
    voros_path_coeff,
    weber_difference_oracle,
)
from .templates import render_template
from .tr import tr_free_energy
from .utils import (
    make_rng,
    relative_error,
    validate_output_path,
    write_csv,
    write_file,
    write_json,
)
from .wkb import path_integrals, riccati_system

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

CLOSED_FORM_TOL = 1e-12
# tr-oracle and borel use tolerances.check_tol; the WKB quadrature loses one digit
WKB_TOL_FACTOR = 10
JUMP_TOL = 1e-11
RH2_TOL = 1e-6
WATSON_TOL = 1e-6
TAU_ASYMPTOTIC_TOL = 1e-6
COMPARISON_TOL = 1e-12
TAU_TOL = 1e-10
TAU_RELATION_TOL = 1e-6
FIT_TOL = 0.2
DIFFERENCE_TOL = 1e-12

CLOSED_FORM_DRAWS = 20
CLOSED_FORM_ORDER = 12
JUMP_DRAWS = 10
JUMP_SCALES = (0.05, 0.1, 0.2, 0.5, 1.0)
RH2_SCALES = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
# |ħ| in units of min |Z|/2π
ASYMPTOTIC_SCALES = (0.2, 0.1, 0.05)
WATSON_ORDER = 4
TAU_ASYMPTOTIC_ORDER = 6
WKB_ORDER = 8
DIFFERENCE_ORDER = 10
DIFFERENCE_DRAWS = 5
TAU_FIT_SCALES = (0.2, 0.16, 0.13, 0.1, 0.08)
TAU_FIT_GENERA = (2, 3)
SCALE_FACTOR = 1.5 * cmath.exp(0.1j)
MAX_LISTED_FAILURES = 25

TR_LABELS = (CurveLabel.Web, CurveLabel.Bes, CurveLabel.Whi, CurveLabel.Kum)
TAU_FIT_LABELS = (CurveLabel.Web, CurveLabel.Bes, CurveLabel.Leg)


# Z(γ)/2πi as a combination of masses, with Ω, for one orientation of each class
SPECTRUM_TABLE: dict[CurveLabel, list[tuple[dict[str, int], int]]] = {
    CurveLabel.HG: [
        ({"0": 1, "1": e1, "inf": e2}, 1)
        for e1 in (1, -1)
        for e2 in (1, -1)
    ]
    + [({s: 2}, -1) for s in ("0", "1", "inf")],
    CurveLabel.dHG: [({"1": 1, "inf": e}, 2) for e in (1, -1)]
    + [({s: 2}, -1) for s in ("1", "inf")],
    CurveLabel.Kum: [({"0": 1, "inf": e}, 1) for e in (1, -1)] + [({"0": 2}, -1)],
    CurveLabel.Leg: [({"inf": 1}, 4), ({"inf": 2}, -1)],
    CurveLabel.Bes: [({"0": 2}, -1)],
    CurveLabel.Whi: [({"inf": 1}, 2)],
    CurveLabel.Web: [({"inf": 1}, 1)],
    CurveLabel.Deg3_14: [({"inf": 1}, 1)],
}


@dataclass
class CheckResult:
    """Outcome of one row of the verification matrix."""

    name: str
    description: str
    tolerance: float
    cases: int = 0
    max_residual: float = 0.0
    failure_count: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)
    skipped: str | None = None
    omitted: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def record(self, residual: float, case: dict[str, Any]) -> None:
        residual = float(residual)
        self.cases += 1
        if math.isnan(residual) or residual > self.max_residual:
            self.max_residual = residual
        if not residual <= self.tolerance:
            self._fail({"case": case, "residual": residual})

    def fail(self, case: dict[str, Any], message: str) -> None:
        self.cases += 1
        self._fail({"case": case, "error": message})

    def _fail(self, entry: dict[str, Any]) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_LISTED_FAILURES:
            self.failures.append({"check": self.name, **entry})

    def skip(self, reason: str) -> CheckResult:
        self.skipped = reason
        return self

    def omit(self, reason: str) -> None:
        """Note a part of the row that does not apply; the rest still runs."""
        if reason not in self.omitted:
            self.omitted.append(reason)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "tolerance": self.tolerance,
            "cases": self.cases,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "skipped": self.skipped,
            "omitted": self.omitted,
            "failure_count": self.failure_count,
            "failures": self.failures,
        }


@dataclass
class VerificationReport:
    curve: SpectralCurve
    seed: int
    checks: list[CheckResult]
    ray_rows: list[tuple] = field(default_factory=list)
    borel_rows: list[tuple] = field(default_factory=list)
    tau_rows: list[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[dict[str, Any]]:
        return [entry for check in self.checks for entry in check.failures]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "curve": self.curve,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "failures": self.failures,
        }


# -- helpers ------------------------------------------------------------------------


def _parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    """Ordered map over a bounded thread pool."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _log_ratio_residual(lhs: complex, rhs: complex) -> float:
    """|e^{lhs − rhs} − 1|, insensitive to 2πi ambiguities of the logs."""
    return abs(cmath.exp(lhs - rhs) - 1)


def sample_rays(structure: BpsStructure, thetas: Sequence[float]) -> list[float]:
    """
    The configured angles that are not BPS rays, or else the bisectors of
    consecutive BPS rays.
    """
    rays = [wrap_angle(t) for t in thetas if not classify_ray(structure, t).is_bps]
    if rays:
        return rays
    angles = [ray.angle for ray in structure.rays()]
    if not angles:
        return [0.0]
    fallback = []
    for a, b in zip(angles, angles[1:] + angles[:1]):
        gap = wrap_angle(b - a) or 2 * math.pi
        fallback.append(wrap_angle(a + gap / 2))
    log.debug("No configured angle is usable; bisectors %s", fallback)
    return fallback


def cells(rays: Sequence[float], hbars: Sequence[complex]) -> list[tuple[float, complex]]:
    """(ϑ, ħ) pairs with ħ = h·e^{iϑ} for every configured h."""
    for h in hbars:
        if h == 0 or abs(cmath.phase(h)) >= math.pi / 2:
            raise ConfigError(f"report ħ values need |arg ħ| < π/2, got {h}")
    return [(theta, complex(h) * cmath.exp(1j * theta)) for theta in rays for h in hbars]


def _pole_betas(curve: SpectralCurve) -> list[tuple[str, LatticeElement]]:
    return [(s, LatticeElement.beta(curve.poles, s)) for s in curve.poles]


def _case(theta: float | None = None, hbar: complex | None = None, **extra: Any) -> dict:
    case: dict[str, Any] = dict(extra)
    if theta is not None:
        case["theta"] = theta
    if hbar is not None:
        case["hbar"] = hbar
    return case


def _record_decreasing(
    result: CheckResult, residuals: Sequence[float], case: dict[str, Any], slack: float
) -> None:
    """Fail unless the residuals shrink along the ħ sequence; record the last one."""
    if any(b > a * (1 + 1e-3) + slack for a, b in zip(residuals, residuals[1:])):
        result.fail({**case, "residuals": list(residuals)}, "residual does not decrease")
    else:
        result.record(residuals[-1], case)


def _hbar_unit(structure: BpsStructure) -> float:
    """min |Z(γ)|/2π over the active classes, so that |w| = 1/r at |ħ| = r·unit."""
    charges = [abs(structure.central_charge(c.gamma)) for c in structure.active]
    return min(charges) / (2 * math.pi) if charges else 1.0


# -- the checks ---------------------------------------------------------------------


def check_spectrum(curve: SpectralCurve) -> tuple[CheckResult, list[tuple]]:
    """Active classes, Z/2πi and Ω against the catalog table, plus the ray data."""
    result = CheckResult("spectrum", "active classes, central charges and indices", 1e-12)
    structure = bps_spectrum(curve)
    table = SPECTRUM_TABLE.get(curve.label, [])
    expected = [(coeffs, omega, sign) for coeffs, omega in table for sign in (1, -1)]
    unmatched = list(structure.active)
    for coeffs, omega, sign in expected:
        target = sign * sum(n * curve.mass(s) for s, n in coeffs.items())
        match = next(
            (
                c
                for c in unmatched
                if c.omega == omega
                and abs(structure.central_charge(c.gamma) / (2j * math.pi) - target)
                <= 1e-12 * max(1.0, abs(target))
            ),
            None,
        )
        case = {"z_over_2pi_i": coeffs, "orientation": sign, "omega": omega}
        if match is None:
            result.fail(case, "no active class with this central charge and index")
        else:
            unmatched.remove(match)
            result.record(0.0, case)
    for c in unmatched:
        result.fail({"class": c.gamma.label()}, "active class missing from the table")
    for c in structure.active:
        if structure.omega(-c.gamma) != c.omega:
            result.fail({"class": c.gamma.label()}, "Ω(−γ) differs from Ω(γ)")
    if not structure.is_uncoupled():
        result.fail({}, "spectrum is not uncoupled")

    rows = [
        (c.gamma.label(), c.omega, abs(structure.central_charge(c.gamma)), structure.arg(c.gamma))
        for c in sorted(structure.active, key=lambda c: structure.arg(c.gamma))
    ]
    return result, rows


def check_closed_forms(
    label: CurveLabel, seed: int, workers: int = 1, k_max: int = K_MAX
) -> CheckResult:
    """BPS sum for V_{β_s,k} against the per-curve Bernoulli formulas at random parameters."""
    result = CheckResult(
        "closed-forms", "Voros coefficients from BPS data vs per-curve formulas", CLOSED_FORM_TOL
    )
    if label in NO_VOROS or label.experimental:
        return result.skip(f"no per-curve formulas for {label.value}")
    rng = make_rng(seed)
    draws = [random_generic_curve(label, rng) for _ in range(CLOSED_FORM_DRAWS)]
    order = min(CLOSED_FORM_ORDER, k_max - 1)

    def run(curve: SpectralCurve) -> list[tuple[dict, float]]:
        out = []
        for s, beta in _pole_betas(curve):
            for k in range(1, order + 1):
                value = voros_path_coeff(curve, beta, k, k_max=k_max)
                expected = closed_form_path_coeff(curve, s, k, k_max)
                out.append(({"m": curve.m, "nu": curve.nu, "pole": s, "k": k},
                            relative_error(value, expected)))
        return out

    for outcome in _parallel_map(run, draws, workers):
        for case, residual in outcome:
            result.record(residual, case)
    return result


def check_tr(curve: SpectralCurve, tol: float = CHECK_TOL) -> CheckResult:
    """F_2 and F_3 from the recursion against the BPS closed forms."""
    result = CheckResult("tr-oracle", "topological recursion F_g vs BPS sums", tol)
    if curve.label not in TR_LABELS:
        return result.skip(f"recursion oracle runs on {', '.join(c.value for c in TR_LABELS)}")
    param = build_parametrization(curve)
    for g in (2, 3):
        try:
            oracle = tr_free_energy(param, g)
        except HgbpsError as e:
            result.fail({"g": g}, str(e))
            continue
        result.record(relative_error(oracle, free_energy(curve, g)), {"g": g})
    return result


def check_wkb(
    curve: SpectralCurve, quad_tol: float, workers: int = 1, tol: float = CHECK_TOL
) -> CheckResult:
    """Path integrals of the Riccati odd forms against the BPS sums."""
    result = CheckResult(
        "wkb-oracle", "WKB path integrals vs Voros coefficients", WKB_TOL_FACTOR * tol
    )
    if curve.label not in ORACLE_LABELS:
        return result.skip(f"WKB oracle runs on {', '.join(c.value for c in ORACLE_LABELS)}")
    system = riccati_system(curve, WKB_ORDER)

    def run(pole: tuple[str, LatticeElement]):
        s, beta = pole
        try:
            return s, beta, path_integrals(system, s, quad_tol=quad_tol), None
        except HgbpsError as e:
            return s, beta, None, str(e)

    for s, beta, integrals, error in _parallel_map(run, _pole_betas(curve), workers):
        if error is not None:
            result.fail({"pole": s}, error)
            continue
        for k in range(1, WKB_ORDER + 1):
            expected = voros_path_coeff(curve, beta, k)
            result.record(relative_error(integrals[k - 1], expected), {"pole": s, "k": k})
    return result


def check_borel(
    curve: SpectralCurve,
    grid: Sequence[tuple[float, complex]],
    quad_tol: float,
    workers: int = 1,
    tol: float = CHECK_TOL,
) -> tuple[CheckResult, list[tuple]]:
    """Laplace quadrature of the Borel transform against the Λ products."""
    result = CheckResult("borel", "Laplace integral vs Λ closed form", tol)
    if curve.label not in BOREL_LABELS:
        return result.skip(
            f"closed Borel transforms exist for {', '.join(c.value for c in BOREL_LABELS)}"
        ), []

    def run(cell: tuple[float, complex]):
        theta, hbar = cell
        try:
            ctx = BorelContext.create(curve, theta, (hbar,))
            residuals = [
                abs(
                    borel_sum_numeric(ctx, beta, hbar, quad_tol)
                    - log_borel_sum_path_symbol(ctx, beta, hbar)
                )
                for _, beta in _pole_betas(curve)
            ]
            return theta, hbar, max(residuals), None
        except HgbpsError as e:
            return theta, hbar, math.nan, str(e)

    rows = []
    for theta, hbar, residual, error in _parallel_map(run, list(grid), workers):
        if error is not None:
            result.fail(_case(theta, hbar), error)
        else:
            result.record(residual, _case(theta, hbar))
        rows.append((theta, hbar.real, hbar.imag, residual))
    return result, rows


def jump_sectors(structure: BpsStructure) -> list[tuple[float, float]]:
    """(ray angle, half-width) for every BPS ray; sectors stay clear of neighbouring rays."""
    angles = [ray.angle for ray in structure.rays()]
    out = []
    for i, angle in enumerate(angles):
        if len(angles) == 1:
            gap = math.pi
        else:
            gap = min(
                wrap_angle(angle - angles[i - 1]),
                wrap_angle(angles[(i + 1) % len(angles)] - angle),
            )
        out.append((angle, min(gap / 3, math.pi / 4)))
    return out


def _jump_cases(curve: SpectralCurve) -> list[tuple[SpectralCurve, float, float, float]]:
    """(curve, ray, half-width, |ħ|) for every BPS ray of the curve."""
    return [
        (curve, angle, delta, r)
        for angle, delta in jump_sectors(bps_spectrum(curve))
        for r in JUMP_SCALES
    ]


def check_jumps(curve: SpectralCurve, seed: int, workers: int = 1) -> CheckResult:
    """Jump of the Voros solution across every BPS ray, at random parameters too."""
    result = CheckResult("rh1-jump", "jump of X^Vor across each BPS ray", JUMP_TOL)
    if bps_spectrum(curve).is_empty:
        return result
    rng = make_rng(seed + 1)
    draws = [curve] + [random_generic_curve(curve.label, rng) for _ in range(JUMP_DRAWS - 1)]
    jobs = [job for draw in draws for job in _jump_cases(draw)]

    def run(job):
        draw, angle, delta, r = job
        hbar = r * cmath.exp(1j * angle)
        try:
            worst = max(
                jump_check(draw, mu, angle - delta, angle + delta, hbar)
                for mu in basis(draw.poles)
            )
            return worst, None
        except HgbpsError as e:
            return math.nan, str(e)

    for job, (residual, error) in zip(jobs, _parallel_map(run, jobs, workers)):
        draw, angle, _, r = job
        case = {"m": draw.m, "nu": draw.nu, "ray": angle, "hbar_abs": r}
        if error is not None:
            result.fail(case, error)
        else:
            result.record(residual, case)
    return result


def check_rh2(curve: SpectralCurve, rays: Sequence[float]) -> CheckResult:
    """|X e^{Z/ħ}/ξ − 1| along ħ → 0 on every sample ray and basis element."""
    result = CheckResult("rh2-asymptotics", "X^Vor e^{Z/ħ}/ξ → 1 as ħ → 0", RH2_TOL)
    for theta in rays:
        for mu in basis(curve.poles):
            case = _case(theta, mu=mu.label())
            try:
                residuals = [
                    rh2_residual(curve, mu, theta, r * cmath.exp(1j * theta)) for r in RH2_SCALES
                ]
            except HgbpsError as e:
                result.fail(case, str(e))
                continue
            _record_decreasing(result, residuals, case, slack=1e-9)
    return result


def check_watson(curve: SpectralCurve, rays: Sequence[float]) -> CheckResult:
    """The Borel sum of e^{V_β} against its truncated formal series as ħ → 0."""
    result = CheckResult("watson", "𝒮_ℓ e^{V_β} vs e^{V_β} truncated at order 4", WATSON_TOL)
    if curve.label in NO_VOROS or curve.label.experimental:
        return result.skip(f"no Borel-summed Voros symbols for {curve.label.value}")
    unit = _hbar_unit(bps_spectrum(curve))
    for theta in rays:
        for s, beta in _pole_betas(curve):
            case = _case(theta, pole=s)
            try:
                ctx = BorelContext.create(curve, theta)
                residuals = [
                    watson_residual(ctx, beta, r * unit * cmath.exp(1j * theta), WATSON_ORDER)
                    for r in ASYMPTOTIC_SCALES
                ]
            except HgbpsError as e:
                result.fail(case, str(e))
                continue
            _record_decreasing(result, residuals, case, slack=1e-12)
    return result


def check_tau_asymptotics(curve: SpectralCurve, rays: Sequence[float]) -> CheckResult:
    """The closed form of log τ^Vor against its asymptotic expansion as ħ → 0."""
    result = CheckResult(
        "tau-asymptotics", "log τ^Vor vs its expansion to order 6", TAU_ASYMPTOTIC_TOL
    )
    structure = bps_spectrum(curve)
    if structure.is_empty:
        return result.skip(f"{curve.label.value} has no active classes")
    unit = _hbar_unit(structure)
    for theta in rays:
        case = _case(theta)
        try:
            residuals = []
            for r in ASYMPTOTIC_SCALES:
                hbar = r * unit * cmath.exp(1j * theta)
                residuals.append(
                    _log_ratio_residual(
                        log_tau_voros(curve, theta, hbar),
                        log_tau_voros_asym(curve, theta, hbar, TAU_ASYMPTOTIC_ORDER),
                    )
                )
        except HgbpsError as e:
            result.fail(case, str(e))
            continue
        _record_decreasing(result, residuals, case, slack=1e-12)
    return result


def check_comparisons(
    curve: SpectralCurve, grid: Sequence[tuple[float, complex]], chosen_pole: str | None
) -> CheckResult:
    """X^Vor = ρ X^min, X^Vor|_{ν*} = ϱ X^hol and ρ ≡ 1 at ν = 0."""
    result = CheckResult("solution-comparison", "X^Vor vs ρ·X^min and ϱ·X^hol", COMPARISON_TOL)
    structure = bps_spectrum(curve)
    xi = xi_nu(curve, make_refinement(structure))
    star = at_nu_star(curve, chosen_pole)
    flat = curve.with_nu(tuple(0j for _ in curve.poles))
    for theta, hbar in grid:
        for mu in basis(curve.poles):
            case = _case(theta, hbar, mu=mu.label())
            try:
                try:
                    lhs = log_x_voros(curve, mu, theta, hbar)
                    rhs = log_rho(curve, mu, theta, hbar) + log_x_min(curve, mu, xi, theta, hbar)
                    result.record(_log_ratio_residual(lhs, rhs), {**case, "factor": "rho"})
                except NuOutOfStrip as e:
                    log.debug("ρ comparison skipped: %s", e)
                    result.omit(f"ρ comparison: {e}")
                lhs = log_x_voros(star, mu, theta, hbar)
                rhs = log_varrho(curve, mu, theta, hbar, chosen_pole) + log_x_hol(
                    star, mu, theta, hbar
                )
                result.record(_log_ratio_residual(lhs, rhs), {**case, "factor": "varrho"})
                result.record(
                    abs(cmath.exp(log_rho(flat, mu, theta, hbar)) - 1),
                    {**case, "factor": "rho at nu = 0"},
                )
            except HgbpsError as e:
                result.fail(case, str(e))
    return result


def check_tau_identities(
    curve: SpectralCurve, grid: Sequence[tuple[float, complex]], chosen_pole: str | None
) -> CheckResult:
    """τ^Vor = κ τ^min, τ^Vor|_{ν*} = ϰ τ^hol and invariance under (m, ħ) → (λm, λħ)."""
    result = CheckResult("tau-identities", "τ^Vor vs κ·τ^min, ϰ·τ^hol, scaling", TAU_TOL)
    structure = bps_spectrum(curve)
    xi = xi_nu(curve, make_refinement(structure))
    star = at_nu_star(curve, chosen_pole)
    for theta, hbar in grid:
        case = _case(theta, hbar)
        try:
            try:
                lhs = log_tau_voros(curve, theta, hbar)
                rhs = log_kappa(curve, theta, hbar) + log_tau_min(curve, xi, theta, hbar)
                result.record(_log_ratio_residual(lhs, rhs), {**case, "factor": "kappa"})
            except NuOutOfStrip as e:
                log.debug("κ comparison skipped: %s", e)
                result.omit(f"κ comparison: {e}")
            lhs = log_tau_voros(star, theta, hbar)
            rhs = log_varkappa(curve, theta, hbar, chosen_pole) + log_tau_hol(star, theta, hbar)
            result.record(_log_ratio_residual(lhs, rhs), {**case, "factor": "varkappa"})
            if not structure.is_empty:
                result.record(
                    scale_invariance_residual(curve, theta, hbar, SCALE_FACTOR),
                    {**case, "factor": "scaling"},
                )
        except HgbpsError as e:
            result.fail(case, str(e))
    return result


def check_tau_relation(
    curve: SpectralCurve, grid: Sequence[tuple[float, complex]]
) -> CheckResult:
    """∂_{m_s} log τ^Vor = −∂_ħ log X^Vor_{β_s} by central differences."""
    result = CheckResult(
        "tau-defining-relation", "∂_m log τ^Vor + ∂_ħ log X^Vor_β = 0", TAU_RELATION_TOL
    )
    if curve.label in NO_VOROS:
        return result.skip(f"{curve.label.value} has no path Voros symbols")
    for theta, hbar in grid:
        for s in curve.poles:
            case = _case(theta, hbar, pole=s)
            try:
                result.record(tau_defining_relation(curve, s, theta, hbar), case)
            except HgbpsError as e:
                result.fail(case, str(e))
    return result


def check_tau_tr(curve: SpectralCurve, rays: Sequence[float]) -> tuple[CheckResult, list[tuple]]:
    """Fitted order of |log τ^hol − Σ_{g≤G} ħ^{2g−2} F_g| in ħ, expected 2G."""
    result = CheckResult("tau-hol-vs-tr", "order of log τ^hol − truncated F_TR", FIT_TOL)
    if curve.label not in TAU_FIT_LABELS:
        return result.skip(f"fit runs on {', '.join(c.value for c in TAU_FIT_LABELS)}"), []
    theta = rays[0]
    rows = []
    for genus in TAU_FIT_GENERA:
        hbars = [r * cmath.exp(1j * theta) for r in TAU_FIT_SCALES]
        try:
            residuals = [tau_tr_check(curve, theta, h, genus) for h in hbars]
        except HgbpsError as e:
            result.fail({"G": genus}, str(e))
            continue
        rows.extend((genus, r, res) for r, res in zip(TAU_FIT_SCALES, residuals))
        slope = fit_order(hbars, residuals)
        result.record(abs(slope - 2 * genus), {"G": genus, "slope": slope})
    return result, rows


def check_difference(curve: SpectralCurve, seed: int, k_max: int = K_MAX) -> CheckResult:
    """Weber Voros coefficients against the difference of free energies."""
    result = CheckResult(
        "difference-equation", "Weber V_{β∞,k} vs F(m + c₊ħ) − F(m + c₋ħ)", DIFFERENCE_TOL
    )
    if curve.label is not CurveLabel.Web:
        return result.skip("the difference equation is checked on the Weber curve")
    rng = make_rng(seed + 2)
    draws = [curve] + [random_generic_curve(CurveLabel.Web, rng) for _ in range(DIFFERENCE_DRAWS)]
    for draw in draws:
        beta = LatticeElement.beta(draw.poles, "inf")
        m, nu = draw.mass("inf"), draw.nu_of("inf")
        for k in range(1, min(DIFFERENCE_ORDER, k_max - 1) + 1):
            result.record(
                relative_error(
                    weber_difference_oracle(k, m, nu), voros_path_coeff(draw, beta, k, k_max=k_max)
                ),
                {"m": m, "nu": nu, "k": k},
            )
    return result


# -- driver -----------------------------------------------------------------------


def run_report(config: RunConfig) -> VerificationReport:
    """
    Run the verification matrix for the configured curve.

    Raises:
        ConfigError: If the curve parameters or ħ values are invalid
    """
    curve = get_curve(config.curve, config.m, config.nu)
    structure = bps_spectrum(curve, config.tolerances.tol_angle)
    rays = sample_rays(structure, config.thetas)
    grid = cells(rays, config.hbars)
    workers = config.workers
    tolerances = config.tolerances
    quad_tol = tolerances.quad_tol
    log.debug("Report for %s: rays %s, %d cells, %d workers", curve.label.value, rays, len(grid), workers)

    spectrum, ray_rows = check_spectrum(curve)
    borel, borel_rows = check_borel(curve, grid, quad_tol, workers, tolerances.check_tol)
    tau_fit, tau_rows = check_tau_tr(curve, rays)
    checks = [
        spectrum,
        check_closed_forms(curve.label, config.seed, workers, tolerances.k_max),
        check_tr(curve, tolerances.check_tol),
        check_wkb(curve, quad_tol, workers, tolerances.check_tol),
        borel,
        check_watson(curve, rays),
        check_jumps(curve, config.seed, workers),
        check_rh2(curve, rays),
        check_comparisons(curve, grid, config.chosen_pole),
        check_tau_identities(curve, grid, config.chosen_pole),
        check_tau_asymptotics(curve, rays),
        check_tau_relation(curve, grid),
        tau_fit,
        check_difference(curve, config.seed, tolerances.k_max),
    ]
    for check in checks:
        log.debug(
            "%s: %s (%d cases, max residual %.3g)",
            check.name,
            "skipped" if check.skipped else ("passed" if check.passed else "FAILED"),
            check.cases,
            check.max_residual,
        )
    return VerificationReport(curve, config.seed, checks, ray_rows, borel_rows, tau_rows)


def prepare_template_context(report: VerificationReport) -> dict[str, Any]:
    """
    Prepare the context dictionary for rendering report.md.

    Args:
        report: A finished verification report

    Returns:
        Dictionary with context variables for template rendering
    """
    curve = report.curve
    return {
        "curve": {
            "label": curve.label.value,
            "equation": curve.equation,
            "m": curve.m,
            "nu": curve.nu,
        },
        "seed": report.seed,
        "passed": report.passed,
        "checks": [c.to_dict() for c in report.checks],
        "failures": report.failures,
        "rays": report.ray_rows,
        "tau_rows": report.tau_rows,
        "skipped_count": sum(1 for c in report.checks if c.skipped),
        "failed_count": sum(1 for c in report.checks if not c.passed),
    }


def write_report(report: VerificationReport, output_dir: Path) -> list[Path]:
    """
    Write report.json, report.md and the CSV data files.

    Returns:
        The paths written

    Raises:
        ConfigError: If the output directory is not usable
        ReportWriteError: If the template cannot be rendered or a file cannot be written
    """
    output_dir = Path(output_dir)
    if not validate_output_path(output_dir):
        raise ConfigError(f"Invalid output directory: {output_dir}")

    rendered = render_template("report", prepare_template_context(report))
    if rendered is None:
        raise ReportWriteError("Failed to render template: report")

    files = {
        "report.json": lambda p: write_json(p, report.to_dict()),
        "report.md": lambda p: write_file(p, rendered),
        "rays.csv": lambda p: write_csv(p, ("class", "omega", "abs_Z", "arg_Z"), report.ray_rows),
        "borel_residuals.csv": lambda p: write_csv(
            p, ("theta", "hbar_re", "hbar_im", "residual"), report.borel_rows
        ),
        "tau_fit.csv": lambda p: write_csv(p, ("G", "hbar_abs", "residual"), report.tau_rows),
    }
    written = []
    for name, writer in files.items():
        path = output_dir / name
        if not writer(path):
            raise ReportWriteError(f"Failed to write {path}")
        written.append(path)
    return written


def generate_report(config: RunConfig, output_dir: Path | None = None) -> VerificationReport:
    """Run the matrix and write its artifacts into output_dir (config.output_dir by default)."""
    report = run_report(config)
    write_report(report, output_dir or config.output_dir)
    return report

