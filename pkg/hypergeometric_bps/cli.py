"""
CLI interface for hypergeometric-bps.

This module provides the ``hgbps`` command-line interface using typer. Every
subcommand builds a RunConfig from the optional configuration file and its
flags, runs one computation and prints JSON, either to stdout or to the file
given with ``--output``.
"""

import cmath
import traceback
from pathlib import Path
from typing import Any, Optional

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel
from rich.syntax import Syntax
from rich.table import Table

from . import __version__
from .borel import BOREL_LABELS, BorelContext, borel_sum_numeric, log_borel_sum_path_symbol
from .bps import bps_spectrum, is_generic
from .config import RunConfig, load_config
from .curves import ORACLE_LABELS, SpectralCurve, build_parametrization, get_curve
from .errors import (
    ConfigError,
    HgbpsError,
    OrderTooLarge,
    Unsupported,
    UnsupportedClass,
)
from .lattice import LatticeElement, basis
from .report import (
    JUMP_TOL,
    WKB_TOL_FACTOR,
    generate_report,
    jump_sectors,
)
from .rhp import (
    RhpSolution,
    SolutionKind,
    comparison_factors,
    jump_check,
    log_tau_hol,
    log_tau_min,
    log_tau_voros,
    tau_defining_relation,
)
from .series import (
    closed_form_path_coeff,
    free_energy,
    tr_free_energy_sum,
    voros_cycle,
    voros_path_series,
)
from .tr import tr_free_energy
from .utils import configure_logging, dumps, parse_complex, write_file
from .wkb import MAX_ORDER, path_integrals, riccati_system

app = typer.Typer(
    help="BPS structures, Voros symbols and topological recursion for curves of "
    "hypergeometric type",
    rich_markup_mode="rich",
)

console = Console()
err_console = Console(stderr=True)

CURVE_HELP = "Curve label: HG, dHG, Kum, Leg, Bes, Whi, Web, dBes, Ai, Deg3_14, Deg3_23"
M_HELP = "Masses in pole order (\"1,2,3\") or by pole (\"0=1,inf=2\")"
NU_HELP = "Quantization parameters ν, same format as --m (default 0)"


def handle_error(error: Exception, context: str = "operation", verbose: bool = False):
    """Handle errors with clear, user-friendly messages and the matching exit code."""
    error_type = type(error).__name__

    if isinstance(error, ConfigError):
        err_console.print(f"[red]❌ Configuration Error:[/red] {error}")
        err_console.print(f"💡 {error.hint}")
    elif isinstance(error, HgbpsError):
        err_console.print(f"[red]❌ {context.title()} Failed:[/red] {error}")
        err_console.print(f"💡 {error.hint or 'The inputs are outside the domain of this operation'}")
    elif isinstance(error, PermissionError):
        err_console.print("[red]❌ Permission Error:[/red] Cannot write to output file")
        err_console.print("💡 Check file permissions and try again")
    else:
        err_console.print(f"[red]❌ {context.title()} Failed:[/red] {error}")
        err_console.print(f"💡 {context} could not be completed due to an unexpected error")

    err_console.print("\n🔧 Debug Info:")
    err_console.print(f"   Error Type: {error_type}")
    err_console.print(f"   Context: {context}")

    if verbose:
        err_console.print("\n🐛 Full Traceback:")
        err_console.print(Syntax(traceback.format_exc(), "python", theme="monokai"))

    raise typer.Exit(code=2 if isinstance(error, ConfigError) else 1)


# -- shared plumbing -------------------------------------------------------------


def _state(ctx: typer.Context) -> dict[str, Any]:
    return ctx.ensure_object(dict)


def _parameter_values(raw: Optional[str]) -> Any:
    """'1,2' stays a list string for the curve parser; '0=1,inf=2' becomes a mapping."""
    if raw is None or "=" not in raw:
        return raw
    values = {}
    for item in raw.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"Mix of keyed and positional values in {raw!r}")
        values[key.strip()] = value.strip()
    return values


def _config(
    ctx: typer.Context,
    curve: Optional[str] = None,
    m: Optional[str] = None,
    nu: Optional[str] = None,
    **overrides: Any,
) -> RunConfig:
    state = _state(ctx)
    base = load_config(state.get("config"))
    return base.with_overrides(
        curve=curve, m=_parameter_values(m), nu=_parameter_values(nu), **overrides
    )


def _curve(config: RunConfig) -> SpectralCurve:
    return get_curve(config.curve, config.m, config.nu)


def _hbar(value: Optional[str]) -> Optional[tuple[complex, ...]]:
    return None if value is None else (parse_complex(value),)


def _theta(value: Optional[float]) -> Optional[tuple[float, ...]]:
    return None if value is None else (value,)


def _elements(curve: SpectralCurve, text: Optional[str]) -> list[LatticeElement]:
    if text is None:
        return list(basis(curve.poles))
    return [LatticeElement.parse(curve.poles, text)]


def _paths(curve: SpectralCurve, text: Optional[str]) -> list[LatticeElement]:
    if text is None:
        return [LatticeElement.beta(curve.poles, s) for s in curve.poles]
    return [LatticeElement.parse(curve.poles, text)]


def _emit(ctx: typer.Context, data: Any) -> None:
    """Print JSON to stdout or write it to --output."""
    text = dumps(data)
    output: Optional[Path] = _state(ctx).get("output")
    if output is None:
        typer.echo(text, nl=False)
        return
    if not write_file(output, text):
        raise typer.Exit(code=1)
    err_console.print(f"[green]✅ Results written[/green] 📁 {output.absolute()}")


def _finish(ctx: typer.Context, data: dict[str, Any], failures: list[dict[str, Any]]) -> None:
    """Emit one JSON document; a non-empty failure list goes into it and exits 1."""
    if failures:
        data = {**data, "failures": failures}
    _emit(ctx, data)
    if failures:
        raise typer.Exit(code=1)


def _run(ctx: typer.Context, context: str, body) -> tuple[Any, list[dict[str, Any]]]:
    try:
        return body()
    except (HgbpsError, ValueError, OSError) as e:
        handle_error(e, context, _state(ctx).get("verbose", False))


# -- commands ----------------------------------------------------------------------


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="YAML or JSON configuration file; flags override it"
    ),
    output: Optional[Path] = typer.Option(
        None, "--output", "-o", help="Write the JSON result to this file instead of stdout"
    ),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Debug logging and full tracebacks"
    ),
):
    """Verification engine for BPS structures of curves of hypergeometric type."""
    configure_logging(verbose)
    state = _state(ctx)
    state.update(config=config, output=output, verbose=verbose)


@app.command()
def version():
    """Show the package version."""
    typer.echo(__version__)


@app.command()
def spectrum(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
):
    """Active classes, central charges, BPS indices and rays."""

    def body():
        config = _config(ctx, curve, m, nu)
        c = _curve(config)
        structure = bps_spectrum(c, config.tolerances.tol_angle)
        return {**structure.to_dict(), "genericity": is_generic(c)}, []

    _finish(ctx, *_run(ctx, "spectrum", body))


@app.command()
def voros(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    beta: Optional[str] = typer.Option(
        None, "--beta", help="Path class, e.g. \"binf\" or \"b0, -b1\" (default: every β_s)"
    ),
    order: Optional[int] = typer.Option(None, "--order", "-k", help="Truncation order K (default 8)"),
    theta: Optional[float] = typer.Option(
        None, "--theta", help="Half-plane angle for the BPS sum (default: automatic)"
    ),
):
    """Path and cycle Voros coefficients as formal series in ħ."""

    def body():
        config = _config(ctx, curve, m, nu, order=order)
        c = _curve(config)
        paths = []
        for element in _paths(c, beta):
            series = voros_path_series(
                c, element, config.order, theta, config.tolerances.k_max
            )
            entry: dict[str, Any] = {"beta": element, "label": element.label(), "series": series}
            single = [s for s in c.poles if LatticeElement.beta(c.poles, s) == element]
            if single:
                s = single[0]
                try:
                    entry["closed_form"] = [
                        closed_form_path_coeff(c, s, k, config.tolerances.k_max)
                        for k in range(1, config.order + 1)
                    ]
                except Unsupported:
                    entry["closed_form"] = None
            paths.append(entry)
        cycles = [
            {"gamma": cls.gamma, "label": cls.gamma.label(), "series": voros_cycle(c, cls.gamma)}
            for cls in bps_spectrum(c).active
        ]
        return {"curve": c, "order": config.order, "paths": paths, "cycles": cycles}, []

    _finish(ctx, *_run(ctx, "voros", body))


@app.command("free-energy")
def free_energy_command(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    genus: Optional[int] = typer.Option(None, "--genus", "-g", help="Largest genus G (default 3)"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Half-plane angle"),
    hbar: Optional[str] = typer.Option(
        None, "--hbar", help="ħ for F_1 and the partial sum, e.g. \"0.1+0.05i\""
    ),
):
    """Free energies F_g from the BPS data."""

    def body():
        config = _config(ctx, curve, m, None, genus=genus)
        c = _curve(config)
        data: dict[str, Any] = {
            "curve": c,
            "F": {str(g): free_energy(c, g, theta) for g in range(2, config.genus + 1)},
        }
        data["F"]["0"] = free_energy(c, 0, theta)
        if hbar is not None:
            h = parse_complex(hbar)
            data["F"]["1"] = free_energy(c, 1, theta, h)
            data["hbar"] = h
            data["partial_sum"] = tr_free_energy_sum(c, theta, h, config.genus)
        return data, []

    _finish(ctx, *_run(ctx, "free energy", body))


@app.command("borel-sum")
def borel_sum(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    beta: Optional[str] = typer.Option(None, "--beta", help="Path class (default: every β_s)"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Non-BPS ray angle (default 0)"),
    hbar: Optional[str] = typer.Option(None, "--hbar", help="ħ in the half-plane of the ray (default 0.1)"),
):
    """Borel sums of path Voros symbols, with the Laplace integral where available."""

    def body():
        config = _config(ctx, curve, m, nu, thetas=_theta(theta), hbars=_hbar(hbar))
        c = _curve(config)
        t, h = config.thetas[0], config.hbars[0]
        ctx_borel = BorelContext.create(c, t, (h,))
        results, failures = [], []
        for element in _paths(c, beta):
            log_value = log_borel_sum_path_symbol(ctx_borel, element, h)
            entry: dict[str, Any] = {"beta": element, "label": element.label(), "log_sum": log_value}
            if c.label in BOREL_LABELS:
                numeric = borel_sum_numeric(ctx_borel, element, h, config.tolerances.quad_tol)
                entry["laplace"] = numeric
                entry["abs_diff"] = abs(numeric - log_value)
                if entry["abs_diff"] > config.tolerances.check_tol:
                    failures.append({"check": "borel", "beta": element.label(), "residual": entry["abs_diff"]})
            results.append(entry)
        return {"curve": c, "theta": t, "hbar": h, "results": results}, failures

    _finish(ctx, *_run(ctx, "Borel summation", body))


@app.command("rhp-eval")
def rhp_eval(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    mu: Optional[str] = typer.Option(
        None, "--mu", help="Lattice element, e.g. \"0+\" or \"binf\" (default: the basis)"
    ),
    kind: SolutionKind = typer.Option(SolutionKind.VOR, "--kind", help="Solution: vor, min or hol"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Non-BPS ray angle (default 0)"),
    hbar: Optional[str] = typer.Option(None, "--hbar", help="ħ in the half-plane of the ray (default 0.1)"),
    chosen_pole: Optional[str] = typer.Option(None, "--chosen-pole", help="Pole carrying ν* = 1 for HG and dHG"),
):
    """Evaluate a solution of the Riemann-Hilbert problem and its comparison factors."""

    def body():
        config = _config(
            ctx, curve, m, nu, thetas=_theta(theta), hbars=_hbar(hbar), chosen_pole=chosen_pole
        )
        c = _curve(config)
        t, h = config.thetas[0], config.hbars[0]
        solution = RhpSolution.create(kind, c)
        values = []
        for element in _elements(c, mu):
            log_value = solution.log_value(element, t, h)
            values.append(
                {
                    "mu": element,
                    "label": element.label(),
                    "log_X": log_value,
                    "factors": comparison_factors(c, element, t, h, config.chosen_pole),
                }
            )
        return {"curve": c, "kind": kind, "theta": t, "hbar": h, "values": values}, []

    _finish(ctx, *_run(ctx, "Riemann-Hilbert evaluation", body))


@app.command("jump-check")
def jump_check_command(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    kind: SolutionKind = typer.Option(SolutionKind.VOR, "--kind", help="Solution: vor, min or hol"),
    hbar: Optional[str] = typer.Option(None, "--hbar", help="|ħ|; ħ is placed on each ray (default 0.1)"),
):
    """Residual of the jump across every BPS ray, maximized over the basis."""

    def body():
        config = _config(ctx, curve, m, nu, hbars=_hbar(hbar))
        c = _curve(config)
        structure = bps_spectrum(c, config.tolerances.tol_angle)
        solution = RhpSolution.create(kind, c)
        rays = {ray.angle: ray for ray in structure.rays()}
        rows, failures = [], []
        for angle, delta in jump_sectors(structure):
            residual = max(
                jump_check(c, element, angle - delta, angle + delta, abs(h) * cmath.exp(1j * angle), solution)
                for h in config.hbars
                for element in basis(c.poles)
            )
            rows.append({"ray": rays[angle], "half_width": delta, "residual": residual})
            if not residual <= JUMP_TOL:
                failures.append({"check": "rh1-jump", "ray": angle, "residual": residual})
        return {"curve": c, "kind": kind, "rays": rows}, failures

    _finish(ctx, *_run(ctx, "jump check", body))


@app.command()
def tau(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    theta: Optional[float] = typer.Option(None, "--theta", help="Non-BPS ray angle (default 0)"),
    hbar: Optional[str] = typer.Option(None, "--hbar", help="ħ in the half-plane of the ray (default 0.1)"),
    chosen_pole: Optional[str] = typer.Option(None, "--chosen-pole", help="Pole carrying ν* = 1 for HG and dHG"),
):
    """log τ of the Voros, minimal and holomorphic solutions, with the comparison factors."""

    def body():
        config = _config(
            ctx, curve, m, nu, thetas=_theta(theta), hbars=_hbar(hbar), chosen_pole=chosen_pole
        )
        c = _curve(config)
        t, h = config.thetas[0], config.hbars[0]
        minimal = RhpSolution.create(SolutionKind.MIN, c)
        data: dict[str, Any] = {
            "curve": c,
            "theta": t,
            "hbar": h,
            "log_tau": {
                "vor": log_tau_voros(c, t, h),
                "min": log_tau_min(c, minimal.xi, t, h),
                "hol": log_tau_hol(c, t, h),
            },
        }
        if c.poles and not bps_spectrum(c).is_empty:
            factors = comparison_factors(c, LatticeElement.zero(c.poles), t, h, config.chosen_pole)
            data["kappa"], data["varkappa"] = factors.kappa, factors.varkappa
            data["defining_relation"] = {
                s: tau_defining_relation(c, s, t, h) for s in c.poles
            }
        return data, []

    _finish(ctx, *_run(ctx, "τ-function", body))


@app.command("tr-oracle")
def tr_oracle(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    g: int = typer.Option(2, "--g", help="Genus, 2 or 3"),
):
    """F_g by Eynard-Orantin recursion against the BPS closed form."""

    def body():
        config = _config(ctx, curve, m, None)
        c = _curve(config)
        with err_console.status(f"[bold green]Running the recursion to genus {g}..."):
            oracle = tr_free_energy(build_parametrization(c), g)
        closed = free_energy(c, g)
        diff = abs(oracle - closed)
        relative = diff / max(1.0, abs(closed))
        failures = []
        if relative > config.tolerances.check_tol:
            failures.append({"check": "tr-oracle", "g": g, "residual": relative})
        return {
            "curve": c,
            "g": g,
            "F_g_oracle": oracle,
            "F_g_closed": closed,
            "abs_diff": diff,
        }, failures

    _finish(ctx, *_run(ctx, "topological recursion", body))


@app.command("wkb-oracle")
def wkb_oracle(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    beta: Optional[str] = typer.Option(None, "--beta", help="Path class (default: every β_s)"),
    order: Optional[int] = typer.Option(None, "--order", "-k", help="Largest order k (default 8)"),
    side: int = typer.Option(1, "--side", help="Detour side around turning points, 1 or -1"),
):
    """Numerical path integrals of the WKB odd forms against the Voros coefficients."""

    def body():
        config = _config(ctx, curve, m, nu, order=order)
        c = _curve(config)
        if c.label not in ORACLE_LABELS:
            raise Unsupported(
                f"the WKB oracle runs on {', '.join(label.value for label in ORACLE_LABELS)}"
            )
        if config.order > MAX_ORDER:
            raise OrderTooLarge(f"the WKB oracle goes up to order {MAX_ORDER}")
        system = riccati_system(c, config.order)
        results, failures = [], []
        for element in _paths(c, beta):
            if not element.is_path:
                raise UnsupportedClass(f"{element.label()} is not a path class")
            expected = voros_path_series(c, element, config.order, k_max=config.tolerances.k_max)
            with err_console.status(f"[bold green]Integrating along {element.label()}..."):
                numeric = sum(
                    (
                        n * path_integrals(system, s, side, quad_tol=config.tolerances.quad_tol)
                        for s, n in zip(c.poles, element.reduced.paths)
                        if n
                    ),
                    np.zeros(config.order, dtype=complex),
                )
            for k, value in enumerate(numeric, start=1):
                residual = abs(value - expected[k]) / max(1.0, abs(expected[k]))
                if residual > WKB_TOL_FACTOR * config.tolerances.check_tol:
                    failures.append({"check": "wkb-oracle", "beta": element.label(), "k": k, "residual": residual})
            results.append(
                {"beta": element, "label": element.label(), "numeric": numeric, "closed": list(expected.coeffs)}
            )
        return {"curve": c, "order": config.order, "results": results}, failures

    _finish(ctx, *_run(ctx, "WKB oracle", body))


@app.command()
def report(
    ctx: typer.Context,
    curve: Optional[str] = typer.Option(None, "--curve", help=CURVE_HELP),
    m: Optional[str] = typer.Option(None, "--m", help=M_HELP),
    nu: Optional[str] = typer.Option(None, "--nu", help=NU_HELP),
    output_dir: Optional[Path] = typer.Option(
        None, "--output-dir", "-d", help="Directory for report.json, report.md and CSVs (default hgbps-report)"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the random parameter draws (default 0)"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Thread pool size (default $HGBPS_WORKERS or 1)"),
):
    """Run the full verification matrix and write its artifacts."""
    err_console.print(
        Panel.fit(
            "[bold magenta]hgbps report[/bold magenta]\n"
            "Verification matrix for BPS structures of hypergeometric type",
            border_style="magenta",
        )
    )

    def body():
        config = _config(ctx, curve, m, nu, output_dir=output_dir, seed=seed, workers=workers)
        with err_console.status("[bold green]Running checks..."):
            result = generate_report(config)
        return (config, result), result.failures

    (config, result), failures = _run(ctx, "report", body)

    table = Table(title=f"Checks for {result.curve.label.value}")
    table.add_column("Check")
    table.add_column("Cases", justify="right")
    table.add_column("Max residual", justify="right")
    table.add_column("Status")
    for check in result.checks:
        if check.skipped:
            status = "[dim]skipped[/dim]"
        elif check.passed:
            status = "[green]✅ passed[/green]"
        else:
            status = f"[red]❌ {check.failure_count} failed[/red]"
        table.add_row(check.name, str(check.cases), f"{check.max_residual:.3e}", status)
    err_console.print(table)
    err_console.print(f"📁 Output: {Path(config.output_dir).absolute()}")

    if failures:
        typer.echo(dumps({"failures": failures}), nl=False)
        raise typer.Exit(code=1)
    err_console.print("\n[green]✅ All checks passed[/green]")


if __name__ == "__main__":
    app()
