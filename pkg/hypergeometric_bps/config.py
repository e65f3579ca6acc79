"""
Run configuration and numeric defaults.

A RunConfig gathers everything one CLI invocation needs. It can be loaded from a
YAML or JSON file (JSON is valid YAML, so a single loader handles both) and is
then overridden by explicit command-line flags.
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError
from .utils import parse_complex

log = logging.getLogger(__name__)

TOL_ANGLE = 1e-9
K_MAX = 64
QUAD_TOL = 1e-10
CHECK_TOL = 1e-8

WORKERS_ENV = "HGBPS_WORKERS"

_TOLERANCE_KEYS = {"tol_angle", "k_max", "quad_tol", "check_tol"}


@dataclass(frozen=True)
class Tolerances:
    tol_angle: float = TOL_ANGLE
    k_max: int = K_MAX
    quad_tol: float = QUAD_TOL
    check_tol: float = CHECK_TOL


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for one run of a subcommand."""

    curve: str = "Web"
    m: Any = None
    nu: Any = None
    thetas: tuple[float, ...] = (0.0,)
    hbars: tuple[complex, ...] = (0.1,)
    order: int = 8
    genus: int = 3
    chosen_pole: str | None = None
    seed: int = 0
    workers: int = 1
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_dir: Path = Path("hgbps-report")

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Return a copy with every non-None override applied."""
        values = {k: v for k, v in overrides.items() if v is not None}
        return _coerce(replace(self, **values))


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError as e:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from e
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be positive, got {workers}")
    return workers


def load_config(path: Path | None) -> RunConfig:
    """
    Load a RunConfig from a YAML or JSON file.

    Args:
        path: Configuration file, or None for the defaults

    Returns:
        The validated configuration

    Raises:
        ConfigError: If the file is missing, unparsable or has unknown keys
    """
    base = RunConfig(workers=default_workers())
    if path is None:
        return base

    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Configuration file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e
    if raw is None:
        return base
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")

    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

    log.debug("Loaded configuration from %s: %s", path, sorted(raw))
    tolerances = raw.pop("tolerances", None)
    config = replace(base, **raw)
    if tolerances is not None:
        config = replace(config, tolerances=_parse_tolerances(tolerances))
    return _coerce(config)


def _parse_tolerances(raw: Any) -> Tolerances:
    if isinstance(raw, Tolerances):
        return raw
    if not isinstance(raw, dict):
        raise ConfigError("tolerances must be a mapping")
    unknown = set(raw) - _TOLERANCE_KEYS
    if unknown:
        raise ConfigError(f"Unknown tolerance keys: {', '.join(sorted(unknown))}")
    try:
        tolerances = Tolerances(
            tol_angle=float(raw.get("tol_angle", TOL_ANGLE)),
            k_max=int(raw.get("k_max", K_MAX)),
            quad_tol=float(raw.get("quad_tol", QUAD_TOL)),
            check_tol=float(raw.get("check_tol", CHECK_TOL)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid tolerance value: {e}") from e
    # order k needs Bernoulli degree k + 1
    if tolerances.k_max < 2:
        raise ConfigError(f"k_max must be at least 2, got {tolerances.k_max}")
    for key in ("tol_angle", "quad_tol", "check_tol"):
        if not getattr(tolerances, key) > 0:
            raise ConfigError(f"{key} must be positive, got {getattr(tolerances, key)}")
    return tolerances


def _coerce(config: RunConfig) -> RunConfig:
    try:
        thetas = tuple(float(t) for t in _as_sequence(config.thetas))
        hbars = tuple(parse_complex(h) for h in _as_sequence(config.hbars))
        order = int(config.order)
        genus = int(config.genus)
        seed = int(config.seed)
        workers = int(config.workers)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid configuration value: {e}") from e

    if order < 1:
        raise ConfigError(f"order must be at least 1, got {order}")
    if not 1 <= genus <= 6:
        raise ConfigError(f"genus must be between 1 and 6, got {genus}")
    if workers < 1:
        raise ConfigError(f"workers must be positive, got {workers}")
    if not hbars:
        raise ConfigError("hbars must not be empty")

    return replace(
        config,
        thetas=thetas,
        hbars=hbars,
        order=order,
        genus=genus,
        seed=seed,
        workers=workers,
        tolerances=_parse_tolerances(config.tolerances),
        output_dir=Path(config.output_dir),
    )


def _as_sequence(value: Any) -> tuple:
    if isinstance(value, list | tuple):
        return tuple(value)
    return (value,)
