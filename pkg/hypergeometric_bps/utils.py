"""
Utility functions for hypergeometric-bps.

This module contains helpers for parsing complex numbers, turning results into
JSON-ready structures, writing files and setting up logging.
"""

import csv
import io
import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from rich.logging import RichHandler

from .errors import ConfigError

PACKAGE_LOGGER = "hypergeometric_bps"


def configure_logging(verbose: bool = False) -> None:
    """
    Route package log records through a rich handler.

    Args:
        verbose: Emit DEBUG records when True, WARNING and above otherwise
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(show_path=False, rich_tracebacks=verbose)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.propagate = False


def parse_complex(value: Any) -> complex:
    """
    Parse a complex number from a number, a string or a {"re", "im"} mapping.

    Strings may use either ``i`` or ``j`` as the imaginary unit, e.g. ``"1+2i"``.

    Args:
        value: Value to parse

    Returns:
        The parsed complex number

    Raises:
        ConfigError: If the value cannot be interpreted as a complex number
    """
    if isinstance(value, bool):
        raise ConfigError(f"Not a complex number: {value!r}")
    if isinstance(value, int | float | complex | np.number):
        return complex(value)
    if isinstance(value, Mapping):
        try:
            return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Not a complex number: {value!r}") from e
    if isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        if text in {"j", "+j", "-j"}:
            text = text.replace("j", "1j")
        try:
            return complex(text)
        except ValueError as e:
            raise ConfigError(f"Not a complex number: {value!r}") from e
    raise ConfigError(f"Not a complex number: {value!r}")


def complex_to_json(z: complex) -> dict[str, float]:
    z = complex(z)
    return {"re": _finite(z.real), "im": _finite(z.imag)}


def _finite(x: float) -> float | str:
    if math.isfinite(x):
        return float(x)
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def to_jsonable(obj: Any) -> Any:
    """
    Convert library results into plain JSON data.

    Complex numbers become {"re", "im"} objects, numpy values become Python
    numbers or lists, and objects exposing ``to_dict`` are serialized through it.
    """
    if obj is None or isinstance(obj, bool | str):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, int | np.integer):
        return int(obj)
    if isinstance(obj, float | np.floating):
        return _finite(float(obj))
    if isinstance(obj, complex | np.complexfloating):
        return complex_to_json(complex(obj))
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Iterable):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Serialize to stable, sorted JSON text."""
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def validate_output_path(output_path: Path | None) -> bool:
    """
    Validate an output directory.

    Args:
        output_path: Directory the report files go into

    Returns:
        True if it exists as a directory or can be created, False otherwise
    """
    if output_path is None:
        return False
    output_path = Path(output_path)
    if output_path.exists():
        return output_path.is_dir()
    # the closest existing ancestor must be a directory
    for parent in output_path.parents:
        if parent.exists():
            return parent.is_dir()
    return False


def write_file(file_path: Path, content: str) -> bool:
    """
    Write content to a file.

    Args:
        file_path: Path to the file
        content: Content to write

    Returns:
        True if successful, False otherwise
    """
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(content)
        return True
    except OSError:
        logging.getLogger(__name__).exception("Cannot write %s", file_path)
        return False


def write_json(file_path: Path, data: Any) -> bool:
    return write_file(file_path, dumps(data))


def write_csv(file_path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> bool:
    """
    Write rows as CSV with a header line.

    Complex cells are split by the caller into real and imaginary columns; any
    remaining complex value is written in Python notation.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return write_file(file_path, buffer.getvalue())


def _csv_cell(value: Any) -> Any:
    if isinstance(value, float | np.floating):
        return repr(float(value))
    if isinstance(value, complex | np.complexfloating):
        return repr(complex(value))
    return value


def relative_error(actual: complex, expected: complex) -> float:
    """|actual - expected| / max(1, |expected|)."""
    return abs(actual - expected) / max(1.0, abs(expected))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
