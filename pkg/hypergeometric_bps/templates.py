"""
Template management for the verification report.

This module loads the Jinja2 templates shipped with the package and renders
them with a report context.
"""

import logging
import math
from pathlib import Path
from typing import Any

from jinja2 import (
    Environment,
    FileSystemLoader,
    PackageLoader,
    StrictUndefined,
    Template,
    TemplateError,
)

log = logging.getLogger(__name__)

TEMPLATE_DESCRIPTIONS = {
    "report": "Markdown summary of the verification matrix",
}


def get_available_templates() -> list[str]:
    """Get list of available template names."""
    return list(TEMPLATE_DESCRIPTIONS)


def get_template_description(template_name: str) -> str:
    return TEMPLATE_DESCRIPTIONS.get(template_name, "Unknown template")


def get_template_path(template_name: str) -> Path | None:
    """Get the file path for a template in the source tree."""
    template_file = Path(__file__).parent / "templates" / f"{template_name}.md.j2"
    if template_file.exists():
        return template_file
    return None


def format_number(value: Any, digits: int = 3) -> str:
    """Short scientific notation for residuals; complex values as a ± bi."""
    if value is None:
        return "–"
    if isinstance(value, dict) and {"re", "im"} <= set(value):
        value = complex(value["re"], value["im"])
    if isinstance(value, complex):
        sign = "-" if value.imag < 0 else "+"
        return f"{format_number(value.real, digits)} {sign} {format_number(abs(value.imag), digits)}i"
    if isinstance(value, str):
        return value
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    if value == 0:
        return "0"
    return f"{value:.{digits}e}"


def _environment(loader) -> Environment:
    env = Environment(
        loader=loader,
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )
    env.filters["num"] = format_number
    return env


def load_template(template_name: str) -> Template | None:
    """Load a Jinja2 template by name."""
    # PackageLoader works for installed packages
    try:
        env = _environment(PackageLoader("hypergeometric_bps", "templates"))
        return env.get_template(f"{template_name}.md.j2")
    except (TemplateError, ValueError, ModuleNotFoundError) as e:
        log.debug("PackageLoader failed for %s: %s", template_name, e)

    template_path = get_template_path(template_name)
    if template_path is None:
        return None
    try:
        env = _environment(FileSystemLoader(str(template_path.parent)))
        return env.get_template(template_path.name)
    except TemplateError as e:
        log.debug("FileSystemLoader failed for %s: %s", template_name, e)
        return None


def render_template(template_name: str, context: dict[str, Any]) -> str | None:
    """Render a template with the given context, or None if it cannot be rendered."""
    template = load_template(template_name)
    if template is None:
        return None
    try:
        return template.render(**context)
    except TemplateError as e:
        log.warning("Cannot render %s: %s", template_name, e)
        return None
