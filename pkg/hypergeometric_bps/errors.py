"""
Exception hierarchy for hypergeometric-bps.

Every failure raised by the library derives from HgbpsError so that the CLI can
map it onto an exit code in one place.
"""


class HgbpsError(Exception):
    """Base class for all library errors."""

    hint: str = ""


class ConfigError(HgbpsError):
    """Invalid configuration file, flag value or curve parameters."""

    hint = "Check the configuration keys and the values passed on the command line."


class InvalidMass(ConfigError):
    """Mass parameters outside the admissible set of the curve."""

    hint = "A product or sum of masses that must be nonzero vanishes."


class DimensionMismatch(ConfigError):
    """Wrong number of masses or quantization parameters for the curve."""

    hint = "Pass one mass and one nu per even pole of the curve."


class Unsupported(HgbpsError):
    """Operation not available for this curve label."""


class UnsupportedClass(HgbpsError):
    """Lattice element outside the domain of the operation."""


class Inconsistent(HgbpsError):
    """The constraints on a quadratic refinement admit no solution."""


class BoundaryIsBps(HgbpsError):
    """A sector or half-plane boundary lies on a BPS ray."""

    hint = "Move the angle off the BPS rays listed by the spectrum command."


class RayIsBps(HgbpsError):
    """The requested ray is a BPS ray."""

    hint = "Move the angle off the BPS rays listed by the spectrum command."


class HalfPlaneError(HgbpsError):
    """The value of hbar lies outside the half-plane bisected by the ray."""

    hint = "Choose hbar with |arg(hbar) - theta| < pi/2."


class PoleHit(HgbpsError):
    """Evaluation at (or numerically on top of) a pole."""


class BranchCut(HgbpsError):
    """Evaluation on the branch cut of a principal logarithm."""


class OrderTooLarge(HgbpsError):
    """Requested order exceeds the configured maximum."""


class QuadratureFail(HgbpsError):
    """Numerical quadrature did not reach the requested tolerance."""


class NuOutOfStrip(HgbpsError):
    """Quantization parameters outside the strips where a closed form holds."""


class TruncationInsufficient(HgbpsError):
    """A truncated jet or polar basis is too short for the requested residue."""


class ContourHitsPole(HgbpsError):
    """No pole-free integration contour was found."""


class ReportWriteError(HgbpsError):
    """A report artifact could not be rendered or written."""

    hint = "Check that the output directory and the report files in it are writable."
