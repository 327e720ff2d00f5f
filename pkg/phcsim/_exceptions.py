"""Errors raised by phcsim."""

from __future__ import annotations


class PhcsimError(Exception):
    """Base class of every error raised by this package."""


class PoleProximityError(PhcsimError, ValueError):
    """A frequency lies too close to a pole of the permittivity."""


class InvalidGeometryError(PhcsimError, ValueError):
    """The unit cell geometry or triangulation is not valid."""


class NonMatchingBoundaryError(PhcsimError, ValueError):
    """Opposite edges of the unit cell do not pair vertex by vertex."""


class MeshParseError(PhcsimError, ValueError):
    """A node or element file does not follow the expected format."""


class SingularSystemError(PhcsimError, ArithmeticError):
    """The matrix T(ω) is numerically singular at the requested frequency."""


class RegionNotAdmissibleError(PhcsimError, ValueError):
    """The search region is too close to a pole of the operator."""


class BudgetExceededError(PhcsimError, RuntimeError):
    """The quadtree search exceeded its depth or frontier budget."""


class AmbiguousTrackingError(PhcsimError, RuntimeError):
    """An eigenvalue cannot be followed uniquely across mesh levels."""


class ConfigError(PhcsimError, ValueError):
    """A run configuration is missing keys or contains invalid values."""
