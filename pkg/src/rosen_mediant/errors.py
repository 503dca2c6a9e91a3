"""Exception hierarchy for rosen-mediant.

Every error raised on purpose by the library derives from
:class:`RosenMediantError` so the CLI can turn it into an error document.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class RosenMediantError(RuntimeError):
    """Base class for all library errors."""


class HeckeIndexError(RosenMediantError, ValueError):
    """Raised when the Hecke index k is unsupported (k < 4 or not an integer)."""


class ContextMismatchError(RosenMediantError):
    """Raised when ring elements from different indices are combined."""


class OutOfIntervalError(RosenMediantError, ValueError):
    """Raised when a map is evaluated outside its interval of definition."""


class TerminalOrbitError(RosenMediantError):
    """Raised when an orbit reaches the terminal point 0 and cannot continue."""


class DiagonalCrossingError(RosenMediantError, ValueError):
    """Raised when a rectangle meets the diagonal x = y in its interior."""


class DivergentMeasureError(RosenMediantError):
    """Raised when an unclipped measure of a domain touching the diagonal is requested."""


class LiteralParseError(RosenMediantError, ValueError):
    """Raised when an exact literal in lambda cannot be parsed."""


class CertificationError(RosenMediantError):
    """Raised when a periodic orbit cannot be certified."""


class ArithmeticInvariantError(RosenMediantError):
    """Raised when an exact identity that must hold is violated."""


class InsufficientLinearRegionError(RosenMediantError):
    """Raised when a counting curve has no usable linear region."""

    def __init__(self, message: str, curve: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.curve = curve or {}
