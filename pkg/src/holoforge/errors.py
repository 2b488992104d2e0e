"""Exception hierarchy shared by every module.

Each class maps to a distinct CLI exit code (see ``cli.EXIT_CODES``).
"""


class HoloforgeError(Exception):
    """Base class for all package errors."""


class DimensionError(HoloforgeError, ValueError):
    """Operands act on different numbers of qubits."""


class UnsupportedGateError(HoloforgeError, ValueError):
    """A gate is not allowed in the requested operation."""


class CapacityError(HoloforgeError):
    """A problem exceeds a configured size cap."""


class GeometryError(HoloforgeError, ValueError):
    """Tiling parameters are not hyperbolic or not supported."""


class ContractionError(HoloforgeError):
    """A tensor contraction is inconsistent or not isometric."""


class ParseError(HoloforgeError, ValueError):
    """Malformed text or JSON input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class VerificationError(HoloforgeError):
    """A logical-gate or symmetry verification failed."""


class NotFoundError(HoloforgeError):
    """A threshold crossing could not be located."""


class NotAvailableError(HoloforgeError, KeyError):
    """A requested (seed, variant) combination is not defined."""
