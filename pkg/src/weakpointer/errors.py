"""Exception hierarchy.

Two families matter to callers: ``InvalidInput`` (bad configuration or
arguments, CLI exit code 2) and ``PhysicsError`` (a well-formed request the
physics cannot honour, CLI exit code 3).
"""


class WeakPointerError(Exception):
    """Base class for all package errors."""


class InvalidInput(WeakPointerError, ValueError):
    pass


class PhysicsError(WeakPointerError):
    pass


class NonHermitian(InvalidInput):
    pass


class NonNormalized(InvalidInput):
    pass


class BoundaryLeak(InvalidInput):
    """Pointer amplitude does not decay at the grid edges."""


class NonPositiveEpsilon(InvalidInput):
    pass


class ConfigError(InvalidInput):
    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class VanishingOverlap(PhysicsError):
    """Post-selection is (numerically) orthogonal to the pre-selection."""


class TranslationOverflow(PhysicsError):
    """Pointer translation would wrap around the periodic grid."""
