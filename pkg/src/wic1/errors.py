"""Exception types raised across the package."""


class WiC1Error(Exception):
    """Base class for all package errors."""


class NumericalError(WiC1Error):
    """Base for failures of a numerical procedure (CLI exit code 3)."""


class NonFiniteState(NumericalError):
    pass


class EventMiss(NumericalError):
    """Two guard events fell inside one integration step."""


class SingularJacobian(NumericalError):
    pass


class InsufficientSymbols(WiC1Error, ValueError):
    pass


class DomainError(WiC1Error, ValueError):
    pass


class CoverageError(WiC1Error, ValueError):
    """A delayed or shifted lookup reaches outside the stored signal."""


class Unsupported(WiC1Error, ValueError):
    pass


class LengthError(WiC1Error, ValueError):
    pass


class EmptyTable(WiC1Error, ValueError):
    pass


class ConfigError(WiC1Error, ValueError):
    """Invalid run configuration (CLI exit code 2)."""
