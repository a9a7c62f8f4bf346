"""Chaos-based multi-user communication: waveform generation, channels, decoding, Lyapunov checks."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    CoverageError,
    DomainError,
    EmptyTable,
    EventMiss,
    InsufficientSymbols,
    LengthError,
    NonFiniteState,
    SingularJacobian,
    Unsupported,
    WiC1Error,
)
from .oscillator import HybridState, OscParams, SymbolStream, Trajectory  # noqa: F401
