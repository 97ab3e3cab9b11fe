from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import SymbolClass


class ProcaError(Exception):
    """Base class for every failure the library reports."""

    exit_code: int = 1


class ConfigurationError(ProcaError, ValueError):
    """Invalid configuration or input data; the run is refused."""

    exit_code = 2


class DomainError(ConfigurationError):
    """A parameter or field lies outside its admissible range."""


class HyperbolicityError(ConfigurationError):
    """The mass-metric parameter puts the A_0 operator outside the hyperbolic class."""

    def __init__(self, symbol: SymbolClass, lam: float) -> None:
        self.symbol = symbol
        self.lam = lam
        super().__init__(
            f"lambda={lam!r} makes the principal symbol {symbol.kind.value}; "
            "evolution requires lambda < 1 (hyperbolic)"
        )


class UnsupportedLimitError(ConfigurationError):
    """Constrained initialization needs a strictly positive Proca mass."""


class SolvabilityError(ConfigurationError):
    """A periodic elliptic problem without a zero-mean right-hand side."""


class InconsistentLevelsError(ConfigurationError):
    """Stored time levels are not uniformly spaced."""


class CFLViolation(ProcaError):
    exit_code = 3

    def __init__(self, dt: float, limit: float) -> None:
        self.dt = dt
        self.limit = limit
        super().__init__(f"time step {dt:.6g} exceeds the CFL bound {limit:.6g}")


class SolverError(ProcaError):
    """Iterative elliptic solve did not reach its tolerance."""

    exit_code = 4

    def __init__(self, residual: float, iterations: int) -> None:
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"elliptic solve stopped after {iterations} iterations "
            f"with relative residual {residual:.3e}"
        )


class DivergenceError(ProcaError):
    exit_code = 5

    def __init__(self, t: float) -> None:
        self.t = t
        super().__init__(f"non-finite values in the evolved state at t={t:.6g}")


class MeasurementError(ProcaError):
    """A time series carries no usable spectral peak."""
