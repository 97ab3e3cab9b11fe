from .base import EvolutionEngine, EvolutionResult, MonitorRecord, PackedState
from .flat import FieldEquationResidual, FlatEngine, FlatMonitorReport, FlatState
from .gordon import GordonEngine, GordonMonitorReport, GordonState

__all__ = [
    "EvolutionEngine",
    "EvolutionResult",
    "MonitorRecord",
    "PackedState",
    "FieldEquationResidual",
    "FlatEngine",
    "FlatMonitorReport",
    "FlatState",
    "GordonEngine",
    "GordonMonitorReport",
    "GordonState",
]
