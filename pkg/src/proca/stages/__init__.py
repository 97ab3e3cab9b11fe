from .analyzer import AnalyzeStage
from .evolver import EvolveStage, potential_of
from .initializer import InitializeStage, free_data
from .prepare import PrepareStage, build_engine
from .publisher import PublishStage, summarize, write_csv

__all__ = [
    "AnalyzeStage",
    "EvolveStage",
    "InitializeStage",
    "PrepareStage",
    "PublishStage",
    "build_engine",
    "free_data",
    "potential_of",
    "summarize",
    "write_csv",
]
