from __future__ import annotations

from dataclasses import dataclass
from typing import Any, TypedDict

from langgraph.graph import END, StateGraph

from .config import RunConfig, Settings, settings
from .engines import EvolutionEngine, EvolutionResult, PackedState
from .geometry import MediumSpec
from .grid import GridSpec
from .memory import RunLedger
from .modes import DispersionMode
from .stages import AnalyzeStage, EvolveStage, InitializeStage, PrepareStage, PublishStage


class SimulationState(TypedDict, total=False):
    config: RunConfig
    digest: str
    grid: GridSpec
    medium: MediumSpec
    engine: EvolutionEngine
    initial: PackedState
    mode: DispersionMode | None
    result: EvolutionResult
    probe: list[tuple[float, float]]
    snapshots: list[str]
    fieldeq: dict[str, Any] | None
    dispersion: dict[str, Any]
    summary: dict[str, Any]
    output_paths: dict[str, str]
    timings: dict[str, float]


@dataclass(slots=True)
class SimulationResult:
    state: SimulationState
    ledger: RunLedger
    graph: Any

    @property
    def summary(self) -> dict[str, Any]:
        return self.state["summary"]


def build_run_graph(
    prepare: PrepareStage,
    initialize: InitializeStage,
    evolve: EvolveStage,
    publish: PublishStage,
    analyze: AnalyzeStage | None = None,
) -> Any:
    builder = StateGraph(SimulationState)
    builder.add_node("prepare", prepare)
    builder.add_node("initialize", initialize)
    builder.add_node("evolve", evolve)
    builder.add_node("publish", publish)
    builder.set_entry_point("prepare")
    builder.add_edge("prepare", "initialize")
    builder.add_edge("initialize", "evolve")

    if analyze:
        builder.add_node("analyze", analyze)
        builder.add_conditional_edges(
            "evolve",
            evolve.needs_analysis,
            {"analyze": "analyze", "publish": "publish"},
        )
        builder.add_edge("analyze", "publish")
    else:
        builder.add_edge("evolve", "publish")

    builder.add_edge("publish", END)

    return builder.compile()


def run_simulation_workflow(
    config: RunConfig,
    *,
    ledger: RunLedger | None = None,
    settings_override: Settings | None = None,
    analyze: bool = True,
) -> SimulationResult:
    """Prepare, initialize, evolve, optionally analyze, and publish one run."""
    cfg = settings_override or settings
    ledger = ledger or RunLedger(redis_url=cfg.redis_url)
    graph = build_run_graph(
        PrepareStage(),
        InitializeStage(),
        EvolveStage(),
        PublishStage(ledger),
        AnalyzeStage() if analyze else None,
    )
    state: SimulationState = {"config": config, "timings": {}}
    final_state = graph.invoke(state)
    return SimulationResult(state=final_state, ledger=ledger, graph=graph)
