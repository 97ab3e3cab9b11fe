from __future__ import annotations

import logging
import time
from typing import Any

from ..config import RunConfig
from ..engines import EvolutionEngine, FlatEngine, GordonEngine
from ..geometry import MediumSpec
from ..grid import GridSpec

logger = logging.getLogger(__name__)


def build_engine(config: RunConfig, grid: GridSpec, medium: MediumSpec) -> EvolutionEngine:
    if config.engine == "flat":
        return FlatEngine(medium, grid, cfl=config.evolution.cfl)
    return GordonEngine(medium, grid, cfl=config.evolution.cfl)


class PrepareStage:
    """Turns the run config into a grid, a medium and a gated engine."""

    def __call__(self, state: dict[str, Any]) -> dict[str, Any]:
        started = time.perf_counter()
        config: RunConfig = state["config"]
        grid = config.grid_spec()
        medium = config.medium_spec(grid)
        engine = build_engine(config, grid, medium)
        if config.evolution.dt is not None:
            engine.check_dt(config.evolution.dt)
        logger.info(
            "prepared %s engine on %s grid, dt limit %.4g",
            config.engine,
            "x".join(str(p) for p in grid.points),
            engine.dt_limit,
        )
        timings = {**state.get("timings", {}), "prepare": time.perf_counter() - started}
        return {
            "digest": config.digest(),
            "grid": grid,
            "medium": medium,
            "engine": engine,
            "timings": timings,
        }
