from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from ..config import RunConfig
from ..engines import EvolutionEngine, GordonEngine, PackedState
from ..snapshots import write_snapshot

logger = logging.getLogger(__name__)


def potential_of(
    engine: EvolutionEngine, state: PackedState
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """(A_μ, ∂₀A_μ) of any engine state, in the physical potential."""
    if isinstance(engine, GordonEngine):
        return state.potential(engine.n)  # type: ignore[attr-defined]
    return state.potential()  # type: ignore[attr-defined]


class EvolveStage:
    """Runs the engine, recording the probe series and periodic snapshots."""

    def __call__(self, state: dict[str, Any]) -> dict[str, Any]:
        started = time.perf_counter()
        config: RunConfig = state["config"]
        engine: EvolutionEngine = state["engine"]
        component = config.probe_component()
        index = config.output.probe_index
        every = config.output.snapshot_every
        snapshot_dir = Path(config.output.directory) / "snapshots"
        probe: list[tuple[float, float]] = []
        snapshots: list[str] = []

        def observe(step: int, current: PackedState) -> None:
            potential, velocity = potential_of(engine, current)
            probe.append((current.t, float(potential[component].flat[index])))
            if every and step % every == 0:
                path = snapshot_dir / f"snapshot_{step:06d}.bin"
                write_snapshot(path, engine.grid, current.t, np.concatenate([potential, velocity]))
                snapshots.append(str(path))

        evolution = config.evolution
        result = engine.evolve(
            state["initial"],
            evolution.t_end,
            evolution.dt,
            sample_every=evolution.sample_every,
            keep_levels=evolution.keep_levels,
            observer=observe,
        )

        fieldeq: dict[str, Any] | None = None
        if evolution.keep_levels and len(result.levels) == 3:
            residual = engine.fieldeq_residual(result.levels)  # type: ignore[attr-defined]
            fieldeq = {"t": residual.t, "components": list(residual.components), "total": residual.total}
            if isinstance(engine, GordonEngine):
                result.reports[-1] = engine.with_fieldeq(result.reports[-1], result.levels)
        elif evolution.keep_levels:
            logger.warning("field-equation residual needs three stored levels; run took %d steps", result.steps)

        timings = {**state.get("timings", {}), "evolve": time.perf_counter() - started}
        logger.info("evolved to t=%.4g in %d steps (%.2fs)", result.final.t, result.steps, timings["evolve"])
        return {
            "result": result,
            "probe": probe,
            "snapshots": snapshots,
            "fieldeq": fieldeq,
            "timings": timings,
        }

    def needs_analysis(self, state: dict[str, Any]) -> Literal["analyze", "publish"]:
        return "analyze" if state.get("mode") is not None else "publish"
