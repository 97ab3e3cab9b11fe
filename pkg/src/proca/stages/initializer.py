from __future__ import annotations

import time
from pathlib import Path
from typing import Any

import numpy as np

from ..config import RunConfig
from ..engines import GordonEngine
from ..errors import ConfigurationError
from ..geometry import MediumSpec
from ..grid import GridSpec, SpatialField, random_bandlimited
from ..modes import DispersionMode, make_mode, plane_wave_free_data
from ..snapshots import read_snapshot

FREE_DATA_COMPONENTS = 6


def free_data(
    config: RunConfig, grid: GridSpec, medium: MediumSpec
) -> tuple[SpatialField, SpatialField, DispersionMode | None]:
    """(A_i, ∂₀A_i) at t = 0 in the physical potential, plus the plane-wave mode if any."""
    init = config.init
    if init.kind == "random":
        ai = np.stack([random_bandlimited([init.seed, c], init.kmax, grid) for c in range(3)])
        dai = np.stack([random_bandlimited([init.seed, 3 + c], init.kmax, grid) for c in range(3)])
        return init.amplitude * ai, init.amplitude * dai, None
    if init.kind == "plane_wave":
        mode = make_mode(init.mode_kind, init.mode_k, medium)
        ai, dai = plane_wave_free_data(mode, init.amplitude, grid)
        return ai, dai, mode

    snapshot = read_snapshot(Path(init.path or ""))
    if not snapshot.matches(grid):
        raise ConfigurationError(f"{init.path}: snapshot grid {snapshot.points} does not match {grid.shape}")
    if snapshot.data.shape[0] != FREE_DATA_COMPONENTS:
        raise ConfigurationError(
            f"{init.path}: free data need {FREE_DATA_COMPONENTS} components (A_i, dA_i), got {snapshot.data.shape[0]}"
        )
    return snapshot.data[:3], snapshot.data[3:], None


class InitializeStage:
    """Completes the free data into constrained Cauchy data for the chosen engine."""

    def __call__(self, state: dict[str, Any]) -> dict[str, Any]:
        started = time.perf_counter()
        config: RunConfig = state["config"]
        engine = state["engine"]
        ai, dai, mode = free_data(config, state["grid"], state["medium"])
        if isinstance(engine, GordonEngine):
            initial = engine.init_from_potential(ai, dai)
        else:
            initial = engine.init_from_free_data(ai, dai)
        timings = {**state.get("timings", {}), "initialize": time.perf_counter() - started}
        return {"initial": initial, "mode": mode, "timings": timings}
