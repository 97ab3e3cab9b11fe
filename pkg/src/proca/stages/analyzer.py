from __future__ import annotations

import logging
from typing import Any

from ..errors import MeasurementError
from ..modes import DispersionMode, measure_frequency

logger = logging.getLogger(__name__)


class AnalyzeStage:
    """Compares the probe frequency of a plane-wave run with its dispersion relation."""

    def __call__(self, state: dict[str, Any]) -> dict[str, Any]:
        mode: DispersionMode = state["mode"]
        result = state["result"]
        series = [value for _, value in state.get("probe", [])]
        check: dict[str, Any] = {
            "kind": mode.kind.value,
            "k": list(mode.k),
            "expected": mode.omega,
        }
        try:
            measured = measure_frequency(series, result.dt)
        except MeasurementError as exc:
            logger.warning("skipping dispersion check: %s", exc)
            return {"dispersion": {**check, "skipped": str(exc)}}
        check["measured"] = measured
        check["relative_error"] = abs(measured - mode.omega) / mode.omega if mode.omega else abs(measured)
        logger.info("measured omega %.8g vs %.8g (relative error %.3g)", measured, mode.omega, check["relative_error"])
        return {"dispersion": check}
