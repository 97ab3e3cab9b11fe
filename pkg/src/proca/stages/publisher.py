from __future__ import annotations

import csv
import json
import logging
import time
from pathlib import Path
from typing import Any, Iterable, Sequence

from .. import __version__
from ..config import RunConfig
from ..engines import EvolutionResult, MonitorRecord
from ..memory import RunLedger

logger = logging.getLogger(__name__)


def _cell(value: float) -> str:
    return repr(float(value))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return path


def summarize(config: RunConfig, result: EvolutionResult, state: dict[str, Any]) -> dict[str, Any]:
    """Compact, JSON-ready description of a finished run, as stored in the run ledger."""
    reports: list[MonitorRecord] = result.reports
    columns = type(reports[0]).csv_columns()
    rows = [report.as_row() for report in reports]
    sup = {name: max(abs(row[i]) for row in rows) for i, name in enumerate(columns) if name != "t"}
    fieldeq = state.get("fieldeq")
    if fieldeq is not None:
        sup["fieldeq_l2"] = fieldeq["total"]
    grid = state["grid"]
    return {
        "engine": config.engine,
        "points": list(grid.points),
        "h": grid.h_min,
        "steps": result.steps,
        "dt": result.dt,
        "t_final": result.final.t,
        "final": dict(zip(columns, rows[-1])),
        "sup": sup,
        "fieldeq": fieldeq,
        "dispersion": state.get("dispersion"),
        "output_dir": config.output.directory,
    }


class PublishStage:
    """Writes monitors, probe series, config echo and manifest; records the run in the ledger."""

    def __init__(self, ledger: RunLedger) -> None:
        self.ledger = ledger

    def __call__(self, state: dict[str, Any]) -> dict[str, Any]:
        started = time.perf_counter()
        config: RunConfig = state["config"]
        result: EvolutionResult = state["result"]
        output_dir = Path(config.output.directory)
        output_dir.mkdir(parents=True, exist_ok=True)

        report_type = type(result.reports[0])
        paths = {
            "monitors": write_csv(
                output_dir / "monitors.csv",
                report_type.csv_columns(),
                (report.as_row() for report in result.reports),
            ),
            "probe": write_csv(output_dir / "probe.csv", ("t", "value"), state.get("probe", [])),
        }
        paths["config"] = output_dir / "config.env"
        paths["config"].write_text(config.to_text(), encoding="utf-8")

        summary = summarize(config, result, state)
        timings = {**state.get("timings", {}), "publish": time.perf_counter() - started}
        manifest = {
            "code_version": __version__,
            "config_digest": state["digest"],
            "config": config.to_mapping(),
            "monitor_columns": list(report_type.csv_columns()),
            "timings": timings,
            "snapshots": state.get("snapshots", []),
            "summary": summary,
        }
        paths["manifest"] = output_dir / "manifest.json"
        paths["manifest"].write_text(json.dumps(manifest, indent=2), encoding="utf-8")

        self.ledger.write(state["digest"], "summary", summary)
        logger.info("published run %s to %s", state["digest"][:12], output_dir)
        return {
            "summary": summary,
            "output_paths": {name: str(path) for name, path in paths.items()},
            "timings": timings,
        }
