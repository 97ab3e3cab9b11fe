"""Resolution ladders and least-squares convergence orders."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .config import RunConfig, Settings, settings
from .errors import ConfigurationError
from .memory import RunLedger
from .workflow import run_simulation_workflow

logger = logging.getLogger(__name__)

MIN_LEVELS = 3
BELOW_FLOOR = "below floor"

CONSTRAINT_QUANTITIES = {
    "flat": ("c1_l2", "c2_l2", "gauss_l2", "c1_linf", "c2_linf", "gauss_linf"),
    "gordon": ("lorenz_l2", "gauss_l2", "lorenz_linf", "gauss_linf"),
}


@dataclass(frozen=True, slots=True)
class ConvergenceStudy:
    """A base run refined ``levels - 1`` times by doubling the points per axis."""

    base: RunConfig
    levels: int = MIN_LEVELS
    quantities: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.levels < MIN_LEVELS:
            raise ConfigurationError(f"a convergence study needs at least {MIN_LEVELS} levels, got {self.levels}")

    @property
    def monitored(self) -> tuple[str, ...]:
        if self.quantities:
            return self.quantities
        default = CONSTRAINT_QUANTITIES[self.base.engine]
        return default + ("fieldeq_l2",) if self.base.evolution.keep_levels else default

    def configs(self) -> list[RunConfig]:
        root = Path(self.base.output.directory)
        return [
            self.base.refined(2**level).with_output(root / f"level_{level}")
            for level in range(self.levels)
        ]


@dataclass(frozen=True, slots=True)
class OrderEstimate:
    quantity: str
    spacings: tuple[float, ...]
    values: tuple[float, ...]
    order: float | None
    residual: float | None

    @property
    def below_floor(self) -> bool:
        return self.order is None

    def as_row(self) -> list[str]:
        order = BELOW_FLOOR if self.order is None else repr(self.order)
        residual = "" if self.residual is None else repr(self.residual)
        return [self.quantity, order, residual, *(repr(v) for v in self.values)]


def fit_order(
    spacings: Sequence[float],
    values: Sequence[float],
    floor: float,
) -> tuple[float | None, float | None]:
    """Slope of log(value) against log(h) and the RMS residual of that fit.

    Returns ``(None, None)`` when any value is at or below ``floor``.
    """
    if len(spacings) != len(values) or len(values) < 2:
        raise ConfigurationError("order fits need matching spacings and values, at least two of each")
    if any(not math.isfinite(v) or abs(v) <= floor for v in values):
        return None, None
    x = np.log(np.asarray(spacings, dtype=float))
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    coeffs, residuals, *_ = np.polyfit(x, y, 1, full=True)
    ssr = float(residuals[0]) if len(residuals) else 0.0
    return float(coeffs[0]), math.sqrt(ssr / len(values))


@dataclass(slots=True)
class ConvergenceReport:
    study: ConvergenceStudy
    summaries: list[dict[str, Any]]
    estimates: list[OrderEstimate] = field(default_factory=list)
    table_path: Path | None = None

    def estimate(self, quantity: str) -> OrderEstimate:
        for item in self.estimates:
            if item.quantity == quantity:
                return item
        raise KeyError(quantity)

    def write_csv(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        header = ["quantity", "order", "fit_residual", *(f"level_{i}" for i in range(len(self.summaries)))]
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for item in self.estimates:
                writer.writerow(item.as_row())
        self.table_path = path
        return path


class ConvergenceRunner:
    """Runs ladder levels as independent jobs and fits an order per monitored quantity."""

    def __init__(
        self, ledger: RunLedger, *, workers: int = 1, floor: float = 1e-11, fresh: bool = False
    ) -> None:
        self.ledger = ledger
        self.workers = max(1, workers)
        self.floor = floor
        self.fresh = fresh

    def run_level(self, config: RunConfig) -> dict[str, Any]:
        digest = config.digest()
        if self.fresh:
            self.ledger.clear(digest)
        cached = self.ledger.read(digest, "summary")
        if cached is not None:
            logger.warning("reusing stored summary for %s (%s)", config.output.directory, digest[:12])
            return cached
        return run_simulation_workflow(config, ledger=self.ledger, analyze=False).summary

    def __call__(self, study: ConvergenceStudy) -> ConvergenceReport:
        configs = study.configs()
        ordered: list[dict[str, Any] | None] = [None] * len(configs)
        worker_count = min(self.workers, len(configs))
        with ThreadPoolExecutor(max_workers=worker_count) as executor:
            futures = {executor.submit(self.run_level, config): idx for idx, config in enumerate(configs)}
            for future in as_completed(futures):
                idx = futures[future]
                ordered[idx] = future.result()
                logger.info("ladder level %d of %d done", idx + 1, len(configs))

        summaries = [summary for summary in ordered if summary is not None]
        spacings = tuple(float(summary["h"]) for summary in summaries)
        estimates = []
        for quantity in study.monitored:
            if any(quantity not in summary["sup"] for summary in summaries):
                raise ConfigurationError(f"quantity {quantity!r} is not monitored by the {study.base.engine} engine")
            values = tuple(float(summary["sup"][quantity]) for summary in summaries)
            order, residual = fit_order(spacings, values, self.floor)
            estimates.append(OrderEstimate(quantity, spacings, values, order, residual))
        return ConvergenceReport(study, summaries, estimates)


def run_convergence(
    study: ConvergenceStudy,
    *,
    ledger: RunLedger | None = None,
    settings_override: Settings | None = None,
    fresh: bool = False,
) -> ConvergenceReport:
    """Run the ladder and write ``orders.csv`` next to the per-level output directories.

    With ``fresh`` every level drops its ledger entries first and is recomputed.
    """
    cfg = settings_override or settings
    runner = ConvergenceRunner(
        ledger or RunLedger(redis_url=cfg.redis_url),
        workers=cfg.workers,
        floor=cfg.order_floor,
        fresh=fresh,
    )
    report = runner(study)
    report.write_csv(Path(study.base.output.directory) / "orders.csv")
    return report
