from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field, fields
from typing import Callable, ClassVar, Generic, TypeVar

import numpy as np
import numpy.typing as npt

from ..errors import CFLViolation, ConfigurationError, DivergenceError, InconsistentLevelsError
from ..geometry import MediumSpec
from ..grid import GridSpec

logger = logging.getLogger(__name__)

DEFAULT_CFL = 0.25


@dataclass(frozen=True, slots=True, eq=False)
class PackedState:
    """Evolved fields packed along a leading component axis, plus the time."""

    data: npt.NDArray[np.float64]
    t: float = 0.0

    COMPONENTS: ClassVar[int] = 0

    def __post_init__(self) -> None:
        if self.data.shape[0] != self.COMPONENTS:
            raise ConfigurationError(
                f"{type(self).__name__} packs {self.COMPONENTS} components, got {self.data.shape[0]}"
            )


@dataclass(frozen=True, slots=True)
class MonitorRecord:
    """Base for monitor reports: a flat row of finite, non-negative floats."""

    t: float

    @classmethod
    def csv_columns(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_row(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, name)) for name in self.csv_columns())


S = TypeVar("S", bound=PackedState)
R = TypeVar("R", bound=MonitorRecord)


@dataclass(slots=True)
class EvolutionResult(Generic[S, R]):
    final: S
    reports: list[R]
    levels: tuple[S, ...] = field(default_factory=tuple)
    steps: int = 0
    dt: float = 0.0


Observer = Callable[[int, PackedState], None]


class EvolutionEngine(ABC, Generic[S, R]):
    """Method-of-lines driver shared by both engines: RK4 in time, fixed step."""

    state_type: ClassVar[type[PackedState]]

    def __init__(self, medium: MediumSpec, grid: GridSpec, *, cfl: float = DEFAULT_CFL) -> None:
        if not cfl > 0.0:
            raise ConfigurationError(f"CFL factor must be positive, got {cfl}")
        self.medium = medium
        self.grid = grid
        self.cfl = cfl

    @property
    @abstractmethod
    def max_speed(self) -> float:
        """Fastest characteristic speed of the evolved system."""

    @abstractmethod
    def derivative(self, data: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Time derivative of packed state data."""

    @abstractmethod
    def monitors(self, state: S) -> R: ...

    @property
    def dt_limit(self) -> float:
        return self.cfl * self.grid.h_min / self.max_speed

    def check_dt(self, dt: float) -> None:
        if not dt > 0.0 or dt > self.dt_limit * (1.0 + 1e-12):
            raise CFLViolation(dt, self.dt_limit)

    def rhs(self, state: S) -> S:
        """The state's time derivative, packed like the state itself."""
        return type(state)(self.derivative(state.data), state.t)

    def _rk4(self, data: npt.NDArray[np.float64], dt: float) -> npt.NDArray[np.float64]:
        k1 = self.derivative(data)
        k2 = self.derivative(data + 0.5 * dt * k1)
        k3 = self.derivative(data + 0.5 * dt * k2)
        k4 = self.derivative(data + dt * k3)
        return data + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def step(self, state: S, dt: float) -> S:
        self.check_dt(dt)
        return type(state)(self._rk4(state.data, dt), state.t + dt)

    def evolve(
        self,
        state: S,
        t_end: float,
        dt: float | None = None,
        *,
        sample_every: int = 1,
        keep_levels: bool = False,
        observer: Observer | None = None,
    ) -> EvolutionResult[S, R]:
        """Advance to ``state.t + t_end`` with a uniform step no larger than ``dt``."""
        if sample_every < 1:
            raise ConfigurationError("sample_every must be at least 1")
        reports = [self.monitors(state)]
        levels: deque[S] = deque([state], maxlen=3)
        if observer:
            observer(0, state)
        if t_end <= 0.0:
            return EvolutionResult(state, reports, tuple(levels) if keep_levels else (), 0, 0.0)

        dt = self.dt_limit if dt is None else dt
        self.check_dt(dt)
        steps = max(1, math.ceil(t_end / dt - 1e-9))
        dt = t_end / steps
        logger.info("evolving %s over t=%.4g in %d steps of %.4g", type(self).__name__, t_end, steps, dt)

        data = state.data
        current = state
        for k in range(1, steps + 1):
            data = self._rk4(data, dt)
            t = state.t + k * dt
            if not np.all(np.isfinite(data)):
                raise DivergenceError(t)
            current = type(state)(data, t)
            levels.append(current)
            if observer:
                observer(k, current)
            if k % sample_every == 0 or k == steps:
                report = self.monitors(current)
                reports.append(report)
                logger.debug("t=%.4g %s", t, report)
        return EvolutionResult(current, reports, tuple(levels) if keep_levels else (), steps, dt)


def check_levels(levels: tuple[PackedState, ...]) -> float:
    """Uniform spacing of three consecutive levels; returns the step."""
    if len(levels) != 3:
        raise InconsistentLevelsError(f"three stored levels are required, got {len(levels)}")
    first = levels[1].t - levels[0].t
    second = levels[2].t - levels[1].t
    if not first > 0.0 or abs(second - first) > 1e-9 * max(1.0, abs(first)):
        raise InconsistentLevelsError(f"level spacings {first:.6g} and {second:.6g} differ")
    return 0.5 * (first + second)
