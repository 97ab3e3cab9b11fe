from __future__ import annotations

import hashlib
import io
import math
import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np
from dotenv import dotenv_values, load_dotenv

from .errors import ConfigurationError, DomainError, HyperbolicityError
from .geometry import MediumSpec, classify_symbol, index_profile
from .grid import SUPPORTED_ORDERS, GridSpec
from .modes import ModeKind, default_polarization


load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"Environment variable {name} must be an integer") from exc


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ValueError(f"Environment variable {name} must be a number") from exc


@dataclass(slots=True)
class Settings:
    """Process-wide settings for the simulation harness."""

    workers: int = field(default=1)
    log_level: str = field(default="INFO")
    redis_url: str | None = field(default=None)
    order_floor: float = field(default=1e-11)

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            workers=max(1, _env_int("PROCA_WORKERS", 1)),
            log_level=os.getenv("PROCA_LOG_LEVEL", "INFO").upper(),
            redis_url=os.getenv("PROCA_REDIS_URL"),
            order_floor=_env_float("PROCA_ORDER_FLOOR", 1e-11),
        )


settings = Settings.from_env()


ENGINES = ("flat", "gordon")
INIT_KINDS = ("random", "plane_wave", "file")
PROFILES = ("constant", "sine", "gaussian")
PROBES = ("auto", "a0", "a1", "a2", "a3")
REQUIRED_KEYS = ("engine", "points", "n", "mu_p", "t_end")
KNOWN_KEYS = frozenset(
    {
        "engine", "dim", "points", "lengths", "order",
        "n", "n_profile", "n_amplitude", "n_mode", "n_width", "lambda", "mu_p",
        "init", "seed", "kmax", "amplitude", "mode_kind", "mode_k", "init_path",
        "cfl", "dt", "t_end", "sample_every", "keep_levels",
        "probe", "probe_index", "output_dir", "snapshot_every",
    }
)

_PI_MULTIPLE = re.compile(r"^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*$")


@dataclass(frozen=True, slots=True)
class GridConfig:
    dim: int
    points: tuple[int, ...]
    lengths: tuple[float, ...]
    order: int = 2

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise DomainError(f"dim must be 1, 2 or 3, got {self.dim}")
        if len(self.points) != self.dim or len(self.lengths) != self.dim:
            raise DomainError("points and lengths need one entry per dimension")
        if self.order not in SUPPORTED_ORDERS:
            raise DomainError(f"order must be one of {SUPPORTED_ORDERS}, got {self.order}")

    def spec(self) -> GridSpec:
        return GridSpec(self.points, self.lengths, self.order)


@dataclass(frozen=True, slots=True)
class MediumConfig:
    n: float
    mu_p: float
    profile: str = "constant"
    amplitude: float = 0.0
    mode: int = 1
    width: float = 0.5
    lam: float | None = None

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ConfigurationError(f"n_profile must be one of {PROFILES}, got {self.profile!r}")
        if self.n <= 0.0:
            raise DomainError(f"n must be positive, got {self.n}")
        if self.mu_p < 0.0:
            raise DomainError(f"mu_p must be non-negative, got {self.mu_p}")
        if self.profile != "constant" and self.n - abs(self.amplitude) <= 0.0:
            raise DomainError("n_amplitude would make the index non-positive")
        if self.width <= 0.0:
            raise DomainError(f"n_width must be positive, got {self.width}")

    def medium(self, grid: GridSpec) -> MediumSpec:
        n = index_profile(self.profile, grid, self.n, self.amplitude, self.mode, self.width)
        return MediumSpec(n, self.mu_p, self.lam)


@dataclass(frozen=True, slots=True)
class InitConfig:
    kind: str = "random"
    seed: int = 0
    kmax: int = 4
    amplitude: float = 1.0
    mode_kind: str = ModeKind.TRANSVERSE.value
    mode_k: tuple[float, ...] = (1.0,)
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in INIT_KINDS:
            raise ConfigurationError(f"init must be one of {INIT_KINDS}, got {self.kind!r}")
        if self.mode_kind not in {kind.value for kind in ModeKind}:
            raise ConfigurationError(f"unknown mode_kind {self.mode_kind!r}")
        if self.kind == "file" and not self.path:
            raise ConfigurationError("init = file requires init_path")
        if self.kmax < 1:
            raise DomainError(f"kmax must be at least 1, got {self.kmax}")


@dataclass(frozen=True, slots=True)
class EvolutionConfig:
    t_end: float
    cfl: float = 0.25
    dt: float | None = None
    sample_every: int = 1
    keep_levels: bool = False

    def __post_init__(self) -> None:
        if self.t_end < 0.0:
            raise ConfigurationError(f"t_end must be non-negative, got {self.t_end}")
        if self.cfl <= 0.0:
            raise ConfigurationError(f"cfl must be positive, got {self.cfl}")
        if self.dt is not None and self.dt <= 0.0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.sample_every < 1:
            raise ConfigurationError("sample_every must be at least 1")


@dataclass(frozen=True, slots=True)
class OutputConfig:
    directory: str = "output"
    snapshot_every: int = 0
    probe: str = "auto"
    probe_index: int = 0

    def __post_init__(self) -> None:
        if self.probe not in PROBES:
            raise ConfigurationError(f"probe must be one of {PROBES}, got {self.probe!r}")
        if self.snapshot_every < 0 or self.probe_index < 0:
            raise ConfigurationError("snapshot_every and probe_index must be non-negative")


@dataclass(frozen=True, slots=True)
class RunConfig:
    """One reproducible run: every key of the plain-text run file, validated."""

    engine: str
    grid: GridConfig
    medium: MediumConfig
    evolution: EvolutionConfig
    init: InitConfig = field(default_factory=InitConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self) -> None:
        if self.engine not in ENGINES:
            raise ConfigurationError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.engine == "flat":
            if self.medium.profile != "constant":
                raise ConfigurationError("the flat engine requires a constant index (n_profile = constant)")
            lam = 0.0 if self.medium.lam is None else self.medium.lam
            symbol = classify_symbol(lam)
            if not symbol.is_hyperbolic:
                raise HyperbolicityError(symbol, lam)
        elif self.medium.lam is not None:
            raise ConfigurationError("engine = gordon fixes the mass metric to the optical metric; remove lambda")
        if self.output.probe_index >= math.prod(self.grid.points):
            raise DomainError(f"probe_index {self.output.probe_index} lies outside the grid")

    @property
    def lam(self) -> float | None:
        if self.engine == "flat":
            return 0.0 if self.medium.lam is None else self.medium.lam
        return None

    def grid_spec(self) -> GridSpec:
        return self.grid.spec()

    def medium_spec(self, grid: GridSpec | None = None) -> MediumSpec:
        grid = grid or self.grid_spec()
        return replace(self.medium, lam=self.lam).medium(grid)

    def probe_component(self) -> int:
        """Index μ of the A_μ component recorded in probe.csv."""
        if self.output.probe != "auto":
            return int(self.output.probe[1])
        if self.init.kind == "plane_wave" and self.init.mode_kind == ModeKind.TRANSVERSE.value:
            polarization = default_polarization(ModeKind.TRANSVERSE, self.init.mode_k)
            return 1 + int(np.argmax(np.abs(polarization)))
        return 0

    def refined(self, factor: int) -> "RunConfig":
        """Same run with ``factor`` times the points per axis and the output in a sub-directory."""
        grid = replace(self.grid, points=tuple(p * factor for p in self.grid.points))
        dt = None if self.evolution.dt is None else self.evolution.dt / factor
        evolution = replace(self.evolution, dt=dt, sample_every=self.evolution.sample_every * factor)
        return replace(self, grid=grid, evolution=evolution)

    def with_output(self, directory: str | Path) -> "RunConfig":
        return replace(self, output=replace(self.output, directory=str(directory)))

    # -- text form ---------------------------------------------------------

    @classmethod
    def from_mapping(cls, raw: Mapping[str, str | None]) -> "RunConfig":
        values = {key.strip().lower(): value for key, value in raw.items()}
        unknown = sorted(set(values) - KNOWN_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        missing = [key for key in REQUIRED_KEYS if values.get(key) in (None, "")]
        if missing:
            raise ConfigurationError(f"missing config keys: {', '.join(missing)}")
        reader = _Reader(values)

        dim = reader.integer("dim", 1)
        grid = GridConfig(
            dim=dim,
            points=tuple(int(p) for p in reader.expand("points", dim, int)),
            lengths=tuple(reader.expand("lengths", dim, _parse_length, default=2.0 * math.pi)),
            order=reader.integer("order", 2),
        )
        medium = MediumConfig(
            n=reader.number("n"),
            mu_p=reader.number("mu_p"),
            profile=reader.text("n_profile", "constant"),
            amplitude=reader.number("n_amplitude", 0.0),
            mode=reader.integer("n_mode", 1),
            width=reader.number("n_width", 0.5),
            lam=reader.optional_number("lambda"),
        )
        init = InitConfig(
            kind=reader.text("init", "random"),
            seed=reader.integer("seed", 0),
            kmax=reader.integer("kmax", 4),
            amplitude=reader.number("amplitude", 1.0),
            mode_kind=reader.text("mode_kind", ModeKind.TRANSVERSE.value),
            mode_k=tuple(reader.numbers("mode_k", (1.0,))),
            path=reader.optional_text("init_path"),
        )
        evolution = EvolutionConfig(
            t_end=reader.number("t_end"),
            cfl=reader.number("cfl", 0.25),
            dt=reader.optional_number("dt"),
            sample_every=reader.integer("sample_every", 1),
            keep_levels=reader.flag("keep_levels", False),
        )
        output = OutputConfig(
            directory=reader.text("output_dir", "output"),
            snapshot_every=reader.integer("snapshot_every", 0),
            probe=reader.text("probe", "auto"),
            probe_index=reader.integer("probe_index", 0),
        )
        engine = reader.text("engine")
        if engine == "flat" and medium.lam is None:
            medium = replace(medium, lam=0.0)
        return cls(engine, grid, medium, evolution, init, output)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls.from_mapping(dotenv_values(stream=io.StringIO(text), interpolate=False))

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"config file {path} does not exist")
        return cls.from_mapping(dotenv_values(path, interpolate=False))

    def to_mapping(self) -> dict[str, str]:
        entries: dict[str, str] = {
            "engine": self.engine,
            "dim": str(self.grid.dim),
            "points": _join(self.grid.points),
            "lengths": _join(self.grid.lengths),
            "order": str(self.grid.order),
            "n": repr(self.medium.n),
            "n_profile": self.medium.profile,
            "n_amplitude": repr(self.medium.amplitude),
            "n_mode": str(self.medium.mode),
            "n_width": repr(self.medium.width),
        }
        if self.medium.lam is not None:
            entries["lambda"] = repr(self.medium.lam)
        entries.update(
            {
                "mu_p": repr(self.medium.mu_p),
                "init": self.init.kind,
                "seed": str(self.init.seed),
                "kmax": str(self.init.kmax),
                "amplitude": repr(self.init.amplitude),
                "mode_kind": self.init.mode_kind,
                "mode_k": _join(self.init.mode_k),
            }
        )
        if self.init.path is not None:
            entries["init_path"] = self.init.path
        entries["cfl"] = repr(self.evolution.cfl)
        if self.evolution.dt is not None:
            entries["dt"] = repr(self.evolution.dt)
        entries.update(
            {
                "t_end": repr(self.evolution.t_end),
                "sample_every": str(self.evolution.sample_every),
                "keep_levels": "true" if self.evolution.keep_levels else "false",
                "probe": self.output.probe,
                "probe_index": str(self.output.probe_index),
                "output_dir": self.output.directory,
                "snapshot_every": str(self.output.snapshot_every),
            }
        )
        return entries

    def to_text(self) -> str:
        return "".join(f"{key} = {value}\n" for key, value in self.to_mapping().items())

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def _join(values: tuple[int, ...] | tuple[float, ...]) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def _parse_length(raw: str) -> float:
    match = _PI_MULTIPLE.match(raw)
    if match:
        factor = match.group(1)
        return (float(factor) if factor not in ("", "+", "-") else float(f"{factor}1")) * math.pi
    return float(raw)


class _Reader:
    """Typed access to the raw string values, raising ConfigurationError naming the key."""

    def __init__(self, values: Mapping[str, str | None]) -> None:
        self._values = values

    def _raw(self, key: str) -> str | None:
        value = self._values.get(key)
        if value is None:
            return None
        value = value.strip()
        return value or None

    def _convert(self, key: str, raw: str, kind: type | object) -> object:
        try:
            return kind(raw)  # type: ignore[operator]
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed value for {key}: {raw!r}") from exc

    def text(self, key: str, default: str | None = None) -> str:
        raw = self._raw(key)
        if raw is None:
            if default is None:
                raise ConfigurationError(f"missing config key {key}")
            return default
        return raw.lower() if key != "output_dir" else raw

    def optional_text(self, key: str) -> str | None:
        return self._raw(key)

    def number(self, key: str, default: float | None = None) -> float:
        raw = self._raw(key)
        if raw is None:
            if default is None:
                raise ConfigurationError(f"missing config key {key}")
            return default
        value = float(self._convert(key, raw, float))  # type: ignore[arg-type]
        if not math.isfinite(value):
            raise ConfigurationError(f"{key} must be finite")
        return value

    def optional_number(self, key: str) -> float | None:
        return None if self._raw(key) is None else self.number(key)

    def integer(self, key: str, default: int) -> int:
        raw = self._raw(key)
        return default if raw is None else int(self._convert(key, raw, int))  # type: ignore[arg-type]

    def flag(self, key: str, default: bool) -> bool:
        raw = self._raw(key)
        if raw is None:
            return default
        lowered = raw.lower()
        if lowered in {"1", "true", "yes", "on"}:
            return True
        if lowered in {"0", "false", "no", "off"}:
            return False
        raise ConfigurationError(f"malformed value for {key}: {raw!r}")

    def numbers(self, key: str, default: tuple[float, ...]) -> list[float]:
        raw = self._raw(key)
        if raw is None:
            return list(default)
        return [float(self._convert(key, part, float)) for part in raw.split(",")]  # type: ignore[arg-type]

    def expand(self, key: str, dim: int, kind: object, default: object = None) -> list:
        """A scalar or one entry per dimension, broadcast to ``dim`` entries."""
        raw = self._raw(key)
        if raw is None:
            if default is None:
                raise ConfigurationError(f"missing config key {key}")
            return [default] * dim
        parts = [self._convert(key, part.strip(), kind) for part in raw.split(",")]
        if len(parts) == 1:
            return parts * dim
        if len(parts) != dim:
            raise ConfigurationError(f"{key} needs 1 or {dim} entries, got {len(parts)}")
        return parts
