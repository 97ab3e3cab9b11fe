from __future__ import annotations

from pathlib import Path
from typing import Callable

import pytest

from proca.config import RunConfig

BASE_KEYS = {
    "engine": "flat",
    "dim": "1",
    "points": "32",
    "lengths": "2pi",
    "n": "1.5",
    "lambda": "0.5",
    "mu_p": "1.0",
    "init": "random",
    "seed": "7",
    "kmax": "3",
    "t_end": "0.2",
}


def config_text(**overrides: str | None) -> str:
    keys = {**BASE_KEYS, **overrides}
    return "".join(f"{key} = {value}\n" for key, value in keys.items() if value is not None)


@pytest.fixture
def make_config(tmp_path: Path) -> Callable[..., RunConfig]:
    """RunConfig from the base keys plus overrides; ``None`` drops a key."""

    def factory(**overrides: str | None) -> RunConfig:
        overrides.setdefault("output_dir", str(tmp_path / "run"))
        return RunConfig.from_text(config_text(**overrides))

    return factory


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    def factory(name: str = "run.env", **overrides: str | None) -> Path:
        overrides.setdefault("output_dir", str(tmp_path / Path(name).stem))
        path = tmp_path / name
        path.write_text(config_text(**overrides), encoding="utf-8")
        return path

    return factory
