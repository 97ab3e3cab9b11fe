"""Binary field snapshots.

Layout, all little-endian::

    8 bytes   magic b"PRCSNAP1"
    uint32    dim
    uint32    ncomp
    uint32    N[dim]
    float64   L[dim]
    float64   t
    float64   data[ncomp][N_0]...[N_{dim-1}]   (C order)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt

from .errors import ConfigurationError
from .grid import GridSpec

MAGIC = b"PRCSNAP1"


@dataclass(frozen=True, slots=True)
class Snapshot:
    points: tuple[int, ...]
    lengths: tuple[float, ...]
    t: float
    data: npt.NDArray[np.float64]

    def matches(self, grid: GridSpec) -> bool:
        return self.points == grid.shape and np.allclose(self.lengths, grid.lengths, rtol=1e-12, atol=0.0)


def write_snapshot(path: Path, grid: GridSpec, t: float, data: np.ndarray) -> Path:
    data = np.asarray(data, dtype=float)
    if data.shape[1:] != grid.shape:
        raise ConfigurationError(f"snapshot data {data.shape} does not match grid {grid.shape}")
    dim = grid.dim
    header = MAGIC + struct.pack(
        f"<II{dim}I{dim}dd", dim, data.shape[0], *grid.shape, *grid.lengths, float(t)
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(header)
        handle.write(np.ascontiguousarray(data, dtype="<f8").tobytes())
    return path


def read_snapshot(path: Path) -> Snapshot:
    raw = path.read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise ConfigurationError(f"{path} is not a field snapshot")
    offset = len(MAGIC)
    dim, ncomp = struct.unpack_from("<II", raw, offset)
    offset += 8
    if not 1 <= dim <= 3:
        raise ConfigurationError(f"{path}: unsupported snapshot dimension {dim}")
    points = struct.unpack_from(f"<{dim}I", raw, offset)
    offset += 4 * dim
    lengths = struct.unpack_from(f"<{dim}d", raw, offset)
    offset += 8 * dim
    (t,) = struct.unpack_from("<d", raw, offset)
    offset += 8
    count = ncomp * int(np.prod(points))
    if len(raw) - offset != 8 * count:
        raise ConfigurationError(f"{path}: payload size does not match its header")
    data = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).astype(float)
    return Snapshot(
        points=tuple(int(p) for p in points),
        lengths=tuple(float(L) for L in lengths),
        t=float(t),
        data=data.reshape((ncomp, *points)),
    )
