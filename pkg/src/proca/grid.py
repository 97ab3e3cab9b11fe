"""Periodic Cartesian grids, centered finite-difference stencils and norms.

Fields are plain ``numpy`` arrays. A scalar field has the grid's shape; stacked
fields (a covector, three spatial components, a packed state) carry their
component axes in front, and every operator here acts on the trailing grid axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import ConfigurationError, DomainError

ScalarField = npt.NDArray[np.float64]
SpatialField = npt.NDArray[np.float64]  # shape (3, *grid.shape)
CovectorField = npt.NDArray[np.float64]  # shape (4, *grid.shape)

SUPPORTED_ORDERS = (2, 4)
MIN_POINTS = 8


@dataclass(frozen=True, slots=True)
class GridSpec:
    """Uniform periodic box in 1 to 3 dimensions."""

    points: tuple[int, ...]
    lengths: tuple[float, ...]
    order: int = 2

    def __post_init__(self) -> None:
        if not 1 <= len(self.points) <= 3:
            raise ConfigurationError(f"grid dimension must be 1, 2 or 3, got {len(self.points)}")
        if len(self.lengths) != len(self.points):
            raise ConfigurationError("one box length is required per grid axis")
        if any(int(p) < MIN_POINTS for p in self.points):
            raise ConfigurationError(f"every axis needs at least {MIN_POINTS} points: {self.points}")
        if any(not (L > 0.0 and math.isfinite(L)) for L in self.lengths):
            raise ConfigurationError(f"box lengths must be positive and finite: {self.lengths}")
        if self.order not in SUPPORTED_ORDERS:
            raise ConfigurationError(f"stencil order must be one of {SUPPORTED_ORDERS}, got {self.order}")

    @classmethod
    def uniform(cls, dim: int, points: int, length: float = 2.0 * math.pi, order: int = 2) -> "GridSpec":
        return cls(points=(points,) * dim, lengths=(float(length),) * dim, order=order)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(p) for p in self.points)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / p for L, p in zip(self.lengths, self.points))

    @property
    def h_min(self) -> float:
        return min(self.spacing)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(tuple(p * factor for p in self.points), self.lengths, self.order)

    def axis_coordinates(self, axis: int) -> npt.NDArray[np.float64]:
        return np.arange(self.points[axis]) * self.spacing[axis]

    def coordinates(self) -> tuple[npt.NDArray[np.float64], ...]:
        axes = [self.axis_coordinates(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def zeros(self, *components: int) -> npt.NDArray[np.float64]:
        return np.zeros((*components, *self.shape))

    def mode_numbers(self) -> tuple[npt.NDArray[np.float64], ...]:
        """Integer Fourier mode indices per axis, broadcast over the grid."""
        freqs = [np.fft.fftfreq(p, d=1.0 / p) for p in self.points]
        return tuple(np.meshgrid(*freqs, indexing="ij"))

    def laplacian_symbol(self) -> npt.NDArray[np.float64]:
        """Non-negative symbol s(k) with Laplacian(e^{ikx}) = -s(k) e^{ikx} for the compact stencil."""
        total = np.zeros(self.shape)
        for axis, m in enumerate(self.mode_numbers()):
            h = self.spacing[axis]
            theta = 2.0 * math.pi * m / self.points[axis]
            if self.order == 2:
                total += (2.0 - 2.0 * np.cos(theta)) / h**2
            else:
                total += (30.0 - 32.0 * np.cos(theta) + 2.0 * np.cos(2.0 * theta)) / (12.0 * h**2)
        return total


def _grid_axis(f: np.ndarray, axis: int, grid: GridSpec) -> int:
    if not 0 <= axis < grid.dim:
        raise DomainError(f"axis {axis} out of range for a {grid.dim}-dimensional grid")
    if f.shape[f.ndim - grid.dim :] != grid.shape:
        raise ConfigurationError(f"field shape {f.shape} does not end with grid shape {grid.shape}")
    return f.ndim - grid.dim + axis


def derivative(f: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Centered periodic first derivative along ``axis``."""
    ax = _grid_axis(f, axis, grid)
    h = grid.spacing[axis]
    if grid.order == 2:
        return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * h)
    return (
        -np.roll(f, -2, axis=ax)
        + 8.0 * np.roll(f, -1, axis=ax)
        - 8.0 * np.roll(f, 1, axis=ax)
        + np.roll(f, 2, axis=ax)
    ) / (12.0 * h)


def second_derivative(f: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Compact centered second derivative along ``axis``."""
    ax = _grid_axis(f, axis, grid)
    h = grid.spacing[axis]
    if grid.order == 2:
        return (np.roll(f, -1, axis=ax) - 2.0 * f + np.roll(f, 1, axis=ax)) / h**2
    return (
        -np.roll(f, -2, axis=ax)
        + 16.0 * np.roll(f, -1, axis=ax)
        - 30.0 * f
        + 16.0 * np.roll(f, 1, axis=ax)
        - np.roll(f, 2, axis=ax)
    ) / (12.0 * h**2)


def laplacian(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    result = np.zeros_like(f, dtype=float)
    for axis in range(grid.dim):
        result += second_derivative(f, axis, grid)
    return result


def spatial_derivative(f: np.ndarray, i: int, grid: GridSpec) -> np.ndarray:
    """∂_i for a spatial index i in 0..2; directions the grid does not resolve give zero."""
    if i >= grid.dim:
        return np.zeros_like(f, dtype=float)
    return derivative(f, i, grid)


def divergence(v: SpatialField, grid: GridSpec) -> ScalarField:
    """∂_i v_i for a three-component spatial field."""
    result = np.zeros(v.shape[1:])
    for i in range(min(3, grid.dim)):
        result += derivative(v[i], i, grid)
    return result


def gradient(f: ScalarField, grid: GridSpec) -> SpatialField:
    return np.stack([spatial_derivative(f, i, grid) for i in range(3)])


def norm_l2(f: np.ndarray, grid: GridSpec) -> float:
    """Grid-weighted L2 norm, summed over any leading component axes."""
    return float(np.sqrt(np.sum(np.square(f)) * grid.cell_volume))


def norm_linf(f: np.ndarray) -> float:
    if f.size == 0:
        return 0.0
    return float(np.max(np.abs(f)))


def random_bandlimited(
    seed: int | Sequence[int],
    kmax: float,
    grid: GridSpec,
) -> ScalarField:
    """Zero-mean random trigonometric polynomial with mode numbers 0 < |m| <= kmax.

    ``kmax`` counts integer mode numbers, so the physical wavenumbers are
    2*pi*m/L. The coefficients are drawn on the mode box [-kmax, kmax]^dim, not
    on the grid, so one seed gives the same continuum field at every
    resolution; it is normalized by the sum of coefficient moduli, which
    bounds |f| by one.
    """
    nyquist = min(grid.points) // 2
    if not 0 < kmax < nyquist:
        raise DomainError(f"kmax={kmax} must lie in (0, {nyquist}) for grid {grid.shape}")
    rng = np.random.default_rng(seed)
    reach = int(math.floor(kmax))
    box = np.meshgrid(*[np.arange(-reach, reach + 1)] * grid.dim, indexing="ij")
    radius = np.sqrt(sum(m**2 for m in box))
    coeffs = rng.standard_normal(box[0].shape) + 1j * rng.standard_normal(box[0].shape)
    coeffs = np.where((radius <= kmax) & (radius > 0), coeffs, 0.0)
    spectrum = np.zeros(grid.shape, dtype=complex)
    spectrum[tuple(m % p for m, p in zip(box, grid.points))] = coeffs
    field = np.real(np.fft.ifftn(spectrum)) * math.prod(grid.points)
    return field / np.sum(np.abs(coeffs))
