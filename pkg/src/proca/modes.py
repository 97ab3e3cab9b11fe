"""Plane-wave oracles: dispersion relations, mode data and frequency measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.optimize import least_squares

from .errors import ConfigurationError, HyperbolicityError, MeasurementError
from .geometry import MediumSpec, classify_symbol
from .grid import GridSpec, SpatialField

Wavevector = float | Sequence[float]

MIN_PERIODS = 4.0
_PAD_FACTOR = 16


class ModeKind(str, Enum):
    TRANSVERSE = "transverse"
    LONGITUDINAL = "longitudinal"


@dataclass(frozen=True, slots=True)
class DispersionMode:
    kind: ModeKind
    k: tuple[float, float, float]
    omega: float
    polarization: tuple[float, float, float]

    def __post_init__(self) -> None:
        k = np.asarray(self.k)
        p = np.asarray(self.polarization)
        if self.omega < 0.0:
            raise ConfigurationError("mode frequency must be non-negative")
        if abs(np.linalg.norm(p) - 1.0) > 1e-12:
            raise ConfigurationError("polarization must be a unit vector")
        k_norm = np.linalg.norm(k)
        if self.kind is ModeKind.TRANSVERSE and abs(np.dot(k, p)) > 1e-12 * max(1.0, k_norm):
            raise ConfigurationError("transverse polarization must be orthogonal to k")
        if self.kind is ModeKind.LONGITUDINAL and np.linalg.norm(np.cross(k, p)) > 1e-12 * max(1.0, k_norm):
            raise ConfigurationError("longitudinal polarization must be parallel to k")


def _as_vector(k: Wavevector) -> npt.NDArray[np.float64]:
    vec = np.zeros(3)
    values = np.atleast_1d(np.asarray(k, dtype=float))
    if values.size > 3:
        raise ConfigurationError("wavevectors have at most three components")
    vec[: values.size] = values
    return vec


def _uniform_index(medium: MediumSpec) -> float:
    if not medium.is_uniform:
        raise ConfigurationError("plane-wave dispersion needs a uniform refractive index")
    return float(medium.n)


def dispersion_transverse(k: Wavevector, medium: MediumSpec) -> float:
    """ω from n² ω² = |k|² + μ²."""
    n = _uniform_index(medium)
    k2 = float(np.sum(_as_vector(k) ** 2))
    return math.sqrt(k2 + medium.mu_p**2) / n


def dispersion_longitudinal(k: Wavevector, medium: MediumSpec) -> float:
    """ω from (1 - λ) ω² = |k|² + μ² n⁻² (1 - λ)."""
    n = _uniform_index(medium)
    lam = medium.effective_lambda
    symbol = classify_symbol(lam)
    if not symbol.is_hyperbolic:
        raise HyperbolicityError(symbol, lam)
    k2 = float(np.sum(_as_vector(k) ** 2))
    return math.sqrt(k2 / (1.0 - lam) + medium.mu_p**2 / n**2)


def default_polarization(kind: ModeKind | str, k: Wavevector) -> npt.NDArray[np.float64]:
    """k̂ for longitudinal modes; for transverse ones k × ẑ, or k × ŷ when k ∥ ẑ."""
    kvec = _as_vector(k)
    k_norm = float(np.linalg.norm(kvec))
    if ModeKind(kind) is ModeKind.LONGITUDINAL:
        if k_norm == 0.0:
            raise ConfigurationError("a longitudinal mode at k = 0 needs an explicit polarization")
        return kvec / k_norm
    if k_norm == 0.0:
        return np.array([0.0, 1.0, 0.0])
    pol = np.cross(kvec, [0.0, 0.0, 1.0])
    if np.linalg.norm(pol) == 0.0:
        pol = np.cross(kvec, [0.0, 1.0, 0.0])
    return pol / np.linalg.norm(pol)


def make_mode(
    kind: ModeKind | str,
    k: Wavevector,
    medium: MediumSpec,
    polarization: Sequence[float] | None = None,
) -> DispersionMode:
    kind = ModeKind(kind)
    kvec = _as_vector(k)
    if polarization is None:
        pol = default_polarization(kind, kvec)
    else:
        pol = _as_vector(polarization)
        pol = pol / np.linalg.norm(pol)
    omega = dispersion_transverse(kvec, medium) if kind is ModeKind.TRANSVERSE else dispersion_longitudinal(kvec, medium)
    return DispersionMode(kind, tuple(kvec), omega, tuple(pol))


def plane_wave_free_data(mode: DispersionMode, amplitude: float, grid: GridSpec) -> tuple[SpatialField, SpatialField]:
    """(A_i, ∂₀A_i) at t = 0 of the travelling wave A_i = a p_i sin(k·x - ωt)."""
    kvec = np.asarray(mode.k)
    for axis in range(3):
        if axis >= grid.dim:
            if kvec[axis] != 0.0:
                raise ConfigurationError(f"k has a component along unresolved axis {axis}")
            continue
        cycles = kvec[axis] * grid.lengths[axis] / (2.0 * math.pi)
        if abs(cycles - round(cycles)) > 1e-9 * max(1.0, abs(cycles)):
            raise ConfigurationError(f"k component {kvec[axis]} is not commensurate with box length {grid.lengths[axis]}")
    coords = grid.coordinates()
    phase = sum(kvec[a] * coords[a] for a in range(grid.dim))
    pol = np.asarray(mode.polarization).reshape((3,) + (1,) * grid.dim)
    ai = amplitude * pol * np.sin(phase)
    dai = -amplitude * mode.omega * pol * np.cos(phase)
    return ai, dai


def _fft_peak(x: npt.NDArray[np.float64], dt: float) -> float:
    nfft = _PAD_FACTOR * x.size
    spectrum = np.abs(np.fft.rfft(x * np.hanning(x.size), n=nfft))
    spectrum[0] = 0.0
    i = int(np.argmax(spectrum[1:-1])) + 1
    if spectrum[i] <= 10.0 * float(np.median(spectrum)):
        raise MeasurementError("no spectral peak above the noise floor")
    a, b, c = np.log(spectrum[i - 1 : i + 2] + np.finfo(float).tiny)
    denom = a - 2.0 * b + c
    delta = 0.5 * (a - c) / denom if denom != 0.0 else 0.0
    return 2.0 * math.pi * (i + delta) / (nfft * dt)


def measure_frequency(series: Sequence[float] | npt.NDArray[np.float64], dt: float, *, refine: bool = True) -> float:
    """Dominant angular frequency of a uniformly sampled series.

    Hann-windowed, zero-padded FFT peak with quadratic interpolation, then
    optionally a least-squares sinusoid fit seeded from it.
    """
    raw = np.asarray(series, dtype=float)
    if raw.ndim != 1 or raw.size < 8:
        raise MeasurementError("need a one-dimensional series of at least 8 samples")
    x = raw - raw.mean()
    scale = float(np.max(np.abs(raw)))
    if scale == 0.0 or float(np.max(np.abs(x))) <= 1e-10 * scale:
        raise MeasurementError("series is constant; no spectral peak")
    omega = _fft_peak(x, dt)
    duration = dt * (raw.size - 1)
    if omega * duration < 2.0 * math.pi * MIN_PERIODS:
        raise MeasurementError(f"only {omega * duration / (2.0 * math.pi):.2f} periods sampled, need {MIN_PERIODS}")
    if not refine:
        return omega

    t = dt * np.arange(raw.size)

    def residual(params: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        basis = np.column_stack([np.ones_like(t), np.cos(params[0] * t), np.sin(params[0] * t)])
        coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
        return x - basis @ coef

    half_bin = math.pi / duration
    fit = least_squares(residual, x0=[omega], bounds=([omega - half_bin], [omega + half_bin]), xtol=1e-14, ftol=1e-14)
    return float(fit.x[0])
