from __future__ import annotations

import math

import numpy as np
import pytest

from proca.errors import ConfigurationError, HyperbolicityError, MeasurementError
from proca.geometry import MediumSpec, index_profile
from proca.grid import GridSpec, divergence
from proca.modes import (
    DispersionMode,
    ModeKind,
    dispersion_longitudinal,
    dispersion_transverse,
    make_mode,
    measure_frequency,
    plane_wave_free_data,
)


def test_transverse_dispersion():
    assert dispersion_transverse(2.0, MediumSpec(2.0, 1.0)) == pytest.approx(math.sqrt(5) / 2)
    assert dispersion_transverse([0.0, 3.0, 4.0], MediumSpec(1.0, 0.0)) == pytest.approx(5.0)


def test_longitudinal_dispersion():
    assert dispersion_longitudinal(2.0, MediumSpec(1.0, 1.0, lam=0.5)) == pytest.approx(3.0)
    assert dispersion_longitudinal(0.0, MediumSpec(2.0, 1.0, lam=0.0)) == pytest.approx(0.5)


def test_gordon_mass_term_makes_both_polarizations_degenerate():
    medium = MediumSpec(1.5, 1.0)
    for k in (0.5, 2.0, 7.0):
        assert dispersion_longitudinal(k, medium) == pytest.approx(dispersion_transverse(k, medium))


@pytest.mark.parametrize("lam, kind", [(1.0, "elliptic-3d"), (1.5, "elliptic-4d")])
def test_longitudinal_dispersion_needs_hyperbolic_symbol(lam, kind):
    with pytest.raises(HyperbolicityError, match=kind):
        dispersion_longitudinal(1.0, MediumSpec(1.0, 1.0, lam=lam))


def test_dispersion_needs_uniform_index():
    grid = GridSpec.uniform(1, 16)
    medium = MediumSpec(index_profile("sine", grid, 1.0, 0.1), 1.0)
    with pytest.raises(ConfigurationError):
        dispersion_transverse(1.0, medium)


def test_make_mode_polarizations():
    medium = MediumSpec(1.0, 1.0, lam=0.5)
    transverse = make_mode("transverse", [2.0, 0.0, 0.0], medium)
    assert np.dot(transverse.k, transverse.polarization) == pytest.approx(0.0)
    assert np.linalg.norm(transverse.polarization) == pytest.approx(1.0)
    along_z = make_mode(ModeKind.TRANSVERSE, [0.0, 0.0, 1.0], medium)
    assert np.dot(along_z.k, along_z.polarization) == pytest.approx(0.0)
    longitudinal = make_mode("longitudinal", [0.0, 2.0], medium)
    assert longitudinal.polarization == pytest.approx((0.0, 1.0, 0.0))
    assert longitudinal.omega == pytest.approx(3.0)


def test_mode_rejects_wrong_polarization():
    with pytest.raises(ConfigurationError):
        DispersionMode(ModeKind.TRANSVERSE, (1.0, 0.0, 0.0), 1.0, (1.0, 0.0, 0.0))
    with pytest.raises(ConfigurationError):
        DispersionMode(ModeKind.LONGITUDINAL, (1.0, 0.0, 0.0), 1.0, (0.0, 1.0, 0.0))
    with pytest.raises(ConfigurationError):
        make_mode("longitudinal", 0.0, MediumSpec(1.0, 1.0, lam=0.0))


def test_plane_wave_free_data():
    grid = GridSpec.uniform(1, 64)
    medium = MediumSpec(2.0, 1.0, lam=0.0)
    mode = make_mode("transverse", [2.0], medium)
    ai, dai = plane_wave_free_data(mode, 0.5, grid)
    (x,) = grid.coordinates()
    component = int(np.argmax(np.abs(mode.polarization)))
    sign = mode.polarization[component]
    assert ai.shape == dai.shape == (3, 64)
    assert np.allclose(ai[component], 0.5 * sign * np.sin(2 * x))
    assert np.allclose(dai[component], -0.5 * mode.omega * sign * np.cos(2 * x))
    assert np.max(np.abs(divergence(ai, grid))) < 1e-14


def test_plane_wave_needs_commensurate_k():
    grid = GridSpec.uniform(1, 64)
    medium = MediumSpec(1.0, 1.0, lam=0.0)
    with pytest.raises(ConfigurationError):
        plane_wave_free_data(make_mode("transverse", [2.5], medium), 1.0, grid)
    with pytest.raises(ConfigurationError):
        plane_wave_free_data(make_mode("transverse", [0.0, 1.0], medium), 1.0, grid)


def test_measure_frequency_with_weak_contamination():
    dt = 0.01
    t = dt * np.arange(2001)
    series = np.cos(3 * t) + 0.01 * np.cos(7 * t) + 0.2
    assert measure_frequency(series, dt) == pytest.approx(3.0, rel=1e-4)
    assert measure_frequency(series, dt, refine=False) == pytest.approx(3.0, rel=1e-2)


def test_measure_frequency_resolves_small_shifts():
    dt = 0.02
    t = dt * np.arange(1500)
    omega = 1.1180339887
    assert measure_frequency(np.sin(omega * t + 0.4), dt) == pytest.approx(omega, rel=1e-7)


def test_constant_series_has_no_peak():
    with pytest.raises(MeasurementError):
        measure_frequency(np.full(512, 2.5), 0.1)


def test_too_few_periods():
    dt = 0.01
    t = dt * np.arange(1000)
    with pytest.raises(MeasurementError, match="periods"):
        measure_frequency(np.sin(0.5 * t), dt)
