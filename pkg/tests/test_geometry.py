from __future__ import annotations

import math

import numpy as np
import pytest
import sympy as sp

from proca.errors import ConfigurationError, DomainError
from proca.geometry import (
    MediumSpec,
    MetricComponents,
    SymbolKind,
    build_geometry,
    christoffels_static,
    classify_symbol,
    gordon_metric,
    index_profile,
    mass_metric,
    ricci_static,
)
from proca.grid import GridSpec

AMPLITUDE = 0.1


def _symbolic_curvature():
    """Christoffels and Ricci of diag(-n(x)^-2, 1, 1, 1) with n = 1 + 0.1 sin x."""
    t, x, y, z = coords = sp.symbols("t x y z")
    n = 1 + sp.Rational(1, 10) * sp.sin(x)
    metric = sp.diag(-1 / n**2, 1, 1, 1)
    inverse = metric.inv()
    christoffel = [
        [
            [
                sp.simplify(
                    sum(
                        inverse[a, d]
                        * (sp.diff(metric[d, c], coords[b]) + sp.diff(metric[d, b], coords[c]) - sp.diff(metric[b, c], coords[d]))
                        for d in range(4)
                    )
                    / 2
                )
                for c in range(4)
            ]
            for b in range(4)
        ]
        for a in range(4)
    ]
    ricci = sp.zeros(4, 4)
    for m in range(4):
        for v in range(4):
            ricci[m, v] = sp.simplify(
                sum(sp.diff(christoffel[a][m][v], coords[a]) for a in range(4))
                - sum(sp.diff(christoffel[a][m][a], coords[v]) for a in range(4))
                + sum(christoffel[a][a][b] * christoffel[b][m][v] for a in range(4) for b in range(4))
                - sum(christoffel[a][v][b] * christoffel[b][m][a] for a in range(4) for b in range(4))
            )
    return x, n, christoffel, ricci


@pytest.fixture(scope="module")
def symbolic_curvature():
    return _symbolic_curvature()


def _evaluate(expr, x_symbol, x):
    return np.broadcast_to(sp.lambdify(x_symbol, expr, "numpy")(x), x.shape).astype(float)


def _sine_medium(points: int) -> tuple[MediumSpec, GridSpec]:
    grid = GridSpec.uniform(1, points)
    return MediumSpec(index_profile("sine", grid, 1.0, AMPLITUDE), mu_p=1.0), grid


def test_gordon_metric_constant_index():
    metric = gordon_metric(MediumSpec(1.5, 1.0))
    assert metric.inv[0, 0] == pytest.approx(-2.25)
    assert metric.fwd[0, 0] == pytest.approx(-1 / 2.25)
    assert metric.inv[1, 1] == pytest.approx(1.0)
    assert metric.det == pytest.approx(-1 / 2.25)
    assert metric.identity_defect() < 1e-14


def test_mass_metric_family():
    assert mass_metric(MediumSpec(1.5, 1.0, lam=0.5)).inv[0, 0] == pytest.approx(-0.5)
    assert mass_metric(MediumSpec(1.5, 1.0, lam=0.0)).inv[0, 0] == pytest.approx(-1.0)
    gordon = mass_metric(MediumSpec(1.5, 1.0))
    assert gordon.inv[0, 0] == pytest.approx(-2.25)


def test_pointwise_metric_on_a_varying_index():
    medium, grid = _sine_medium(32)
    metric = gordon_metric(MediumSpec(medium.index_field(grid), 1.0))
    assert metric.inv.shape == (4, 4, 32)
    assert metric.identity_defect() < 1e-13
    n = medium.index_field(grid)
    assert np.allclose(metric.fwd[0, 0], -1 / n**2)


def test_optical_determinant_scales_with_index():
    medium, grid = _sine_medium(32)
    n = medium.index_field(grid)
    background = MetricComponents.from_inverse(np.diag([-1.0, 1.0, 1.0, 1.0]))
    optical = gordon_metric(MediumSpec(n, 1.0))
    assert background.det == pytest.approx(-1.0)
    assert np.allclose(n**2 * optical.det, background.det, rtol=1e-13, atol=0.0)


@pytest.mark.parametrize(
    "lam, kind, speed",
    [
        (0.0, SymbolKind.HYPERBOLIC, 1.0),
        (0.5, SymbolKind.HYPERBOLIC, math.sqrt(2.0)),
        (1.0, SymbolKind.ELLIPTIC_3D, None),
        (1.5, SymbolKind.ELLIPTIC_4D, None),
    ],
)
def test_classify_symbol(lam, kind, speed):
    symbol = classify_symbol(lam)
    assert symbol.kind is kind
    if speed is None:
        assert symbol.speed is None
        assert not symbol.is_hyperbolic
    else:
        assert symbol.speed == pytest.approx(speed)


@pytest.mark.parametrize("lam", [float("nan"), float("inf"), float("-inf")])
def test_classify_symbol_rejects_non_finite_lambda(lam):
    with pytest.raises(DomainError):
        classify_symbol(lam)


def test_near_elliptic_lambda_is_still_hyperbolic():
    symbol = classify_symbol(0.999)
    assert symbol.is_hyperbolic
    assert symbol.speed == pytest.approx(1 / math.sqrt(0.001))


@pytest.mark.parametrize("n, mu", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (float("nan"), 1.0)])
def test_medium_rejects_bad_parameters(n, mu):
    with pytest.raises(DomainError):
        MediumSpec(n, mu)


def test_effective_lambda():
    assert MediumSpec(1.5, 1.0).effective_lambda == pytest.approx(1 - 2.25)
    assert MediumSpec(1.5, 1.0, lam=0.3).effective_lambda == 0.3
    medium, _ = _sine_medium(16)
    with pytest.raises(ConfigurationError):
        medium.effective_lambda


def test_constant_index_is_flat():
    grid = GridSpec.uniform(2, 16)
    geometry = build_geometry(MediumSpec(1.5, 1.0), grid)
    assert np.all(geometry.christoffel.components == 0.0)
    assert np.all(geometry.ricci.components == 0.0)


def test_christoffels_match_closed_form(symbolic_curvature):
    x_symbol, _, christoffel, _ = symbolic_curvature
    medium, grid = _sine_medium(256)
    numeric = christoffels_static(medium, grid).components
    (x,) = grid.coordinates()
    for a in range(4):
        for b in range(4):
            for c in range(4):
                exact = _evaluate(christoffel[a][b][c], x_symbol, x)
                assert np.max(np.abs(numeric[a, b, c] - exact)) < 1e-4, (a, b, c)


def test_ricci_matches_computer_algebra(symbolic_curvature):
    x_symbol, n, _, ricci = symbolic_curvature
    lapse = 1 / n
    samples = np.linspace(0.0, 2 * math.pi, 17)
    static_identities = (
        ricci[0, 0] - lapse * sp.diff(lapse, x_symbol, 2),
        ricci[1, 1] + sp.diff(lapse, x_symbol, 2) / lapse,
    )
    for identity in static_identities:
        assert np.max(np.abs(_evaluate(identity, x_symbol, samples))) < 1e-12

    errors = []
    for points in (128, 256):
        medium, grid = _sine_medium(points)
        numeric = ricci_static(christoffels_static(medium, grid), grid).components
        (x,) = grid.coordinates()
        errors.append(
            max(
                np.max(np.abs(numeric[m, v] - _evaluate(ricci[m, v], x_symbol, x)))
                for m in range(4)
                for v in range(4)
            )
        )
    assert errors[1] < 1e-3
    assert errors[0] / errors[1] > 3.0


def test_ricci_is_symmetric():
    medium, grid = _sine_medium(64)
    geometry = build_geometry(medium, grid)
    assert geometry.ricci.asymmetry() < 1e-12


def test_log_index_gradient():
    medium, grid = _sine_medium(256)
    chris = christoffels_static(medium, grid)
    (x,) = grid.coordinates()
    n = 1 + AMPLITUDE * np.sin(x)
    expected = AMPLITUDE * np.cos(x) / n
    assert np.max(np.abs(chris.log_index_gradient[1] - expected)) < 1e-4
    assert np.all(chris.log_index_gradient[0] == 0.0)


@pytest.mark.parametrize("name", ["sine", "gaussian"])
def test_index_profiles_vary_along_first_axis(name):
    grid = GridSpec.uniform(2, 16)
    n = index_profile(name, grid, 1.0, 0.2, width=1.0)
    assert n.shape == grid.shape
    assert np.allclose(n, n[:, :1])
    assert np.min(n) >= 0.8 - 1e-12
    medium = MediumSpec(n, 1.0)
    assert medium.n_min == pytest.approx(np.min(n))
    assert medium.n_max <= 1.2 + 1e-12


def test_unknown_index_profile():
    with pytest.raises(ConfigurationError):
        index_profile("step", GridSpec.uniform(1, 16), 1.0)
