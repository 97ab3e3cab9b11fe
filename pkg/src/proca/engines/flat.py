"""Flat background, inertial medium, uniform index, mass metric g + λ u⊗u with λ < 1.

Evolved system (φ is an independent field):

    (1 - λ) ∂₀² A_0 = Δ A_0 - μ² n⁻² (1 - λ) A_0
    n² ∂₀² A_i      = Δ A_i - μ² A_i - (1 - λ - n²) ∂_i φ
    (1 - λ) ∂₀² φ   = Δ φ   - μ² n⁻² (1 - λ) φ
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
import numpy.typing as npt

from ..elliptic import ScreenedPoissonProblem, solve_screened_poisson
from ..errors import ConfigurationError, HyperbolicityError, UnsupportedLimitError
from ..geometry import MediumSpec, classify_symbol
from ..grid import (
    GridSpec,
    ScalarField,
    SpatialField,
    divergence,
    gradient,
    laplacian,
    norm_l2,
    norm_linf,
    spatial_derivative,
)
from .base import DEFAULT_CFL, EvolutionEngine, MonitorRecord, PackedState, check_levels

A0, DA0, PHI, DPHI = 0, 1, 8, 9
AI = slice(2, 5)
DAI = slice(5, 8)


@dataclass(frozen=True, slots=True, eq=False)
class FlatState(PackedState):
    COMPONENTS: ClassVar[int] = 10

    @classmethod
    def from_fields(
        cls,
        a0: ScalarField,
        da0: ScalarField,
        ai: SpatialField,
        dai: SpatialField,
        phi: ScalarField,
        dphi: ScalarField,
        t: float = 0.0,
    ) -> "FlatState":
        data = np.concatenate([a0[None], da0[None], ai, dai, phi[None], dphi[None]])
        return cls(data, t)

    @property
    def a0(self) -> ScalarField:
        return self.data[A0]

    @property
    def da0(self) -> ScalarField:
        return self.data[DA0]

    @property
    def ai(self) -> SpatialField:
        return self.data[AI]

    @property
    def dai(self) -> SpatialField:
        return self.data[DAI]

    @property
    def phi(self) -> ScalarField:
        return self.data[PHI]

    @property
    def dphi(self) -> ScalarField:
        return self.data[DPHI]

    def potential(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """(A_μ, ∂₀A_μ), each shaped (4, *grid.shape)."""
        return (
            np.concatenate([self.a0[None], self.ai]),
            np.concatenate([self.da0[None], self.dai]),
        )


@dataclass(frozen=True, slots=True)
class FlatMonitorReport(MonitorRecord):
    a0_l2: float
    ai_l2: float
    phi_l2: float
    c1_l2: float
    c1_linf: float
    c2_l2: float
    c2_linf: float
    gauss_l2: float
    gauss_linf: float


@dataclass(frozen=True, slots=True)
class FieldEquationResidual:
    """L2 norms of the original field equation per free index β, at the middle level."""

    t: float
    components: tuple[float, float, float, float]

    @property
    def total(self) -> float:
        return math.sqrt(sum(c * c for c in self.components))


class FlatEngine(EvolutionEngine[FlatState, FlatMonitorReport]):
    state_type = FlatState

    def __init__(self, medium: MediumSpec, grid: GridSpec, *, cfl: float = DEFAULT_CFL) -> None:
        super().__init__(medium, grid, cfl=cfl)
        if not medium.is_uniform:
            raise ConfigurationError("the flat engine needs a uniform refractive index")
        lam = medium.effective_lambda
        symbol = classify_symbol(lam)
        if not symbol.is_hyperbolic:
            raise HyperbolicityError(symbol, lam)
        self.lam = lam
        self.n = float(medium.n)
        self.mu2 = medium.mu_p**2
        self.screening = (1.0 - lam) * self.mu2 / self.n**2

    @property
    def max_speed(self) -> float:
        return max(1.0 / self.n, 1.0 / math.sqrt(1.0 - self.lam))

    def init_from_free_data(self, ai: SpatialField, dai: SpatialField) -> FlatState:
        """Complete free data (A_i, ∂₀A_i) into constrained Cauchy data at t = 0."""
        if self.mu2 == 0.0:
            raise UnsupportedLimitError("constrained initialization requires mu_p > 0")
        grid = self.grid
        div_a = divergence(ai, grid)
        div_da = divergence(dai, grid)
        a0 = solve_screened_poisson(ScreenedPoissonProblem(div_da, self.screening, grid))
        da0 = div_a / (1.0 - self.lam)
        dphi = div_da / (1.0 - self.lam)
        return FlatState.from_fields(a0, da0, np.array(ai, dtype=float), np.array(dai, dtype=float), da0.copy(), dphi)

    def derivative(self, data: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        grid = self.grid
        inv = 1.0 / (1.0 - self.lam)
        out = np.empty_like(data)
        out[A0] = data[DA0]
        out[DA0] = inv * (laplacian(data[A0], grid) - self.screening * data[A0])
        out[AI] = data[DAI]
        source = (1.0 - self.lam - self.n**2) * gradient(data[PHI], grid)
        out[DAI] = (laplacian(data[AI], grid) - self.mu2 * data[AI] - source) / self.n**2
        out[PHI] = data[DPHI]
        out[DPHI] = inv * (laplacian(data[PHI], grid) - self.screening * data[PHI])
        return out

    def gauss_residual(self, state: FlatState) -> ScalarField:
        grid = self.grid
        return laplacian(state.a0, grid) - self.screening * state.a0 - divergence(state.dai, grid)

    def monitors(self, state: FlatState) -> FlatMonitorReport:
        grid = self.grid
        c1 = state.phi - state.da0
        c2 = (1.0 - self.lam) * state.da0 - divergence(state.ai, grid)
        gauss = self.gauss_residual(state)
        return FlatMonitorReport(
            t=state.t,
            a0_l2=norm_l2(state.a0, grid),
            ai_l2=norm_l2(state.ai, grid),
            phi_l2=norm_l2(state.phi, grid),
            c1_l2=norm_l2(c1, grid),
            c1_linf=norm_linf(c1),
            c2_l2=norm_l2(c2, grid),
            c2_linf=norm_linf(c2),
            gauss_l2=norm_l2(gauss, grid),
            gauss_linf=norm_linf(gauss),
        )

    def fieldeq_residual(self, levels: tuple[FlatState, ...]) -> FieldEquationResidual:
        """□_γA_β - γ^{σρ}∂_β∂_σA_ρ - μ² A_σ 𝔪^{σρ} γ_{ρβ} from three consecutive levels.

        The β = 0 component carries no ∂₀²A₀: its γ^{00} contributions cancel, so
        it is evaluated from the middle level and first time differences only.
        """
        dt = check_levels(levels)
        before, middle, after = levels
        grid = self.grid
        n2 = self.n**2
        da0 = (after.a0 - before.a0) / (2.0 * dt)
        dai = (after.ai - before.ai) / (2.0 * dt)
        ddai = (after.ai - 2.0 * middle.ai + before.ai) / dt**2

        time_component = laplacian(middle.a0, grid) - divergence(dai, grid) - self.screening * middle.a0
        lorenz = -n2 * da0 + divergence(middle.ai, grid)
        norms = [norm_l2(time_component, grid)]
        for j in range(3):
            residual = (
                -n2 * ddai[j]
                + laplacian(middle.ai[j], grid)
                - spatial_derivative(lorenz, j, grid)
                - self.mu2 * middle.ai[j]
            )
            norms.append(norm_l2(residual, grid))
        return FieldEquationResidual(middle.t, tuple(norms))
