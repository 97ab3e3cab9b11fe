"""Gordon mass term (𝔪 = γ) on flat g with a static index n(x).

Evolves Ã_ν = n A_ν under

    0 = □̃ Ã_ν - γ^{αβ} R̃_{αν} Ã_β - γ^{αβ} (∇̃_α Ã_ν) ∇̃_β ln n
        + γ^{αβ} (Ã_β ∇̃_α∇̃_ν ln n - Ã_ν ∇̃_α∇̃_β ln n) - μ² Ã_ν

with every covariant derivative expanded through the optical Christoffels.
The only second time derivative is γ^{00} ∂₀Π_ν, which is solved for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
import numpy.typing as npt

from ..elliptic import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    GaussOperatorProblem,
    solve_gauss_constraint,
)
from ..errors import ConfigurationError, UnsupportedLimitError
from ..geometry import GeometryBundle, MediumSpec, build_geometry
from ..grid import (
    CovectorField,
    GridSpec,
    ScalarField,
    SpatialField,
    divergence,
    laplacian,
    norm_l2,
    norm_linf,
    spatial_derivative,
)
from .base import DEFAULT_CFL, EvolutionEngine, MonitorRecord, PackedState, check_levels
from .flat import FieldEquationResidual

ATLD = slice(0, 4)
PI = slice(4, 8)


@dataclass(frozen=True, slots=True, eq=False)
class GordonState(PackedState):
    COMPONENTS: ClassVar[int] = 8

    @classmethod
    def from_fields(cls, atld: CovectorField, pi: CovectorField, t: float = 0.0) -> "GordonState":
        return cls(np.concatenate([atld, pi]), t)

    @property
    def atld(self) -> CovectorField:
        return self.data[ATLD]

    @property
    def pi(self) -> CovectorField:
        return self.data[PI]

    def potential(self, n: ScalarField) -> tuple[CovectorField, CovectorField]:
        """(A_μ, ∂₀A_μ) recovered from Ã = nA with a static index."""
        return self.atld / n, self.pi / n


@dataclass(frozen=True, slots=True)
class GordonMonitorReport(MonitorRecord):
    """Norms of Ã = nA and of its constraints at one time.

    ``fieldeq_l2`` is filled in only on the final report and copied to the run
    summary; it is not a ``monitors.csv`` column.
    """

    atld0_l2: float
    atldi_l2: float
    lorenz_l2: float
    lorenz_linf: float
    gauss_l2: float
    gauss_linf: float
    fieldeq_l2: float | None = None

    @classmethod
    def csv_columns(cls) -> tuple[str, ...]:
        return ("t", "atld0_l2", "atldi_l2", "lorenz_l2", "lorenz_linf", "gauss_l2", "gauss_linf")


def _partial(f: np.ndarray, alpha: int, grid: GridSpec) -> np.ndarray:
    if alpha == 0:
        return np.zeros_like(f)
    return spatial_derivative(f, alpha - 1, grid)


class GordonEngine(EvolutionEngine[GordonState, GordonMonitorReport]):
    state_type = GordonState

    def __init__(
        self,
        medium: MediumSpec,
        grid: GridSpec,
        *,
        cfl: float = DEFAULT_CFL,
        geometry: GeometryBundle | None = None,
        tolerance: float = DEFAULT_TOLERANCE,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
    ) -> None:
        super().__init__(medium, grid, cfl=cfl)
        if medium.lam is not None:
            raise ConfigurationError("the Gordon engine uses the optical metric as mass metric; drop lambda")
        self.geometry = geometry or build_geometry(medium, grid)
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.mu2 = medium.mu_p**2
        self.n = medium.index_field(grid)
        self._gamma = self.geometry.christoffel.components
        self._ricci = self.geometry.ricci.components
        self._gdiag = np.stack([np.broadcast_to(g, grid.shape) for g in self.geometry.gamma_diagonal])
        self._contracted = np.einsum("a...,saa...->s...", self._gdiag, self._gamma)
        self._trace = self.geometry.christoffel.trace
        w = self.geometry.christoffel.log_index_gradient
        grad_w = np.stack([_partial(w, a, grid) for a in range(4)])
        self._w = w
        self._hessian = grad_w - np.einsum("san...,s...->an...", self._gamma, w)
        self._hessian_trace = np.einsum("a...,aa...->...", self._gdiag, self._hessian)

    @property
    def max_speed(self) -> float:
        return 1.0 / self.medium.n_min

    def init_from_free_data(self, atld_i: SpatialField, pi_i: SpatialField) -> GordonState:
        """Solve the Gauss constraint for Ã_0 and the Lorenz-type constraint for Π_0."""
        if self.mu2 == 0.0:
            raise UnsupportedLimitError("constrained initialization requires mu_p > 0")
        problem = GaussOperatorProblem.from_free_data(
            self.medium,
            self.grid,
            self.geometry.christoffel,
            pi_i / self.n,
            tolerance=self.tolerance,
            max_iterations=self.max_iterations,
        )
        atld = np.concatenate([(self.n * solve_gauss_constraint(problem))[None], atld_i])
        pi = np.concatenate([np.zeros((1, *self.grid.shape)), pi_i])
        pi[0] = -self._lorenz_spatial(atld) / self._gdiag[0]
        return GordonState.from_fields(atld, pi)

    def init_from_potential(self, ai: SpatialField, dai: SpatialField) -> GordonState:
        return self.init_from_free_data(self.n * ai, self.n * dai)

    def _lorenz_spatial(self, atld: CovectorField) -> ScalarField:
        # ∇̃_α(γ^{αβ}Ã_β) without the γ^{00}∂₀Ã_0 term
        return divergence(atld[1:], self.grid) + np.einsum("b...,b...->...", self._trace, self._gdiag * atld)

    def lorenz(self, state: GordonState) -> ScalarField:
        return self._gdiag[0] * state.pi[0] + self._lorenz_spatial(state.atld)

    def gauss_residual(self, state: GordonState) -> ScalarField:
        a0, velocity = state.atld[0] / self.n, state.pi[1:] / self.n
        problem = GaussOperatorProblem.from_free_data(
            self.medium, self.grid, self.geometry.christoffel, velocity
        )
        return problem.residual(a0)

    def derivative(self, data: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        grid = self.grid
        G = self._gamma
        atld, pi = data[ATLD], data[PI]

        grad = np.stack([pi] + [spatial_derivative(atld, i, grid) for i in range(3)])
        connection = np.einsum("sbn...,s...->bn...", G, atld)
        cov = grad - connection  # ∇̃_β Ã_ν
        g_atld = self._gdiag * atld

        rest = laplacian(atld, grid)
        for i in range(grid.dim):
            rest -= spatial_derivative(connection[i + 1], i, grid)
        rest -= self._gdiag[0] * np.einsum("sn...,s...->n...", G[:, 0], pi)
        rest -= np.einsum("s...,sn...->n...", self._contracted, cov)
        rest -= np.einsum("san...,as...->n...", G, self._gdiag[:, None] * cov)
        rest -= np.einsum("an...,a...->n...", self._ricci, g_atld)
        rest -= np.einsum("an...,a...->n...", cov, self._gdiag * self._w)
        rest += np.einsum("an...,a...->n...", self._hessian, g_atld) - atld * self._hessian_trace
        rest -= self.mu2 * atld

        out = np.empty_like(data)
        out[ATLD] = pi
        out[PI] = rest / -self._gdiag[0]
        return out

    def monitors(self, state: GordonState) -> GordonMonitorReport:
        grid = self.grid
        lorenz = self.lorenz(state)
        gauss = self.gauss_residual(state)
        return GordonMonitorReport(
            t=state.t,
            atld0_l2=norm_l2(state.atld[0], grid),
            atldi_l2=norm_l2(state.atld[1:], grid),
            lorenz_l2=norm_l2(lorenz, grid),
            lorenz_linf=norm_linf(lorenz),
            gauss_l2=norm_l2(gauss, grid),
            gauss_linf=norm_linf(gauss),
        )

    def fieldeq_residual(self, levels: tuple[GordonState, ...]) -> FieldEquationResidual:
        """∂_α G^{αβ} - μ² γ^{αβ} A_α in A = Ã/n, β = 0 in its Gauss form."""
        dt = check_levels(levels)
        before, middle, after = (level.atld / self.n for level in levels)
        grid = self.grid
        n2 = self.n**2
        da = (after - before) / (2.0 * dt)
        dda = (after - 2.0 * middle + before) / dt**2

        problem = GaussOperatorProblem.from_free_data(
            self.medium, grid, self.geometry.christoffel, da[1:]
        )
        norms = [norm_l2(problem.residual(middle[0]), grid)]
        div_a = divergence(middle[1:], grid)
        for j in range(1, 4):
            residual = (
                -n2 * dda[j]
                + n2 * spatial_derivative(da[0], j - 1, grid)
                + laplacian(middle[j], grid)
                - spatial_derivative(div_a, j - 1, grid)
                - self.mu2 * middle[j]
            )
            norms.append(norm_l2(residual, grid))
        return FieldEquationResidual(levels[1].t, tuple(norms))

    def with_fieldeq(self, report: GordonMonitorReport, levels: tuple[GordonState, ...]) -> GordonMonitorReport:
        residual = self.fieldeq_residual(levels)
        return GordonMonitorReport(
            t=report.t,
            atld0_l2=report.atld0_l2,
            atldi_l2=report.atldi_l2,
            lorenz_l2=report.lorenz_l2,
            lorenz_linf=report.lorenz_linf,
            gauss_l2=report.gauss_l2,
            gauss_linf=report.gauss_linf,
            fieldeq_l2=math.sqrt(sum(c * c for c in residual.components)),
        )
