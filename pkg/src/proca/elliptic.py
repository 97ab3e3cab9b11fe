"""Initial-data elliptic solves on the periodic box.

Both operators are built from the same compact Laplacian the engines use, so
data produced here satisfy the engines' discrete Gauss monitors at t = 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import ConfigurationError, SolvabilityError, SolverError, UnsupportedLimitError
from .geometry import ChristoffelField, MediumSpec
from .grid import GridSpec, ScalarField, SpatialField, divergence, laplacian, norm_linf, spatial_derivative

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERATIONS = 500
_RESTART = 40


@dataclass(frozen=True, slots=True, eq=False)
class ScreenedPoissonProblem:
    """(Δ_h - mass2) u = rhs."""

    rhs: ScalarField
    mass2: float
    grid: GridSpec

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mass2) and self.mass2 >= 0.0):
            raise ConfigurationError(f"screening coefficient must be non-negative, got {self.mass2}")
        if self.rhs.shape != self.grid.shape:
            raise ConfigurationError(f"rhs shape {self.rhs.shape} does not match grid {self.grid.shape}")

    def apply(self, u: ScalarField) -> ScalarField:
        return laplacian(u, self.grid) - self.mass2 * u


def solve_screened_poisson(problem: ScreenedPoissonProblem) -> ScalarField:
    """Exact solve in the discrete Fourier basis using the stencil's own symbol."""
    rhs = problem.rhs
    symbol = problem.grid.laplacian_symbol() + problem.mass2
    rhs_hat = np.fft.fftn(rhs)
    if problem.mass2 == 0.0:
        mean = float(np.mean(rhs))
        if abs(mean) > 1e-12 * max(1.0, norm_linf(rhs)):
            raise SolvabilityError(f"zero screening needs a zero-mean rhs, mean is {mean:.3e}")
        symbol = symbol.copy()
        symbol.flat[0] = 1.0
        rhs_hat.flat[0] = 0.0
    return np.real(np.fft.ifftn(-rhs_hat / symbol))


@dataclass(frozen=True, slots=True, eq=False)
class GaussOperatorProblem:
    """Gauss constraint for A_0 with the Gordon mass term and a static index.

    In flat Cartesian coordinates the constraint n μ² γ^{00} A_0 = ∇̃_i(n G^{i0})
    divided by n² reads

        Δ A_0 - 2 Γ̃^0_{0i} ∂_i A_0 - μ² A_0 = ∂_i v_i - 2 Γ̃^0_{0i} v_i,

    with v_i = ∂_0 A_i; -2 Γ̃^0_{0i} = ∂_i ln n².
    """

    medium: MediumSpec
    grid: GridSpec
    christoffel: ChristoffelField
    rhs: ScalarField
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    @classmethod
    def from_free_data(
        cls,
        medium: MediumSpec,
        grid: GridSpec,
        christoffel: ChristoffelField,
        dai: SpatialField,
        *,
        tolerance: float = DEFAULT_TOLERANCE,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
    ) -> "GaussOperatorProblem":
        rhs = divergence(dai, grid) + np.einsum("i...,i...->...", _drift(christoffel), dai)
        return cls(medium, grid, christoffel, rhs, tolerance, max_iterations)

    def apply(self, a0: ScalarField) -> ScalarField:
        drift = _drift(self.christoffel)
        result = laplacian(a0, self.grid) - self.medium.mu_p**2 * a0
        for i in range(self.grid.dim):
            result += drift[i] * spatial_derivative(a0, i, self.grid)
        return result

    def residual(self, a0: ScalarField) -> ScalarField:
        return self.apply(a0) - self.rhs


def _drift(christoffel: ChristoffelField) -> SpatialField:
    """-2 Γ̃^0_{0i} for i = 1..3."""
    return -2.0 * christoffel.components[0, 0, 1:]


def solve_gauss_constraint(problem: GaussOperatorProblem) -> ScalarField:
    """GMRES with the constant-coefficient screened-Poisson solve as preconditioner."""
    mu2 = problem.medium.mu_p**2
    if mu2 == 0.0:
        raise UnsupportedLimitError("constrained initialization requires mu_p > 0")
    grid = problem.grid
    rhs = problem.rhs
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return np.zeros(grid.shape)

    size = int(np.prod(grid.shape))

    def matvec(x: np.ndarray) -> np.ndarray:
        return problem.apply(x.reshape(grid.shape)).ravel()

    def precondition(x: np.ndarray) -> np.ndarray:
        return solve_screened_poisson(ScreenedPoissonProblem(x.reshape(grid.shape), mu2, grid)).ravel()

    operator = LinearOperator((size, size), matvec=matvec, dtype=float)
    preconditioner = LinearOperator((size, size), matvec=precondition, dtype=float)

    iterations = 0

    def count(_: object) -> None:
        nonlocal iterations
        iterations += 1

    solution = np.zeros(size)
    stalled = False
    # outer refinement on the true residual; gmres itself monitors the preconditioned one
    while True:
        residual = rhs.ravel() - matvec(solution)
        relative = float(np.linalg.norm(residual)) / rhs_norm
        if relative <= problem.tolerance or stalled or iterations >= problem.max_iterations:
            break
        before = iterations
        budget = problem.max_iterations - iterations
        restart = min(_RESTART, budget)
        correction, _ = gmres(
            operator,
            residual,
            M=preconditioner,
            rtol=problem.tolerance,
            atol=0.0,
            restart=restart,
            maxiter=max(1, budget // restart),
            callback=count,
            callback_type="pr_norm",
        )
        solution += correction
        stalled = iterations == before

    if relative > problem.tolerance:
        raise SolverError(relative, iterations)
    logger.info("Gauss constraint solved in %d iterations, relative residual %.2e", iterations, relative)
    return solution.reshape(grid.shape)
