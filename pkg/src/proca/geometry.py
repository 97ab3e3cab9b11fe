"""Gordon optical metric, the mass-metric family and static curvature on the grid.

Background metric is Minkowski, g = diag(-1, 1, 1, 1), in Cartesian
coordinates, and the medium is at rest, u = (1, 0, 0, 0). Index 0 is time,
indices 1..3 are the spatial axes; grid axis i is spacetime index i + 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from .errors import ConfigurationError, DomainError
from .grid import GridSpec, spatial_derivative

logger = logging.getLogger(__name__)

MINKOWSKI_INV = np.diag([-1.0, 1.0, 1.0, 1.0])
FOUR_VELOCITY = np.array([1.0, 0.0, 0.0, 0.0])

IndexField = float | npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class MediumSpec:
    """Dielectric at rest.

    ``lam`` is the mass-metric parameter; ``None`` selects the Gordon mass
    term (mass metric equal to the optical metric) for any index profile.
    """

    n: IndexField
    mu_p: float
    lam: float | None = None

    def __post_init__(self) -> None:
        n = np.asarray(self.n, dtype=float)
        if not np.all(np.isfinite(n)) or np.any(n <= 0.0):
            raise DomainError("refractive index must be positive and finite everywhere")
        if not (math.isfinite(self.mu_p) and self.mu_p >= 0.0):
            raise DomainError(f"Proca mass must be non-negative, got {self.mu_p}")
        if self.lam is not None and not math.isfinite(self.lam):
            raise DomainError(f"lambda must be finite, got {self.lam}")

    @property
    def u(self) -> npt.NDArray[np.float64]:
        return FOUR_VELOCITY

    @property
    def is_uniform(self) -> bool:
        return np.ndim(self.n) == 0

    @property
    def n_min(self) -> float:
        return float(np.min(self.n))

    @property
    def n_max(self) -> float:
        return float(np.max(self.n))

    @property
    def effective_lambda(self) -> float:
        """λ in 𝔪 = g + λ u⊗u; the Gordon choice is λ = 1 - n² (uniform n only)."""
        if self.lam is not None:
            return self.lam
        if not self.is_uniform:
            raise ConfigurationError("the Gordon mass term has no single lambda for a varying index")
        return 1.0 - float(self.n) ** 2

    def index_field(self, grid: GridSpec) -> npt.NDArray[np.float64]:
        n = np.asarray(self.n, dtype=float)
        if n.ndim == 0:
            return np.full(grid.shape, float(n))
        if n.shape != grid.shape:
            raise ConfigurationError(f"index field shape {n.shape} does not match grid {grid.shape}")
        return n


class SymbolKind(str, Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC_3D = "elliptic-3d"
    ELLIPTIC_4D = "elliptic-4d"


@dataclass(frozen=True, slots=True)
class SymbolClass:
    kind: SymbolKind
    speed: float | None = None

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind is SymbolKind.HYPERBOLIC


@dataclass(frozen=True, slots=True, eq=False)
class MetricComponents:
    """Inverse and forward components, shaped (4, 4) or (4, 4, *grid.shape)."""

    inv: npt.NDArray[np.float64]
    fwd: npt.NDArray[np.float64]
    det: npt.NDArray[np.float64] | float

    @classmethod
    def from_inverse(cls, inv: npt.NDArray[np.float64]) -> "MetricComponents":
        pointwise = np.moveaxis(inv, (0, 1), (-2, -1))
        fwd_pointwise = np.linalg.inv(pointwise)
        det = np.linalg.det(fwd_pointwise)
        fwd = np.moveaxis(fwd_pointwise, (-2, -1), (0, 1))
        return cls(inv=inv, fwd=fwd, det=det if np.ndim(det) else float(det))

    def identity_defect(self) -> float:
        """max |X^{αμ} X_{μβ} - δ^α_β| over the grid."""
        product = np.einsum("am...,mb...->ab...", self.inv, self.fwd)
        eye = np.eye(4).reshape((4, 4) + (1,) * (product.ndim - 2))
        return float(np.max(np.abs(product - eye)))


def _uu_term(coefficient: npt.NDArray[np.float64] | float) -> npt.NDArray[np.float64]:
    return np.multiply.outer(np.outer(FOUR_VELOCITY, FOUR_VELOCITY), coefficient)


def _background(shape: tuple[int, ...]) -> npt.NDArray[np.float64]:
    return MINKOWSKI_INV.reshape((4, 4) + (1,) * len(shape))


def gordon_metric(medium: MediumSpec) -> MetricComponents:
    """γ^{αβ} = g^{αβ} + (1 - n²) u^α u^β."""
    n = np.asarray(medium.n, dtype=float)
    if np.any(n <= 0.0):
        raise DomainError("refractive index must be positive")
    inv = _background(n.shape) + _uu_term(1.0 - n**2)
    return MetricComponents.from_inverse(inv)


def mass_metric(medium: MediumSpec) -> MetricComponents:
    """𝔪^{αβ} = g^{αβ} + λ u^α u^β, or the optical metric for the Gordon mass term."""
    if medium.lam is None:
        return gordon_metric(medium)
    return MetricComponents.from_inverse(MINKOWSKI_INV + _uu_term(medium.lam))


def classify_symbol(lam: float) -> SymbolClass:
    """Type of □_𝔪 = (λ - 1)∂₀² + Δ."""
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam}")
    if lam < 1.0:
        return SymbolClass(SymbolKind.HYPERBOLIC, speed=1.0 / math.sqrt(1.0 - lam))
    if lam == 1.0:
        return SymbolClass(SymbolKind.ELLIPTIC_3D)
    return SymbolClass(SymbolKind.ELLIPTIC_4D)


@dataclass(frozen=True, slots=True, eq=False)
class ChristoffelField:
    """Γ̃^α_{μν} of the optical metric, shaped (4, 4, 4, *grid.shape)."""

    components: npt.NDArray[np.float64]

    @property
    def trace(self) -> npt.NDArray[np.float64]:
        """Γ̃^α_{αβ}, indexed by β."""
        return np.einsum("aab...->b...", self.components)

    @property
    def log_index_gradient(self) -> npt.NDArray[np.float64]:
        """∇̃_μ ln n, which equals -Γ̃^0_{0μ} for the static optical metric."""
        return -self.components[0, 0]


@dataclass(frozen=True, slots=True, eq=False)
class RicciField:
    """R̃_{μν}, shaped (4, 4, *grid.shape)."""

    components: npt.NDArray[np.float64]

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.components - np.swapaxes(self.components, 0, 1))))


def christoffels_static(medium: MediumSpec, grid: GridSpec) -> ChristoffelField:
    """Closed-form Christoffels of γ = diag(-n⁻², 1, 1, 1) with stencil gradients of n."""
    n = medium.index_field(grid)
    if np.any(n <= 0.0):
        raise DomainError("refractive index must be positive")
    gamma = grid.zeros(4, 4, 4)
    if medium.is_uniform:
        return ChristoffelField(gamma)
    for i in range(grid.dim):
        dn = spatial_derivative(n, i, grid)
        gamma[0, 0, i + 1] = gamma[0, i + 1, 0] = -dn / n
        gamma[i + 1, 0, 0] = -dn / n**3
    return ChristoffelField(gamma)


def _partial(f: np.ndarray, alpha: int, grid: GridSpec) -> np.ndarray:
    # static fields: ∂₀ vanishes
    if alpha == 0:
        return np.zeros_like(f)
    return spatial_derivative(f, alpha - 1, grid)


def ricci_static(chris: ChristoffelField, grid: GridSpec) -> RicciField:
    """R̃_{μν} = ∂_αΓ̃^α_{μν} - ∂_νΓ̃^α_{μα} + Γ̃^α_{αβ}Γ̃^β_{μν} - Γ̃^α_{νβ}Γ̃^β_{μα}."""
    G = chris.components
    divergence = sum(_partial(G[a], a, grid) for a in range(4))
    trace_grad = np.stack([_partial(chris.trace, nu, grid) for nu in range(4)])  # [ν, μ]
    quadratic = np.einsum("aab...,bmn...->mn...", G, G) - np.einsum("anb...,bma...->mn...", G, G)
    ricci = divergence - np.swapaxes(trace_grad, 0, 1) + quadratic
    return RicciField(ricci)


def index_profile(
    name: str,
    grid: GridSpec,
    n0: float,
    amplitude: float = 0.0,
    mode: int = 1,
    width: float = 0.5,
) -> IndexField:
    """Named static index profiles varying along the first grid axis."""
    if name == "constant":
        return float(n0)
    x = grid.coordinates()[0]
    L = grid.lengths[0]
    if name == "sine":
        return n0 + amplitude * np.sin(2.0 * math.pi * mode * x / L)
    if name == "gaussian":
        return n0 + amplitude * np.exp(-(((x - 0.5 * L) / width) ** 2))
    raise ConfigurationError(f"unknown index profile {name!r}")


@dataclass(frozen=True, slots=True, eq=False)
class GeometryBundle:
    """Everything static the engines need about γ and 𝔪 on one grid."""

    medium: MediumSpec
    grid: GridSpec
    gamma: MetricComponents
    mass: MetricComponents
    christoffel: ChristoffelField
    ricci: RicciField

    @property
    def gamma_diagonal(self) -> list[npt.NDArray[np.float64] | float]:
        return [self.gamma.inv[a, a] for a in range(4)]


def build_geometry(medium: MediumSpec, grid: GridSpec) -> GeometryBundle:
    chris = christoffels_static(medium, grid)
    ricci = ricci_static(chris, grid)
    field_medium = medium if medium.is_uniform else MediumSpec(medium.index_field(grid), medium.mu_p, medium.lam)
    gamma = gordon_metric(field_medium)
    logger.debug("geometry built: identity defect %.2e, ricci asymmetry %.2e",
                 gamma.identity_defect(), ricci.asymmetry())
    return GeometryBundle(
        medium=medium,
        grid=grid,
        gamma=gamma,
        mass=mass_metric(field_medium),
        christoffel=chris,
        ricci=ricci,
    )
