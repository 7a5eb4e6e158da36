"""Gaussian copulas, their finite mixtures and radial symmetry.

Only the correlation matrix of an elliptical law survives the passage to its
copula, so every constructor here reduces its input to a ``CorrelationMatrix``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, special

from ..core.errors import DimensionError, DomainError, NumericalError, ValidationError
from ..core.unit import UnitPoint, as_unit_array, radial_reflection

SYMMETRY_TOL = 1e-12
MIN_EIGENVALUE = 1e-10
PROJECTION_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Symmetric, unit-diagonal, positive definite ``M x M`` matrix."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=float, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"correlation matrix must be square, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise DomainError("correlation matrix has non-finite entries")
        if np.max(np.abs(mat - mat.T)) > SYMMETRY_TOL:
            raise DomainError("correlation matrix is not symmetric")
        if not np.all(np.diag(mat) == 1.0):
            raise DomainError("correlation matrix must have a unit diagonal")
        if np.linalg.eigvalsh(mat).min() <= MIN_EIGENVALUE:
            raise DomainError("correlation matrix is not positive definite")
        mat = 0.5 * (mat + mat.T)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def bivariate(cls, rho: float) -> "CorrelationMatrix":
        return cls(np.array([[1.0, rho], [rho, 1.0]]))

    @classmethod
    def identity(cls, dimension: int) -> "CorrelationMatrix":
        return cls(np.eye(dimension))

    @classmethod
    def from_covariance(cls, covariance: np.ndarray) -> "CorrelationMatrix":
        """Strip the scale ``S`` from ``Sigma = S R S``."""
        cov = np.asarray(covariance, dtype=float)
        scale = np.sqrt(np.diag(cov))
        corr = cov / np.outer(scale, scale)
        np.fill_diagonal(corr, 1.0)
        return cls(0.5 * (corr + corr.T))

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    def to_export_list(self) -> list[float]:
        return [float(x) for x in self.matrix.ravel()]


def nearest_correlation(
    matrix: np.ndarray, floor: float = PROJECTION_FLOOR
) -> CorrelationMatrix:
    """Clip eigenvalues at ``floor`` and renormalize the diagonal to one."""
    mat = np.asarray(matrix, dtype=float)
    mat = 0.5 * (mat + mat.T)
    values, vectors = np.linalg.eigh(mat)
    clipped = (vectors * np.maximum(values, floor)) @ vectors.T
    scale = np.sqrt(np.diag(clipped))
    corr = clipped / np.outer(scale, scale)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(corr)


@dataclass(frozen=True, eq=False)
class GaussianCopula:
    """Copula of ``N(mu, S R S)``; depends on ``R`` only."""

    corr: CorrelationMatrix
    _chol: np.ndarray = field(init=False, repr=False)
    _log_det: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        try:
            chol = linalg.cholesky(self.corr.matrix, lower=True)
        except linalg.LinAlgError as exc:
            raise NumericalError(f"Cholesky factorization failed: {exc}") from exc
        object.__setattr__(self, "_chol", chol)
        object.__setattr__(self, "_log_det", 2.0 * float(np.sum(np.log(np.diag(chol)))))

    @classmethod
    def from_covariance(
        cls, mean: Sequence[float], covariance: np.ndarray
    ) -> "GaussianCopula":
        cov = np.asarray(covariance, dtype=float)
        if len(mean) != cov.shape[0]:
            raise DimensionError("mean and covariance dimensions differ")
        return cls(CorrelationMatrix.from_covariance(cov))

    @property
    def dimension(self) -> int:
        return self.corr.dimension

    def log_density(self, u: np.ndarray) -> np.ndarray:
        z = special.ndtri(as_unit_array(u, self.dimension))
        white = linalg.solve_triangular(self._chol, z.T, lower=True)
        quad = np.sum(white * white, axis=0) - np.sum(z * z, axis=1)
        return -0.5 * self._log_det - 0.5 * quad

    def density(self, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density(u))

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        """``Phi(L x)`` with ``x`` standard normal and ``L`` the Cholesky factor of ``R``."""
        if n < 1:
            raise DomainError("sample size must be at least 1")
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((n, self.dimension)) @ self._chol.T
        return np.clip(special.ndtr(z), np.finfo(float).tiny, np.nextafter(1.0, 0.0))


@dataclass(frozen=True, eq=False)
class GaussianCopulaMixture:
    """Convex combination ``sum_r pi_r c(., R_r)`` of Gaussian copula densities."""

    weights: np.ndarray
    components: tuple[GaussianCopula, ...]

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float, copy=True)
        components = tuple(self.components)
        if weights.ndim != 1 or weights.size != len(components) or not components:
            raise DimensionError("mixture needs one weight per component")
        if np.any(weights <= 0.0) or abs(weights.sum() - 1.0) > 1e-12:
            raise DomainError("mixture weights must be positive and sum to 1")
        dims = {c.dimension for c in components}
        if len(dims) != 1:
            raise DimensionError("mixture components have different dimensions")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    @property
    def dimension(self) -> int:
        return self.components[0].dimension

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component_log_densities(self, u: np.ndarray) -> np.ndarray:
        return np.column_stack([c.log_density(u) for c in self.components])

    def log_density(self, u: np.ndarray) -> np.ndarray:
        return special.logsumexp(
            self.component_log_densities(u) + np.log(self.weights), axis=1
        )

    def density(self, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density(u))

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        if n < 1:
            raise DomainError("sample size must be at least 1")
        rng = np.random.default_rng(seed)
        labels = rng.choice(self.n_components, size=n, p=self.weights)
        out = np.empty((n, self.dimension))
        for r, component in enumerate(self.components):
            idx = np.flatnonzero(labels == r)
            if idx.size:
                out[idx] = component.sample(idx.size, int(rng.integers(2**62)))
        return out

    def to_export_dict(self) -> dict[str, object]:
        return {
            "kind": "gaussian_copula_mixture",
            "dimension": self.dimension,
            "weights": [float(w) for w in self.weights],
            "correlations": [c.corr.to_export_list() for c in self.components],
        }


def gaussian_copula_density(g: GaussianCopula, u: UnitPoint) -> float:
    return float(g.density(u)[0])


def mixture_density(m: GaussianCopulaMixture, u: UnitPoint) -> float:
    return float(m.density(u)[0])


def sample_gaussian_copula(
    g: GaussianCopula, n: int, seed: Optional[int] = None
) -> np.ndarray:
    return g.sample(n, seed)


def random_correlation(dimension: int, rng: np.random.Generator) -> CorrelationMatrix:
    """Random correlation matrix from a Wishart-like draw, for fixtures and tests."""
    if dimension < 1:
        raise ValidationError("dimension must be at least 1")
    factor = rng.standard_normal((dimension, dimension + 2))
    return CorrelationMatrix.from_covariance(factor @ factor.T)


__all__ = [
    "CorrelationMatrix",
    "GaussianCopula",
    "GaussianCopulaMixture",
    "gaussian_copula_density",
    "mixture_density",
    "nearest_correlation",
    "radial_reflection",
    "random_correlation",
    "sample_gaussian_copula",
]
