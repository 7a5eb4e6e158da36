"""Latent Gaussian mixtures and the q_R copula-density approximation.

A ``GaussianMixtureModel`` lives on R^M. Pairing it with a ``MarginalTransform``
``F_H`` pushes it onto the unit hypercube:

    q_R(u) = sum_r pi_r phi_r(F_H^-1(u)) / prod_i h_i(H_i^-1(u_i))

which is what ``QRDensity`` evaluates. ``QRDensity.copula_of`` uses the
mixture's own marginals for ``H`` and yields the copula density of the mixture
itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Union

import numpy as np
from scipy import linalg, special

from .core.errors import DimensionError, DomainError, NumericalError, ValidationError
from .core.unit import UnitPoint, as_unit_array
from .transforms import MarginalTransform, NormalMixtureMarginal

MODEL_SCHEMA_VERSION = 1
WEIGHT_TOL = 1e-12


class CovarianceMode(Enum):
    """Shape of the component covariances."""

    SPHERICAL = "spherical"
    FULL = "full"

    @classmethod
    def parse(cls, value: Union[str, "CovarianceMode"]) -> "CovarianceMode":
        if isinstance(value, CovarianceMode):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(
                f"Invalid covariance mode '{value}'. Valid options are: spherical, full"
            )


class MixtureKind(Enum):
    """The two model families compared on financial residuals.

    MIXTURE_I is a mixture of Gaussian copulas; MIXTURE_II is the approximating
    mixture fitted on normal scores.
    """

    MIXTURE_I = "mixture_i"
    MIXTURE_II = "mixture_ii"

    @classmethod
    def parse(cls, value: Union[str, "MixtureKind"]) -> "MixtureKind":
        if isinstance(value, MixtureKind):
            return value
        text = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"i": "mixture_i", "1": "mixture_i", "ii": "mixture_ii", "2": "mixture_ii"}
        try:
            return cls(aliases.get(text, text))
        except ValueError:
            raise ValidationError(f"Unknown mixture kind '{value}'")


@dataclass(frozen=True)
class FitInfo:
    """What the fitting run recorded about a model."""

    log_likelihood: float
    iterations: int
    converged: bool
    restarts: int
    seed: int
    trace: tuple[float, ...] = ()

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "log_likelihood": self.log_likelihood,
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts": self.restarts,
            "seed": self.seed,
        }

    @classmethod
    def from_export_dict(cls, data: dict[str, Any]) -> "FitInfo":
        return cls(
            log_likelihood=float(data["log_likelihood"]),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            restarts=int(data["restarts"]),
            seed=int(data["seed"]),
        )


@dataclass(frozen=True, eq=False)
class GaussianMixtureModel:
    """Weights, means and covariances of a finite normal mixture on R^M."""

    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    covariance_mode: CovarianceMode = CovarianceMode.FULL
    info: Optional[FitInfo] = None
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float, copy=True).ravel()
        means = np.atleast_2d(np.array(self.means, dtype=float, copy=True))
        covs = np.array(self.covariances, dtype=float, copy=True)
        mode = CovarianceMode.parse(self.covariance_mode)
        n_comp, dim = means.shape
        if covs.shape != (n_comp, dim, dim) or weights.shape != (n_comp,):
            raise DimensionError(
                f"inconsistent mixture shapes: weights {weights.shape}, "
                f"means {means.shape}, covariances {covs.shape}"
            )
        if np.any(weights <= 0.0) or abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise DomainError("mixture weights must be positive and sum to 1")
        if not (np.all(np.isfinite(means)) and np.all(np.isfinite(covs))):
            raise DomainError("mixture parameters must be finite")
        if mode is CovarianceMode.SPHERICAL:
            variances = covs[:, 0, 0]
            if np.any(variances <= 0.0) or not np.allclose(
                covs, variances[:, None, None] * np.eye(dim), rtol=0.0, atol=0.0
            ):
                raise DomainError("spherical covariances must be positive multiples of I")
        chol = np.empty_like(covs)
        for r in range(n_comp):
            try:
                chol[r] = linalg.cholesky(covs[r], lower=True)
            except linalg.LinAlgError as exc:
                raise NumericalError(
                    f"covariance of component {r} is not positive definite"
                ) from exc
        for arr in (weights, means, covs, chol):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariances", covs)
        object.__setattr__(self, "covariance_mode", mode)
        object.__setattr__(self, "_chol", chol)

    @classmethod
    def spherical(
        cls,
        weights: np.ndarray,
        means: np.ndarray,
        sigmas: np.ndarray,
    ) -> "GaussianMixtureModel":
        """Mixture with isotropic covariances ``sigma_r^2 I``."""
        means = np.atleast_2d(np.asarray(means, dtype=float))
        sigmas = np.asarray(sigmas, dtype=float).ravel()
        dim = means.shape[1]
        covs = (sigmas**2)[:, None, None] * np.eye(dim)
        return cls(np.asarray(weights, dtype=float), means, covs, CovarianceMode.SPHERICAL)

    @classmethod
    def identity(cls, dimension: int) -> "GaussianMixtureModel":
        return cls.spherical(np.ones(1), np.zeros((1, dimension)), np.ones(1))

    @property
    def n_components(self) -> int:
        return int(self.weights.size)

    @property
    def dimension(self) -> int:
        return int(self.means.shape[1])

    @property
    def n_parameters(self) -> int:
        """Free parameters of the latent mixture (weights, means, covariances)."""
        r, m = self.n_components, self.dimension
        cov_params = r if self.covariance_mode is CovarianceMode.SPHERICAL else r * m * (m + 1) // 2
        return (r - 1) + r * m + cov_params

    def component_log_pdf(self, z: np.ndarray) -> np.ndarray:
        """``log pi_r + log phi_r(z)`` as an ``(n, R)`` array."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.shape[1] != self.dimension:
            raise DimensionError(
                f"points have dimension {z.shape[1]}, model has {self.dimension}"
            )
        out = np.empty((z.shape[0], self.n_components))
        half_log_2pi = 0.5 * self.dimension * math.log(2.0 * math.pi)
        for r in range(self.n_components):
            chol = self._chol[r]
            white = linalg.solve_triangular(chol, (z - self.means[r]).T, lower=True)
            out[:, r] = (
                math.log(self.weights[r])
                - half_log_2pi
                - float(np.sum(np.log(np.diag(chol))))
                - 0.5 * np.sum(white * white, axis=0)
            )
        return out

    def log_pdf(self, z: np.ndarray) -> np.ndarray:
        return special.logsumexp(self.component_log_pdf(z), axis=1)

    def pdf(self, z: np.ndarray) -> np.ndarray:
        return np.exp(self.log_pdf(z))

    def marginal(self, index: int) -> "GaussianMixtureModel":
        if not 0 <= index < self.dimension:
            raise DimensionError(f"marginal index {index} out of range")
        return GaussianMixtureModel(
            self.weights,
            self.means[:, [index]],
            self.covariances[:, index, index][:, None, None],
            CovarianceMode.SPHERICAL,
        )

    def marginal_distribution(self, index: int) -> NormalMixtureMarginal:
        weights = self.weights / self.weights.sum()
        return NormalMixtureMarginal(
            tuple(self.means[:, index]),
            tuple(np.sqrt(self.covariances[:, index, index])),
            tuple(weights),
        )

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        labels = rng.choice(self.n_components, size=n, p=self.weights)
        noise = rng.standard_normal((n, self.dimension))
        return self.means[labels] + np.einsum("nij,nj->ni", self._chol[labels], noise)

    def with_info(self, info: FitInfo) -> "GaussianMixtureModel":
        return GaussianMixtureModel(
            self.weights, self.means, self.covariances, self.covariance_mode, info
        )

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "n_components": self.n_components,
            "dimension": self.dimension,
            "covariance_mode": self.covariance_mode.value,
            "weights": [float(w) for w in self.weights],
            "means": [[float(x) for x in row] for row in self.means],
            "covariances": [[float(x) for x in cov.ravel()] for cov in self.covariances],
            "fit": self.info.to_export_dict() if self.info else None,
        }

    @classmethod
    def from_export_dict(cls, data: dict[str, Any]) -> "GaussianMixtureModel":
        try:
            dim = int(data["dimension"])
            covs = np.array(data["covariances"], dtype=float).reshape(-1, dim, dim)
            info = FitInfo.from_export_dict(data["fit"]) if data.get("fit") else None
            return cls(
                np.array(data["weights"], dtype=float),
                np.array(data["means"], dtype=float).reshape(-1, dim),
                covs,
                CovarianceMode.parse(data["covariance_mode"]),
                info,
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed mixture model document: {exc}") from exc


@dataclass(frozen=True, eq=False)
class QRDensity:
    """A latent mixture pushed onto (0,1)^M through ``F_H``."""

    gmm: GaussianMixtureModel
    transform: MarginalTransform

    def __post_init__(self) -> None:
        if self.gmm.dimension != self.transform.dimension:
            raise DimensionError(
                f"model dimension {self.gmm.dimension} does not match "
                f"transform dimension {self.transform.dimension}"
            )

    @classmethod
    def copula_of(cls, gmm: GaussianMixtureModel) -> "QRDensity":
        """Copula density of ``gmm`` itself: ``H`` is the mixture's own marginals."""
        marginals = tuple(gmm.marginal_distribution(i) for i in range(gmm.dimension))
        return cls(gmm, MarginalTransform(marginals))

    @property
    def dimension(self) -> int:
        return self.gmm.dimension

    def log_density(self, u: np.ndarray) -> np.ndarray:
        z = self.transform.inverse(as_unit_array(u, self.dimension))
        return self.gmm.log_pdf(z) - self.transform.log_jacobian(z)

    def density(self, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density(u))

    def log_marginal_density(self, index: int, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float).ravel()
        if not np.all((u > 0.0) & (u < 1.0)):
            raise DomainError("marginal density arguments must lie in (0, 1)")
        marginal = self.transform.marginals[index]
        z = marginal.ppf(u)
        return self.gmm.marginal(index).log_pdf(z[:, None]) - marginal.logpdf(z)

    def marginal_density(self, index: int, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_marginal_density(index, u))

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        if n < 1:
            raise DomainError("sample size must be at least 1")
        z = self.gmm.sample(n, np.random.default_rng(seed))
        u = self.transform.forward(z)
        return np.clip(u, np.finfo(float).tiny, np.nextafter(1.0, 0.0))

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": "qr_density",
            "transform": self.transform.identifier,
            **self.gmm.to_export_dict(),
        }

    @classmethod
    def from_export_dict(cls, data: dict[str, Any]) -> "QRDensity":
        version = data.get("schema_version")
        if version != MODEL_SCHEMA_VERSION:
            raise ValidationError(
                f"unsupported model schema_version {version!r}; expected {MODEL_SCHEMA_VERSION}"
            )
        gmm = GaussianMixtureModel.from_export_dict(data)
        return cls(gmm, MarginalTransform.named(str(data.get("transform")), gmm.dimension))


def qr_density(q: QRDensity, u: UnitPoint) -> float:
    return float(q.density(u)[0])


def qr_marginal_density(q: QRDensity, i: int, u: float) -> float:
    return float(q.marginal_density(i, np.array([u]))[0])


def bic(loglik: float, k: int, n: int) -> float:
    """Bayesian information criterion ``-2 loglik + k ln n``; lower is better."""
    if n <= 1:
        raise ValidationError("BIC needs a sample size greater than one")
    if k < 1:
        raise ValidationError("BIC needs at least one parameter")
    return -2.0 * float(loglik) + k * math.log(n)


def param_count(model_kind: Union[str, MixtureKind], dimension: int, n_components: int) -> int:
    """Reported parameter counts of the two copula mixture kinds.

    Mixture I: ``R M(M-1)/2 + R - 1``.
    Mixture II: ``R M(M+3)/2 + R - 1 - 2M``; the ``-2M`` drops the latent
    location and scale that a copula cannot identify.
    """
    kind = MixtureKind.parse(model_kind)
    if dimension < 2:
        raise ValidationError("parameter counts need dimension >= 2")
    if n_components < 1:
        raise ValidationError("parameter counts need at least one component")
    m, r = dimension, n_components
    if kind is MixtureKind.MIXTURE_I:
        return r * (m * (m - 1) // 2) + r - 1
    return r * (m * (m + 3) // 2) + r - 1 - 2 * m
