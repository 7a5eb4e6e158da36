"""Configuration objects for fitting, sampling experiments and diagnostics.

Every object validates and normalizes itself in ``__post_init__``; strings are
compared case-insensitively with hyphens read as underscores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Any, Optional, Union

import numpy as np

from .copulas import (
    ArchimedeanFamily,
    ArchimedeanGenerator,
    ClaytonCopula,
    CorrelationMatrix,
    ExampleCopula,
    GaussianCopula,
    IndependenceCopula,
)
from .core.errors import ValidationError
from .mixture import CovarianceMode
from .transforms import TRANSFORM_NAMES, NormalMixtureMarginal

MARGINAL_SOURCES = ("empirical", "parametric")
COPULA_FAMILIES = (
    "example",
    "independence",
    "gaussian",
    "clayton",
    "amh",
    "gumbel",
    "frank",
)
DEFAULT_MARGINAL_MEANS = (-9.0, -5.4, -1.8, 1.8, 5.4, 9.0)
DEFAULT_MARGINAL_SD = 1.0 / math.sqrt(10.0)


def _normalize(value: Any) -> str:
    return str(value).strip().lower().replace("-", "_")


def _choice(value: Any, valid: tuple[str, ...], field_name: str) -> str:
    text = _normalize(value)
    if text not in valid:
        raise ValidationError(
            f"Invalid {field_name} '{value}'. Valid options are: {', '.join(valid)}"
        )
    return text


@dataclass(frozen=True)
class FitConfig:
    """Settings for EM fitting and BIC model selection.

    candidates: component counts tried, fitted in ascending order
    max_iter: EM iteration cap per restart
    tol: relative log-likelihood change that counts as converged
    covariance_mode: ``full`` (default) or ``spherical``
    reg_floor: smallest admissible covariance eigenvalue
    restarts: k-means++ seeded restarts per candidate
    transform: latent marginal transform, ``normal`` or ``logistic``
    marginals: ``empirical`` ranks or the ``parametric`` standard-normal CDF
    """

    candidates: tuple[int, ...] = (2, 3, 4, 5)
    max_iter: int = 500
    tol: float = 1e-8
    covariance_mode: Union[str, CovarianceMode] = CovarianceMode.FULL
    reg_floor: float = 1e-6
    restarts: int = 5
    seed: int = 0
    transform: str = "normal"
    marginals: str = "empirical"

    def __post_init__(self) -> None:
        candidates = tuple(sorted({int(r) for r in self.candidates}))
        if not candidates:
            raise ValidationError("candidates must name at least one component count")
        if candidates[0] < 1:
            raise ValidationError("candidate component counts must be at least 1")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not self.tol > 0.0:
            raise ValidationError("tol must be positive")
        if not self.reg_floor > 0.0:
            raise ValidationError("reg_floor must be positive")
        if self.restarts < 1:
            raise ValidationError("restarts must be at least 1")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "covariance_mode", CovarianceMode.parse(self.covariance_mode))
        object.__setattr__(self, "transform", _choice(self.transform, TRANSFORM_NAMES, "transform"))
        object.__setattr__(
            self, "marginals", _choice(self.marginals, MARGINAL_SOURCES, "marginals")
        )

    def to_export_dict(self) -> dict[str, Any]:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["candidates"] = list(self.candidates)
        out["covariance_mode"] = self.covariance_mode.value  # type: ignore[union-attr]
        return out


@dataclass(frozen=True)
class MarginalMixtureSpec:
    """Normal-mixture data marginal; equal weights when none are given."""

    means: tuple[float, ...] = DEFAULT_MARGINAL_MEANS
    sds: tuple[float, ...] = (DEFAULT_MARGINAL_SD,) * len(DEFAULT_MARGINAL_MEANS)
    weights: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.means)
        sds = tuple(float(s) for s in self.sds)
        if len(sds) == 1 and len(means) > 1:
            sds = sds * len(means)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sds", sds)
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        # Validation lives in the distribution itself.
        self.build()

    def build(self) -> NormalMixtureMarginal:
        if self.weights is None:
            return NormalMixtureMarginal.equal_weights(self.means, self.sds)
        weights = np.asarray(self.weights, dtype=float)
        if np.any(weights <= 0.0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValidationError("marginal weights must be positive and sum to 1")
        return NormalMixtureMarginal(self.means, self.sds, tuple(weights / weights.sum()))

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "means": list(self.means),
            "sds": list(self.sds),
            "weights": list(self.weights) if self.weights is not None else None,
        }


@dataclass(frozen=True)
class CopulaSpec:
    """Family name plus the parameters that family reads.

    ``alpha``/``beta`` are used by ``example`` only, ``correlation`` (row-major,
    ``dimension**2`` entries) by ``gaussian`` only.
    """

    family: str = "example"
    dimension: int = 2
    theta: float = 20.0
    alpha: float = 0.75
    beta: float = 0.5
    correlation: Optional[tuple[float, ...]] = None
    finite_difference: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", _choice(self.family, COPULA_FAMILIES, "copula family"))
        if self.dimension < 1:
            raise ValidationError("dimension must be at least 1")
        if self.family == "example" and self.dimension != 2:
            raise ValidationError("the example copula is bivariate; dimension must be 2")
        if self.correlation is not None:
            object.__setattr__(
                self, "correlation", tuple(float(x) for x in self.correlation)
            )
        self.build()

    def build(self) -> Any:
        """Instantiate the copula object this spec names."""
        family = self.family
        if family == "example":
            return ExampleCopula(self.alpha, self.beta, self.theta)
        if family == "independence":
            return IndependenceCopula(self.dimension)
        if family == "gaussian":
            if self.correlation is None:
                return GaussianCopula(CorrelationMatrix.identity(self.dimension))
            if len(self.correlation) != self.dimension**2:
                raise ValidationError(
                    f"correlation needs {self.dimension ** 2} entries for dimension {self.dimension}"
                )
            matrix = np.asarray(self.correlation).reshape(self.dimension, self.dimension)
            return GaussianCopula(CorrelationMatrix(matrix))
        if family == "clayton" and not self.finite_difference:
            return ClaytonCopula(self.theta, self.dimension)
        return ArchimedeanGenerator(
            ArchimedeanFamily.parse(family),
            self.theta,
            self.dimension,
            finite_difference=self.finite_difference,
        )

    def to_export_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family, "dimension": self.dimension}
        if self.family in {"example", "clayton", "amh", "gumbel", "frank"}:
            out["theta"] = self.theta
        if self.family == "example":
            out.update(alpha=self.alpha, beta=self.beta)
        if self.family == "gaussian" and self.correlation is not None:
            out["correlation"] = list(self.correlation)
        return out


@dataclass(frozen=True)
class ExperimentSpec:
    """A complete simulation: copula, data marginals, sample size and fit settings.

    The defaults reproduce the six-bump marginals joined by the example copula
    with ``alpha = 3/4``, ``beta = 1/2``, ``theta = 20`` at ``n = 1000``.
    """

    copula: CopulaSpec = field(default_factory=CopulaSpec)
    marginals: tuple[MarginalMixtureSpec, ...] = ()
    n: int = 1000
    seed: int = 0
    fit: FitConfig = field(default_factory=FitConfig)
    grid_per_dim: int = 33
    l1_samples: int = 100_000

    def __post_init__(self) -> None:
        if self.n < 100:
            raise ValidationError("n must be at least 100")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        if self.grid_per_dim < 8:
            raise ValidationError("grid_per_dim must be at least 8")
        if self.l1_samples < 2:
            raise ValidationError("l1_samples must be at least 2")
        marginals = tuple(self.marginals)
        if not marginals:
            marginals = (MarginalMixtureSpec(),) * self.copula.dimension
        elif len(marginals) == 1:
            marginals = marginals * self.copula.dimension
        if len(marginals) != self.copula.dimension:
            raise ValidationError(
                f"{len(marginals)} marginal specs given for dimension {self.copula.dimension}"
            )
        object.__setattr__(self, "marginals", marginals)

    @property
    def dimension(self) -> int:
        return self.copula.dimension

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "copula": self.copula.to_export_dict(),
            "marginals": [m.to_export_dict() for m in self.marginals],
            "n": self.n,
            "seed": self.seed,
            "fit": self.fit.to_export_dict(),
            "grid_per_dim": self.grid_per_dim,
            "l1_samples": self.l1_samples,
        }


@dataclass(frozen=True)
class DiagnosticsConfig:
    """What ``diagnose`` computes and at which resolution.

    reference: copula to measure L1/Linf distances against, if any
    witnesses: extra points merged into every gap search and Linf grid
    """

    grid_per_dim: int = 33
    l1_samples: int = 100_000
    ks_samples: int = 10_000
    seed: int = 0
    reference: Optional[CopulaSpec] = None
    witnesses: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.grid_per_dim < 8:
            raise ValidationError("grid_per_dim must be at least 8")
        if self.l1_samples < 2:
            raise ValidationError("l1_samples must be at least 2")
        if self.ks_samples < 20:
            raise ValidationError("ks_samples must be at least 20")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        witnesses = tuple(tuple(float(c) for c in w) for w in self.witnesses)
        for point in witnesses:
            if not all(0.0 < c < 1.0 for c in point):
                raise ValidationError(f"witness {point} is not inside the open unit cube")
        object.__setattr__(self, "witnesses", witnesses)
