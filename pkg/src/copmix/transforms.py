"""Marginal distributions and the coordinate-wise transform between R^M and (0,1)^M."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import special, stats

from .core.contracts import UnivariateMarginal
from .core.errors import DimensionError, DomainError, ValidationError
from .core.numeric import bisect_increasing, bracket_increasing
from .core.unit import CLAMP_EPS, UnitPoint, as_unit_array

TRANSFORM_NAMES = ("normal", "logistic")


@dataclass(frozen=True)
class NormalMarginal:
    """Normal distribution; the standard normal is the default latent marginal."""

    loc: float = 0.0
    scale: float = 1.0
    name: str = field(default="normal", init=False)

    def __post_init__(self) -> None:
        if not (self.scale > 0.0 and np.isfinite(self.scale)):
            raise DomainError(f"normal scale must be positive, got {self.scale!r}")

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return special.ndtr((np.asarray(x, dtype=float) - self.loc) / self.scale)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.loc + self.scale * special.ndtri(np.asarray(u, dtype=float))

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        return -0.5 * z * z - 0.5 * np.log(2.0 * np.pi) - np.log(self.scale)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return np.exp(self.logpdf(x))


@dataclass(frozen=True)
class LogisticMarginal:
    """Standard logistic distribution; an alternative latent marginal."""

    name: str = field(default="logistic", init=False)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return special.expit(np.asarray(x, dtype=float))

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return special.logit(np.asarray(u, dtype=float))

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        a = np.abs(np.asarray(x, dtype=float))
        return -a - 2.0 * np.log1p(np.exp(-a))

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return np.exp(self.logpdf(x))


@dataclass(frozen=True)
class NormalMixtureMarginal:
    """Finite mixture of univariate normals, e.g. the six-bump data marginal.

    The quantile has no closed form and is found by bracketed bisection.
    """

    means: tuple[float, ...]
    sds: tuple[float, ...]
    weights: tuple[float, ...]
    name: str = field(default="normal_mixture", init=False)

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.means)
        sds = tuple(float(s) for s in self.sds)
        weights = tuple(float(w) for w in self.weights)
        if not means:
            raise ValidationError("normal mixture needs at least one component")
        if not (len(means) == len(sds) == len(weights)):
            raise DimensionError(
                "normal mixture means, sds and weights must have equal lengths"
            )
        if any(s <= 0.0 for s in sds):
            raise DomainError("normal mixture sds must be positive")
        if any(w <= 0.0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise DomainError("normal mixture weights must be positive and sum to 1")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sds", sds)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def equal_weights(
        cls, means: Sequence[float], sds: Union[float, Sequence[float]]
    ) -> "NormalMixtureMarginal":
        count = len(means)
        sd_list = [float(sds)] * count if np.isscalar(sds) else list(sds)  # type: ignore[arg-type]
        weights = np.full(count, 1.0 / count)
        weights[-1] = 1.0 - weights[:-1].sum()
        return cls(tuple(means), tuple(sd_list), tuple(weights))

    def _standardized(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        return (x - np.asarray(self.means)) / np.asarray(self.sds)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return special.ndtr(self._standardized(x)) @ np.asarray(self.weights)

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        z = self._standardized(x)
        log_terms = (
            np.log(self.weights)
            - np.log(self.sds)
            - 0.5 * np.log(2.0 * np.pi)
            - 0.5 * z * z
        )
        return special.logsumexp(log_terms, axis=-1)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return np.exp(self.logpdf(x))

    def ppf(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        spread = 40.0 * max(self.sds)
        lo = np.full(u.shape, min(self.means) - spread)
        hi = np.full(u.shape, max(self.means) + spread)
        lo, hi = bracket_increasing(self.cdf, u, lo, hi)
        return bisect_increasing(self.cdf, u, lo, hi)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Rank-based empirical CDF rescaled to rank/(n+1), linear between order statistics.

    Values never reach 0 or 1: queries below the minimum return 1/(n+1)
    (or the average rank of tied minima) and queries above the maximum return
    at most n/(n+1).
    """

    knots: np.ndarray
    levels: np.ndarray
    size: int
    name: str = field(default="empirical", init=False)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.knots, self.levels)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(u, dtype=float), self.levels, self.knots)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        slopes = np.diff(self.levels) / np.diff(self.knots)
        idx = np.searchsorted(self.knots, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(slopes))
        return np.where(inside, slopes[np.clip(idx, 0, len(slopes) - 1)], 0.0)

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))


def empirical_cdf(sample: Union[Sequence[float], np.ndarray]) -> EmpiricalCdf:
    """Build the rank/(n+1) empirical CDF of a univariate sample (ties get average ranks)."""
    values = np.asarray(sample, dtype=float).ravel()
    if values.size < 2:
        raise ValidationError("empirical_cdf needs at least two observations")
    if not np.all(np.isfinite(values)):
        raise ValidationError("empirical_cdf sample contains non-finite values")
    if np.all(values == values[0]):
        raise ValidationError("empirical_cdf sample is constant")
    ranks = stats.rankdata(values, method="average")
    knots, first = np.unique(values, return_index=True)
    levels = ranks[first] / (values.size + 1.0)
    return EmpiricalCdf(knots=knots, levels=levels, size=int(values.size))


def marginal_by_name(name: str) -> UnivariateMarginal:
    normalized = str(name).strip().lower()
    if normalized == "normal":
        return NormalMarginal()
    if normalized == "logistic":
        return LogisticMarginal()
    valid = ", ".join(TRANSFORM_NAMES)
    raise ValidationError(f"Unknown transform '{name}'. Valid options are: {valid}")


@dataclass(frozen=True)
class MarginalTransform:
    """The map ``F_H = (H_1, ..., H_M)`` together with densities and inverses."""

    marginals: tuple[UnivariateMarginal, ...]

    def __post_init__(self) -> None:
        marginals = tuple(self.marginals)
        if not marginals:
            raise DimensionError("a marginal transform needs at least one coordinate")
        object.__setattr__(self, "marginals", marginals)

    @classmethod
    def standard_normal(cls, dimension: int) -> "MarginalTransform":
        return cls.named("normal", dimension)

    @classmethod
    def logistic(cls, dimension: int) -> "MarginalTransform":
        return cls.named("logistic", dimension)

    @classmethod
    def named(cls, name: str, dimension: int) -> "MarginalTransform":
        if dimension < 1:
            raise DimensionError("transform dimension must be at least 1")
        return cls(tuple(marginal_by_name(name) for _ in range(dimension)))

    @property
    def dimension(self) -> int:
        return len(self.marginals)

    @property
    def identifier(self) -> str:
        names = {m.name for m in self.marginals}
        return names.pop() if len(names) == 1 else "mixed"

    def _check_width(self, arr: np.ndarray) -> np.ndarray:
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        if arr.shape[1] != self.dimension:
            raise DimensionError(
                f"input has dimension {arr.shape[1]}, transform has {self.dimension}"
            )
        return arr

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Apply ``H_i`` column-wise to an ``(n, M)`` array."""
        x = self._check_width(x)
        if not np.all(np.isfinite(x)):
            raise ValidationError("forward transform input must be finite")
        return np.column_stack([m.cdf(x[:, i]) for i, m in enumerate(self.marginals)])

    def inverse(self, u: np.ndarray) -> np.ndarray:
        """Apply ``H_i^{-1}`` column-wise to points strictly inside (0,1)^M."""
        u = as_unit_array(u, self.dimension)
        return np.column_stack([m.ppf(u[:, i]) for i, m in enumerate(self.marginals)])

    def log_jacobian(self, z: np.ndarray) -> np.ndarray:
        """``sum_i log h_i(z_i)`` for latent points ``z``."""
        z = self._check_width(z)
        return np.sum(
            [m.logpdf(z[:, i]) for i, m in enumerate(self.marginals)], axis=0
        )


def forward_transform(t: MarginalTransform, x: Sequence[float]) -> UnitPoint:
    """``F_H(x)`` as a ``UnitPoint``; tails that round to 0 or 1 are held at ``CLAMP_EPS``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size != t.dimension:
        raise DimensionError(
            f"point has dimension {arr.size}, transform has {t.dimension}"
        )
    u = np.clip(t.forward(arr[None, :])[0], CLAMP_EPS, 1.0 - CLAMP_EPS)
    return UnitPoint(tuple(u))


def inverse_transform(t: MarginalTransform, u: UnitPoint) -> np.ndarray:
    if u.dimension != t.dimension:
        raise DimensionError(
            f"point has dimension {u.dimension}, transform has {t.dimension}"
        )
    return t.inverse(u.as_array())[0]
