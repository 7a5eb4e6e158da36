"""Symmetry gaps, distances between densities and marginal uniformity checks.

A Gaussian copula mixture is exchangeable only if every component is, and it
is always radially symmetric. The gap reports here measure how far a target
density is from either property; half the gap bounds from below the sup-norm
error of any approximation that has the property.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats

from .core.contracts import CopulaDensity
from .core.errors import DimensionError, DomainError, ValidationError
from .core.numeric import open_uniform
from .core.unit import (
    PointsLike,
    UnitPoint,
    as_unit_array,
    interior_grid,
    permutations_of,
)
from .mixture import GaussianMixtureModel

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]
Evaluable = Union[ArrayFn, CopulaDensity]

EXCHANGE_WITNESS = (1.0 / 3.0, 2.0 / 3.0)
RADIAL_WITNESS = (0.1, 0.5)
DEFAULT_GAP_GRID = 33
MAX_GRID_DIMENSION = 3
RANDOM_SEARCH_POINTS = 4096
KS_COEFFICIENT_1 = 1.63
KS_COEFFICIENT_5 = 1.36


class GapKind(Enum):
    EXCHANGEABILITY = "exchangeability"
    RADIAL_SYMMETRY = "radial_symmetry"


class Norm(Enum):
    L1 = "l1"
    LINF = "linf"


def _evaluator(target: Evaluable) -> ArrayFn:
    """Accept a density object or a plain vectorized function of points."""
    if isinstance(target, CopulaDensity):
        return target.density
    if callable(target):
        return target  # type: ignore[no-any-return]
    raise ValidationError(f"{type(target).__name__} is neither callable nor has a density")


def _dimension_of(*targets: Evaluable, dimension: Optional[int] = None) -> int:
    dims = {getattr(t, "dimension", None) for t in targets} - {None}
    if dimension is not None:
        dims.add(dimension)
    if len(dims) != 1:
        raise DimensionError(f"cannot determine a common dimension from {sorted(dims)}")
    return int(dims.pop())  # type: ignore[arg-type]


@dataclass(frozen=True)
class GapReport:
    """Largest ``|c(u) - c(u')|`` over the searched pairs and where it occurs."""

    kind: GapKind
    witness: UnitPoint
    counterpart: UnitPoint
    value_at_u: float
    value_at_counterpart: float
    pairs_searched: int

    @property
    def eta(self) -> float:
        return abs(self.value_at_u - self.value_at_counterpart)

    @property
    def epsilon(self) -> float:
        return self.eta / 2.0

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "witness": list(self.witness.coords),
            "counterpart": list(self.counterpart.coords),
            "value_at_u": self.value_at_u,
            "value_at_counterpart": self.value_at_counterpart,
            "eta": self.eta,
            "epsilon": self.epsilon,
            "pairs_searched": self.pairs_searched,
        }


@dataclass(frozen=True)
class DistanceEstimate:
    """A Monte Carlo L1 estimate with its standard error, or a grid sup with its resolution."""

    norm: Norm
    estimate: float
    standard_error: float
    resolution: Optional[float]
    size: int
    seed: Optional[int]

    def __post_init__(self) -> None:
        if self.standard_error < 0.0:
            raise ValidationError("standard error must be non-negative")

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "norm": self.norm.value,
            "estimate": self.estimate,
            "standard_error": self.standard_error,
            "resolution": self.resolution,
            "size": self.size,
            "seed": self.seed,
        }


def _largest_gap(
    kind: GapKind, fn: ArrayFn, left: np.ndarray, right: np.ndarray
) -> GapReport:
    at_left = np.asarray(fn(left), dtype=float)
    at_right = np.asarray(fn(right), dtype=float)
    gaps = np.abs(at_left - at_right)
    if not np.all(np.isfinite(gaps)):
        raise DomainError("density is not finite at every searched point")
    best = int(np.argmax(gaps))
    return GapReport(
        kind,
        UnitPoint(tuple(left[best])),
        UnitPoint(tuple(right[best])),
        float(at_left[best]),
        float(at_right[best]),
        int(left.shape[0]),
    )


def exchangeability_gap(
    density: Evaluable, points: Sequence[tuple[UnitPoint, Sequence[int]]]
) -> GapReport:
    """Maximal ``|c(u) - c(u_sigma)|`` over the given ``(u, sigma)`` pairs.

    ``density`` may also be a CDF function; the report is the same shape.
    """
    if not points:
        raise ValidationError("exchangeability_gap needs at least one (point, permutation) pair")
    left = np.array([u.coords for u, _ in points], dtype=float)
    right = np.array([u.permuted(sigma).coords for u, sigma in points], dtype=float)
    return _largest_gap(GapKind.EXCHANGEABILITY, _evaluator(density), left, right)


def radial_symmetry_gap(density: Evaluable, points: PointsLike) -> GapReport:
    """Maximal ``|c(u) - c(1 - u)|`` over ``points``."""
    left = as_unit_array(points)
    if left.shape[0] == 0:
        raise ValidationError("radial_symmetry_gap needs at least one point")
    return _largest_gap(GapKind.RADIAL_SYMMETRY, _evaluator(density), left, 1.0 - left)


def _search_points(
    rng: np.random.Generator, dimension: int, grid_per_dim: int
) -> np.ndarray:
    """Tensor grid up to ``MAX_GRID_DIMENSION``, seeded draws from the open cube above it."""
    if dimension <= MAX_GRID_DIMENSION:
        return interior_grid(grid_per_dim, dimension)
    return open_uniform(rng, (RANDOM_SEARCH_POINTS, dimension))


def default_exchange_pairs(
    dimension: int = 2,
    grid_per_dim: int = DEFAULT_GAP_GRID,
    witnesses: Sequence[Sequence[float]] = (),
    seed: Optional[int] = 0,
) -> list[tuple[UnitPoint, tuple[int, ...]]]:
    """Search points paired with non-identity permutations, plus witnesses.

    Up to ``MAX_GRID_DIMENSION`` every grid point meets every permutation; above
    it each random point gets one random non-identity permutation. In one
    dimension the identity is the only permutation and the gap is zero.
    """
    rng = np.random.default_rng(seed)
    identity = tuple(range(dimension))
    rows = [tuple(w) for w in witnesses]
    if dimension == 2:
        rows.append(EXCHANGE_WITNESS)
    rows.extend(tuple(p) for p in _search_points(rng, dimension, grid_per_dim))
    if dimension == 1:
        return [(UnitPoint(row), identity) for row in rows]
    if dimension <= MAX_GRID_DIMENSION:
        perms = [p for p in permutations_of(dimension) if p != identity]
        return [(UnitPoint(row), perm) for row in rows for perm in perms]
    pairs: list[tuple[UnitPoint, tuple[int, ...]]] = []
    for row in rows:
        perm = tuple(int(i) for i in rng.permutation(dimension))
        if perm == identity:
            perm = (1, 0) + identity[2:]
        pairs.append((UnitPoint(row), perm))
    return pairs


def default_radial_points(
    dimension: int = 2,
    grid_per_dim: int = DEFAULT_GAP_GRID,
    witnesses: Sequence[Sequence[float]] = (),
    seed: Optional[int] = 0,
) -> np.ndarray:
    rows = [tuple(w) for w in witnesses]
    if dimension == 2:
        rows.append(RADIAL_WITNESS)
    points = _search_points(np.random.default_rng(seed), dimension, grid_per_dim)
    if not rows:
        return points
    return np.vstack([np.asarray(rows, dtype=float), points])


def l1_distance(
    f: Evaluable,
    g: Evaluable,
    n_samples: int = 100_000,
    seed: Optional[int] = 0,
    dimension: Optional[int] = None,
) -> DistanceEstimate:
    """Uniform Monte Carlo estimate of ``int |f - g|`` over the open cube."""
    if n_samples < 2:
        raise ValidationError("l1_distance needs at least two samples")
    dim = _dimension_of(f, g, dimension=dimension)
    u = open_uniform(np.random.default_rng(seed), (n_samples, dim))
    values = np.abs(_evaluator(f)(u) - _evaluator(g)(u))
    if not np.all(np.isfinite(values)):
        raise DomainError("a density is not finite at some sampled point")
    return DistanceEstimate(
        Norm.L1,
        float(np.mean(values)),
        float(np.std(values, ddof=1) / math.sqrt(n_samples)),
        None,
        n_samples,
        seed,
    )


def linf_distance(
    f: Evaluable,
    g: Evaluable,
    grid_per_dim: int,
    witnesses: PointsLike = (),
    dimension: Optional[int] = None,
) -> DistanceEstimate:
    """``max |f - g|`` over the cell-midpoint grid with ``witnesses`` merged in."""
    if grid_per_dim < 8:
        raise ValidationError("grid_per_dim must be at least 8")
    dim = _dimension_of(f, g, dimension=dimension)
    if dim > MAX_GRID_DIMENSION:
        raise DimensionError(
            f"dimension {dim} is too large for a tensor grid (at most {MAX_GRID_DIMENSION})"
        )
    points = interior_grid(grid_per_dim, dim)
    if len(witnesses):  # type: ignore[arg-type]
        points = np.vstack([points, as_unit_array(witnesses, dim)])
    values = np.abs(_evaluator(f)(points) - _evaluator(g)(points))
    if not np.all(np.isfinite(values)):
        raise DomainError("a density is not finite at some grid point")
    return DistanceEstimate(
        Norm.LINF, float(values.max()), 0.0, 1.0 / grid_per_dim, int(points.shape[0]), None
    )


@dataclass(frozen=True)
class KSResult:
    """One-sample Kolmogorov-Smirnov test of a sample against Uniform(0, 1)."""

    statistic: float
    pvalue: float
    n: int

    @property
    def threshold_1(self) -> float:
        return KS_COEFFICIENT_1 / math.sqrt(self.n)

    @property
    def threshold_5(self) -> float:
        return KS_COEFFICIENT_5 / math.sqrt(self.n)

    @property
    def reject_1(self) -> bool:
        return self.statistic > self.threshold_1

    @property
    def reject_5(self) -> bool:
        return self.statistic > self.threshold_5

    def to_export_dict(self) -> dict[str, Any]:
        return {
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "n": self.n,
            "threshold_1": self.threshold_1,
            "threshold_5": self.threshold_5,
            "reject_1": self.reject_1,
            "reject_5": self.reject_5,
        }


def ks_uniformity(sample: Any) -> KSResult:
    values = np.asarray(sample, dtype=float).ravel()
    if values.size < 20:
        raise ValidationError("ks_uniformity needs at least 20 values")
    if not np.all((values > 0.0) & (values < 1.0)):
        raise DomainError("ks_uniformity values must lie strictly inside (0, 1)")
    result = stats.kstest(values, "uniform")
    return KSResult(float(result.statistic), float(result.pvalue), int(values.size))


def marginal_uniformity(sampler: Any, n: int, seed: Optional[int] = 0) -> list[KSResult]:
    """KS results for every margin of ``n`` draws from ``sampler.sample``."""
    draws = np.asarray(sampler.sample(n, seed), dtype=float)
    return [ks_uniformity(draws[:, i]) for i in range(draws.shape[1])]


def gmm_l1_distance(
    a: GaussianMixtureModel,
    b: GaussianMixtureModel,
    n_samples: int = 100_000,
    seed: Optional[int] = 0,
) -> DistanceEstimate:
    """``int |f_a - f_b|`` on R^M by importance sampling from ``(f_a + f_b) / 2``.

    Half the draws come from each mixture. The weight ``2|f_a - f_b| / (f_a + f_b)``
    equals ``2 |tanh((log f_a - log f_b) / 2)|`` and never exceeds 2.
    """
    if a.dimension != b.dimension:
        raise DimensionError("mixtures have different dimensions")
    if n_samples < 4:
        raise ValidationError("gmm_l1_distance needs at least four samples")
    rng = np.random.default_rng(seed)
    half = n_samples // 2
    strata = (a.sample(half, rng), b.sample(n_samples - half, rng))
    means, variances = [], []
    for z in strata:
        weight = 2.0 * np.abs(np.tanh(0.5 * (a.log_pdf(z) - b.log_pdf(z))))
        means.append(float(np.mean(weight)))
        variances.append(float(np.var(weight, ddof=1)) / z.shape[0])
    return DistanceEstimate(
        Norm.L1,
        0.5 * (means[0] + means[1]),
        0.5 * math.sqrt(variances[0] + variances[1]),
        None,
        n_samples,
        seed,
    )


def gmm_marginal_l1_distance(
    a: GaussianMixtureModel,
    b: GaussianMixtureModel,
    index: int,
    n_samples: int = 100_000,
    seed: Optional[int] = 0,
) -> DistanceEstimate:
    return gmm_l1_distance(a.marginal(index), b.marginal(index), n_samples, seed)
