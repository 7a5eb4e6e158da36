"""Archimedean copulas: generators, CDF assembly and Kimberling sampling.

An Archimedean copula is ``G(u) = phi(sum_m phi^-1(u_m))`` for a completely
monotone generator ``phi``. Every such ``phi`` is the Laplace transform of a
positive latent variable ``D``, and ``U_m = phi(Z_m / D)`` with i.i.d. unit
exponentials ``Z_m`` is an exact draw from ``G``.

Families and their latent laws:

- Clayton, ``phi(t) = (1 + t)^(-1/theta)``, ``D ~ Gamma(1/theta, 1)``
- Ali-Mikhail-Haq, ``phi(t) = (1 - theta) / (e^t - theta)``, ``D ~ Geometric(1 - theta)``
- Gumbel, ``phi(t) = exp(-t^(1/theta))``, ``D`` positive ``1/theta``-stable
- Frank, ``phi(t) = -log(1 + e^-t (e^-theta - 1)) / theta``, ``D`` logarithmic series
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from ..core.errors import DimensionError, DomainError, ValidationError
from ..core.numeric import mixed_partial, open_uniform
from ..core.unit import UnitPoint, as_cdf_array, as_unit_array

logger = logging.getLogger(__name__)

# Longest cumulative table kept for the Frank latent law; larger theta is
# sampled directly in log space.
_FRANK_TABLE_LIMIT = 1_000_000
_FRANK_TAIL_MASS = 1e-12
_LOG_MAX = 700.0


class ArchimedeanFamily(Enum):
    """Supported Archimedean families."""

    CLAYTON = "clayton"
    AMH = "amh"
    GUMBEL = "gumbel"
    FRANK = "frank"

    @classmethod
    def parse(cls, value: Union[str, "ArchimedeanFamily"]) -> "ArchimedeanFamily":
        if isinstance(value, ArchimedeanFamily):
            return value
        text = str(value).strip().lower().replace("-", "_")
        if text in {"ali_mikhail_haq", "alimikhailhaq"}:
            text = "amh"
        try:
            return cls(text)
        except ValueError:
            valid = ", ".join(f.value for f in cls)
            raise ValidationError(
                f"Unknown Archimedean family '{value}'. Valid options are: {valid}"
            )


def _check_theta(family: ArchimedeanFamily, theta: float) -> None:
    if not np.isfinite(theta):
        raise DomainError(f"{family.value} theta must be finite, got {theta!r}")
    if family is ArchimedeanFamily.CLAYTON and not theta > 0.0:
        raise DomainError(f"Clayton theta must be > 0, got {theta!r}")
    if family is ArchimedeanFamily.AMH and not (0.0 <= theta < 1.0):
        raise DomainError(f"AMH theta must be in [0, 1), got {theta!r}")
    if family is ArchimedeanFamily.GUMBEL and not theta >= 1.0:
        raise DomainError(f"Gumbel theta must be >= 1, got {theta!r}")
    if family is ArchimedeanFamily.FRANK and not theta > 0.0:
        raise DomainError(f"Frank theta must be > 0, got {theta!r}")


@dataclass(frozen=True)
class ArchimedeanGenerator:
    """Generator ``phi`` of one family, its inverse and the copula it induces.

    ``finite_difference`` enables the numeric density for ``dimension > 2``;
    bivariate densities are always available.
    """

    family: ArchimedeanFamily
    theta: float
    dimension: int = 2
    finite_difference: bool = False

    def __post_init__(self) -> None:
        family = ArchimedeanFamily.parse(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "theta", float(self.theta))
        _check_theta(family, self.theta)
        if self.dimension < 2:
            raise DimensionError("Archimedean copula dimension must be at least 2")

    def phi(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        th = self.theta
        if self.family is ArchimedeanFamily.CLAYTON:
            return np.exp(-np.log1p(t) / th)
        if self.family is ArchimedeanFamily.AMH:
            e = np.exp(-t)
            return (1.0 - th) * e / (1.0 - th * e)
        if self.family is ArchimedeanFamily.GUMBEL:
            return np.exp(-(t ** (1.0 / th)))
        # Near t = 0 the log1p argument tends to e^-theta - 1, which rounds to
        # -1.0 for large theta; the sum (1 - e^-t) + e^(-t-theta) has no cancellation.
        x = np.exp(-t) * np.expm1(-th)
        near_zero = -np.expm1(-t) + np.exp(-t - th)
        log_arg = np.where(
            x > -0.5,
            np.log1p(np.maximum(x, -0.5)),
            np.log(np.maximum(near_zero, np.finfo(float).tiny)),
        )
        return -log_arg / th

    def phi_inverse(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        th = self.theta
        if self.family is ArchimedeanFamily.CLAYTON:
            return np.expm1(-th * np.log(u))
        if self.family is ArchimedeanFamily.AMH:
            return np.log1p(th * (u - 1.0)) - np.log(u)
        if self.family is ArchimedeanFamily.GUMBEL:
            return (-np.log(u)) ** th
        return -np.log(np.expm1(-th * u) / np.expm1(-th))

    def cdf(self, u: np.ndarray) -> np.ndarray:
        """``phi(sum phi^-1(u_m))``; the sum runs in sorted order so permutations agree exactly."""
        points = as_cdf_array(u, self.dimension)
        inner = np.sort(self.phi_inverse(points), axis=1)
        return self.phi(np.sum(inner, axis=1))

    def density(self, u: np.ndarray) -> np.ndarray:
        if self.dimension > 2 and not self.finite_difference:
            raise ValidationError(
                f"{self.family.value} density for dimension {self.dimension} "
                "requires finite_difference=True"
            )
        return mixed_partial(self.cdf, as_unit_array(u, self.dimension))

    def latent_sampler(self, seed: Optional[int] = None) -> "LatentSampler":
        return LatentSampler(self.family, self.theta, seed)

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        return kimberling_sample(self, self.latent_sampler(seed), n)


@functools.lru_cache(maxsize=16)
def _frank_cumulative(theta: float) -> Optional[np.ndarray]:
    """Cumulative table of ``Pr[D = d] = p^d / (theta d)``, ``p = 1 - e^-theta``."""
    log_p = np.log1p(-np.exp(-theta))
    if _FRANK_TABLE_LIMIT * log_p > np.log(_FRANK_TAIL_MASS):
        logger.debug("Frank latent table for theta=%s exceeds the size limit", theta)
        return None
    chunk = 4096
    pieces: list[np.ndarray] = []
    total = 0.0
    start = 1
    while start <= _FRANK_TABLE_LIMIT:
        d = np.arange(start, start + chunk, dtype=float)
        pmf = np.exp(d * log_p - np.log(theta * d))
        cumulative = total + np.cumsum(pmf)
        pieces.append(cumulative)
        total = float(cumulative[-1])
        if 1.0 - total < _FRANK_TAIL_MASS:
            table = np.concatenate(pieces)
            logger.debug("Frank latent table for theta=%s has %d entries", theta, table.size)
            return table
        start += chunk
    logger.debug("Frank latent table for theta=%s exceeds the size limit", theta)
    return None


@dataclass
class LatentSampler:
    """Seeded source of the latent variable ``D`` whose Laplace transform is ``phi``.

    Owns its random state; use one instance per thread.
    """

    family: ArchimedeanFamily
    theta: float
    seed: Optional[int] = None
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.family = ArchimedeanFamily.parse(self.family)
        self.theta = float(self.theta)
        _check_theta(self.family, self.theta)
        self.rng = np.random.default_rng(self.seed)

    def sample_latent(self, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError("sample size must be at least 1")
        th = self.theta
        if self.family is ArchimedeanFamily.CLAYTON:
            draws = self.rng.gamma(shape=1.0 / th, scale=1.0, size=n)
            return np.maximum(draws, np.finfo(float).tiny)
        if self.family is ArchimedeanFamily.AMH:
            return self.rng.geometric(1.0 - th, size=n).astype(float)
        if self.family is ArchimedeanFamily.GUMBEL:
            return self._positive_stable(n)
        return self._log_series(n)

    def _positive_stable(self, n: int) -> np.ndarray:
        """Kanter's form of Chambers-Mallows-Stuck for ``E exp(-tD) = exp(-t^a)``."""
        a = 1.0 / self.theta
        if a == 1.0:
            return np.ones(n)
        angle = np.pi * open_uniform(self.rng, n)
        w = -np.log(open_uniform(self.rng, n))
        log_zolotarev = (
            a * np.log(np.sin(a * angle))
            + (1.0 - a) * np.log(np.sin((1.0 - a) * angle))
            - np.log(np.sin(angle))
        ) / (1.0 - a)
        log_d = (1.0 - a) / a * (log_zolotarev - np.log(w))
        return np.exp(np.clip(log_d, -_LOG_MAX, _LOG_MAX))

    def _log_series(self, n: int) -> np.ndarray:
        table = _frank_cumulative(self.theta)
        if table is None:
            return self._log_series_kemp(n)
        levels = open_uniform(self.rng, n) * table[-1]
        return (np.searchsorted(table, levels, side="left") + 1).astype(float)

    def _log_series_kemp(self, n: int) -> np.ndarray:
        """Kemp's mixture of geometrics, ``D = floor(1 + log V / log(1 - e^(-theta U)))``.

        Works with ``log(-log q)`` so ``p = 1 - e^-theta`` is never formed and
        large ``theta`` cannot round it to 1.
        """
        th = self.theta
        u = open_uniform(self.rng, n)
        v = open_uniform(self.rng, n)
        neg_log_q = -np.log1p(-np.exp(-th * u))
        tiny = np.finfo(float).tiny
        # Once exp(-theta u) underflows, log(-log q) is -theta u to double precision.
        log_neg_log_q = np.where(neg_log_q > 0.0, np.log(np.maximum(neg_log_q, tiny)), -th * u)
        log_ratio = np.log(-np.log(v)) - log_neg_log_q
        return np.floor(1.0 + np.exp(np.minimum(log_ratio, _LOG_MAX)))


def archimedean_cdf(g: ArchimedeanGenerator, u: UnitPoint) -> float:
    return float(g.cdf(u)[0])


def sample_latent(s: LatentSampler, n: int) -> np.ndarray:
    return s.sample_latent(n)


def kimberling_sample(g: ArchimedeanGenerator, s: LatentSampler, n: int) -> np.ndarray:
    """Draw ``n`` points ``U_m = phi(Z_m / D)``; ``D`` first, then the ``Z`` block."""
    if s.family is not g.family or s.theta != g.theta:
        raise ValidationError(
            f"sampler ({s.family.value}, {s.theta}) does not match generator "
            f"({g.family.value}, {g.theta})"
        )
    latent = s.sample_latent(n)
    exponentials = -np.log(open_uniform(s.rng, (n, g.dimension)))
    u = g.phi(exponentials / latent[:, None])
    # Extreme latent draws can round phi onto the boundary.
    return np.clip(u, np.finfo(float).tiny, np.nextafter(1.0, 0.0))
