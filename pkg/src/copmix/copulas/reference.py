"""Closed-form reference copulas: independence, Clayton and the non-exchangeable example.

The example copula is

    C(u, v) = u^(1-a) v^(1-b) [u^(-t a) + v^(-t b) - 1]^(-1/t)

with a, b in (0, 1) and t > 0. It is neither exchangeable nor radially
symmetric, which makes it the standard stress case for mixture approximations.
All evaluations run in log space; ``u^(-t a)`` overflows long before the
copula value loses meaning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.errors import DimensionError, DomainError
from ..core.numeric import bisect_increasing, open_uniform
from ..core.unit import CLAMP_EPS, UnitPoint, as_cdf_array, as_unit_array
from .archimedean import ArchimedeanFamily, ArchimedeanGenerator

logger = logging.getLogger(__name__)


def _log_clayton_sum(log_terms: np.ndarray) -> np.ndarray:
    """``log(sum_m exp(l_m) - (M - 1))`` for rows of ``l_m >= 0``, summed in sorted order."""
    ordered = np.sort(log_terms, axis=1)
    top = ordered[:, -1:]
    inner = np.sum(np.exp(ordered - top), axis=1) - (ordered.shape[1] - 1) * np.exp(
        -top[:, 0]
    )
    return top[:, 0] + np.log(inner)


@dataclass(frozen=True)
class IndependenceCopula:
    """The product copula; density identically one."""

    dimension: int = 2

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise DimensionError("independence copula dimension must be at least 1")

    def cdf(self, u: np.ndarray) -> np.ndarray:
        return np.prod(as_cdf_array(u, self.dimension), axis=1)

    def density(self, u: np.ndarray) -> np.ndarray:
        return np.ones(as_unit_array(u, self.dimension).shape[0])

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        return open_uniform(np.random.default_rng(seed), (n, self.dimension))


@dataclass(frozen=True)
class ClaytonCopula:
    """Clayton copula ``(sum u_m^-t - M + 1)^(-1/t)`` for t > 0."""

    theta: float
    dimension: int = 2

    def __post_init__(self) -> None:
        if not (self.theta > 0.0 and np.isfinite(self.theta)):
            raise DomainError(f"Clayton theta must be > 0, got {self.theta!r}")
        if self.dimension < 2:
            raise DimensionError("Clayton copula dimension must be at least 2")

    def _log_sum(self, u: np.ndarray) -> np.ndarray:
        return _log_clayton_sum(-self.theta * np.log(u))

    def cdf(self, u: np.ndarray) -> np.ndarray:
        u = as_cdf_array(u, self.dimension)
        return np.exp(-self._log_sum(u) / self.theta)

    def log_density(self, u: np.ndarray) -> np.ndarray:
        u = as_unit_array(u, self.dimension)
        dim = self.dimension
        log_const = np.sum(np.log1p(self.theta * np.arange(dim)))
        return (
            log_const
            - (self.theta + 1.0) * np.sum(np.log(u), axis=1)
            - (1.0 / self.theta + dim) * self._log_sum(u)
        )

    def density(self, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density(u))

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        generator = ArchimedeanGenerator(ArchimedeanFamily.CLAYTON, self.theta, self.dimension)
        return generator.sample(n, seed)


@dataclass(frozen=True)
class ExampleCopula:
    """Non-exchangeable bivariate copula with parameters ``alpha``, ``beta``, ``theta``."""

    alpha: float
    beta: float
    theta: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if not (0.0 < self.beta < 1.0):
            raise DomainError(f"beta must be in (0, 1), got {self.beta!r}")
        if not (self.theta > 0.0 and np.isfinite(self.theta)):
            raise DomainError(f"theta must be > 0, got {self.theta!r}")

    @property
    def dimension(self) -> int:
        return 2

    def _logs(
        self, u: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        log_u = np.log(u)
        log_v = np.log(v)
        log_a = -self.theta * self.alpha * log_u
        log_b = -self.theta * self.beta * log_v
        log_s = _log_clayton_sum(np.column_stack([log_a, log_b]))
        return log_u, log_v, log_a, log_b, log_s

    def cdf(self, u: np.ndarray) -> np.ndarray:
        points = as_cdf_array(u, 2)
        log_u, log_v, _, _, log_s = self._logs(points[:, 0], points[:, 1])
        return np.exp(
            (1.0 - self.alpha) * log_u
            + (1.0 - self.beta) * log_v
            - log_s / self.theta
        )

    def log_density(self, u: np.ndarray) -> np.ndarray:
        points = as_unit_array(u, 2)
        a, b, t = self.alpha, self.beta, self.theta
        log_u, log_v, log_a, log_b, log_s = self._logs(points[:, 0], points[:, 1])
        ratio_a = np.exp(log_a - log_s)
        ratio_b = np.exp(log_b - log_s)
        bracket = (
            (1.0 - a) * (1.0 - b)
            + (1.0 - a) * b * ratio_b
            + a * (1.0 - b) * ratio_a
            + a * b * (1.0 + t) * ratio_a * ratio_b
        )
        return -a * log_u - b * log_v - log_s / t + np.log(bracket)

    def density(self, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density(u))

    def conditional_cdf(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``C(u | v) = dC/dv``, a two-term mixture weighted by ``beta``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        log_u, log_v, _, log_b, log_s = self._logs(u, v)
        ratio_b = np.exp(log_b - log_s)
        scale = np.exp(
            (1.0 - self.alpha) * log_u - self.beta * log_v - log_s / self.theta
        )
        return scale * ((1.0 - self.beta) + self.beta * ratio_b)

    def conditional_ppf(self, w: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Invert ``C(. | v)`` at level ``w`` by bisection on [1e-12, 1 - 1e-12]."""
        w = np.asarray(w, dtype=float)
        v = np.broadcast_to(np.asarray(v, dtype=float), w.shape)
        return bisect_increasing(
            lambda x: self.conditional_cdf(x, v),
            w,
            np.full(w.shape, CLAMP_EPS),
            np.full(w.shape, 1.0 - CLAMP_EPS),
        )

    def sample(self, n: int, seed: Optional[int] = None) -> np.ndarray:
        """Draw ``n`` points ``(U, V)``: V uniform, then ``U = C^-1(W | V)``."""
        if n < 1:
            raise DomainError("sample size must be at least 1")
        rng = np.random.default_rng(seed)
        v = open_uniform(rng, n)
        w = open_uniform(rng, n)
        u = self.conditional_ppf(w, v)
        logger.debug("drew %d example-copula points", n)
        return np.column_stack([u, v])


def example_copula_cdf(c: ExampleCopula, u: float, v: float) -> float:
    return float(c.cdf(np.array([[u, v]]))[0])


def example_copula_density(c: ExampleCopula, u: float, v: float) -> float:
    return float(c.density(UnitPoint.of(u, v)).item())


def example_copula_conditional(c: ExampleCopula, u: float, v: float) -> float:
    return float(c.conditional_cdf(np.array([u]), np.array([v]))[0])


def sample_example_copula(
    c: ExampleCopula, n: int, seed: Optional[int] = None
) -> np.ndarray:
    return c.sample(n, seed)


def clayton_cdf(c: ClaytonCopula, u: UnitPoint) -> float:
    return float(c.cdf(u)[0])


def clayton_density(c: ClaytonCopula, u: UnitPoint) -> float:
    return float(c.density(u)[0])


__all__ = [
    "IndependenceCopula",
    "ClaytonCopula",
    "ExampleCopula",
    "example_copula_cdf",
    "example_copula_density",
    "example_copula_conditional",
    "sample_example_copula",
    "clayton_cdf",
    "clayton_density",
]
