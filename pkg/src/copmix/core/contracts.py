"""Core contracts shared by copulas, transforms and diagnostics.

Structural protocols: any object with a batched ``density`` or ``cdf`` over
points of the unit hypercube can be handed to the diagnostics.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class UnivariateMarginal(Protocol):
    """A continuous univariate distribution usable as one coordinate of a transform."""

    name: str

    def cdf(self, x: np.ndarray) -> np.ndarray: ...

    def ppf(self, u: np.ndarray) -> np.ndarray: ...

    def pdf(self, x: np.ndarray) -> np.ndarray: ...

    def logpdf(self, x: np.ndarray) -> np.ndarray: ...


@runtime_checkable
class CopulaDensity(Protocol):
    """Anything with a density on the open unit hypercube."""

    @property
    def dimension(self) -> int: ...

    def density(self, u: np.ndarray) -> np.ndarray: ...


@runtime_checkable
class CopulaCdf(Protocol):
    """Anything with a copula CDF on the open unit hypercube."""

    @property
    def dimension(self) -> int: ...

    def cdf(self, u: np.ndarray) -> np.ndarray: ...
