"""Points of the open unit hypercube and helpers for batches of them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DimensionError, DomainError

# Bisection brackets stay inside [CLAMP_EPS, 1 - CLAMP_EPS]; core evaluation never clamps.
CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class UnitPoint:
    """A point ``u = (u_1, ..., u_M)`` with every coordinate strictly in (0, 1)."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise DimensionError("UnitPoint needs at least one coordinate")
        for idx, value in enumerate(coords):
            if not (0.0 < value < 1.0):
                raise DomainError(
                    f"UnitPoint coordinate {idx} = {value!r} is not inside (0, 1)"
                )
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: float) -> "UnitPoint":
        return cls(tuple(coords))

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def permuted(self, permutation: Sequence[int]) -> "UnitPoint":
        if sorted(permutation) != list(range(self.dimension)):
            raise DimensionError(
                f"{tuple(permutation)} is not a permutation of {self.dimension} indices"
            )
        return UnitPoint(tuple(self.coords[i] for i in permutation))

    def __len__(self) -> int:
        return len(self.coords)


PointsLike = Union[UnitPoint, Sequence[UnitPoint], np.ndarray, Sequence[Sequence[float]]]


def as_unit_array(points: PointsLike, dimension: Optional[int] = None) -> np.ndarray:
    """Return ``points`` as an ``(n, M)`` float array strictly inside (0, 1)^M.

    A single ``UnitPoint`` or a 1-D array is treated as one point.
    Raises ``DomainError`` for coordinates on or outside the boundary and
    ``DimensionError`` when ``dimension`` is given and does not match.
    """
    arr = _points_array(points, dimension)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("points must lie strictly inside the open unit hypercube")
    return arr


def radial_reflection(u: PointsLike) -> Union[UnitPoint, np.ndarray]:
    """Map ``u`` to ``1_M - u``; an involution with fixed point (1/2, ..., 1/2)."""
    if isinstance(u, UnitPoint):
        return UnitPoint(tuple(1.0 - c for c in u.coords))
    return 1.0 - as_unit_array(u)


def interior_grid(grid_per_dim: int, dimension: int) -> np.ndarray:
    """Cell-midpoint tensor grid ``(j + 1/2) / grid_per_dim`` in row-major order."""
    if grid_per_dim < 1:
        raise DomainError("grid_per_dim must be at least 1")
    axis = (np.arange(grid_per_dim) + 0.5) / grid_per_dim
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def permutations_of(dimension: int) -> Iterable[tuple[int, ...]]:
    return itertools.permutations(range(dimension))


def as_cdf_array(points: PointsLike, dimension: Optional[int] = None) -> np.ndarray:
    """Like ``as_unit_array`` but admits the upper face ``u_i = 1`` where copula CDFs are defined."""
    arr = _points_array(points, dimension)
    if not np.all((arr > 0.0) & (arr <= 1.0)):
        raise DomainError("CDF arguments must lie in (0, 1]")
    return arr


def _points_array(points: PointsLike, dimension: Optional[int]) -> np.ndarray:
    if isinstance(points, UnitPoint):
        arr = points.as_array()[None, :]
    elif isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        items = list(points)  # type: ignore[arg-type]
        if items and isinstance(items[0], UnitPoint):
            arr = np.array([p.coords for p in items], dtype=float)  # type: ignore[union-attr]
        else:
            arr = np.asarray(items, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D array of points, got shape {arr.shape}")
    if dimension is not None and arr.shape[1] != dimension:
        raise DimensionError(
            f"points have dimension {arr.shape[1]}, expected {dimension}"
        )
    return arr
