"""Vectorized root bracketing, bisection and finite-difference derivatives."""

from __future__ import annotations

import itertools
from typing import Callable, Union

import numpy as np

from .errors import NumericalError

ArrayFn = Callable[[np.ndarray], np.ndarray]

BISECTION_TOL = 1e-12
_MAX_BISECTION_STEPS = 400
_MAX_BRACKET_STEPS = 200
# Relative step of the nested central differences: h_i = FD_REL_STEP * min(u_i, 1 - u_i).
FD_REL_STEP = 1e-4


def bracket_increasing(
    fn: ArrayFn,
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Widen ``[lo, hi]`` until ``fn(lo) <= target <= fn(hi)`` for every entry."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(_MAX_BRACKET_STEPS):
        low_bad = fn(lo) > target
        high_bad = fn(hi) < target
        if not (low_bad.any() or high_bad.any()):
            return lo, hi
        width = np.maximum(hi - lo, 1.0)
        lo = np.where(low_bad, lo - width, lo)
        hi = np.where(high_bad, hi + width, hi)
    raise NumericalError("could not bracket the root of an increasing function")


def bisect_increasing(
    fn: ArrayFn,
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = BISECTION_TOL,
) -> np.ndarray:
    """Solve ``fn(x) = target`` elementwise for a nondecreasing ``fn``.

    ``lo`` and ``hi`` must bracket every root; the result is within ``tol`` of
    a point where ``fn`` crosses ``target``.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    for _ in range(_MAX_BISECTION_STEPS):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        below = fn(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def mixed_partial(cdf: ArrayFn, u: np.ndarray) -> np.ndarray:
    """Nested central difference of ``cdf`` in every coordinate at points ``u``.

    The per-coordinate step is ``FD_REL_STEP * min(u_i, 1 - u_i)`` so stencils
    never leave the open hypercube.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    h = FD_REL_STEP * np.minimum(u, 1.0 - u)
    dim = u.shape[1]
    total = np.zeros(u.shape[0])
    for signs in itertools.product((1.0, -1.0), repeat=dim):
        sign_vec = np.asarray(signs)
        total += np.prod(sign_vec) * cdf(u + sign_vec * h)
    return total / np.prod(2.0 * h, axis=1)


def open_uniform(rng: np.random.Generator, size: Union[int, tuple[int, ...]]) -> np.ndarray:
    """Uniform draws strictly inside (0, 1) on the 2**-53 lattice midpoints."""
    return (rng.integers(0, 2**53, size=size) + 0.5) / 2.0**53
