"""Simplified Dirichlet-Rescale sampler for per-coordinate bounds.

Kept as a baseline: its output is *not* uniform once two bounds can be
violated at the same time (see :mod:`fixsum.tiling`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleRegionError, NonTerminationError, PreconditionError
from .simplex_core import sample_flat_dirichlet_batch

DEFAULT_MAX_ITERS = 1000


@dataclass(frozen=True)
class BoundsSpec:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        up = np.asarray(self.upper, dtype=float)
        if lo.shape != up.shape or lo.ndim != 1 or lo.size < 2:
            raise PreconditionError("lower and upper must be vectors of equal length >= 2")
        if np.any(lo < 0) or np.any(up > 1):
            raise PreconditionError("bounds must lie in [0, 1]")
        if np.any(lo > up):
            raise InfeasibleRegionError("lower bound exceeds upper bound")
        if lo.sum() > 1 or up.sum() < 1:
            raise InfeasibleRegionError(f"empty region: sum(l) = {lo.sum()}, sum(u) = {up.sum()}")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in up))

    @classmethod
    def upper_only(cls, upper) -> BoundsSpec:
        return cls(tuple(0.0 for _ in upper), tuple(upper))

    @property
    def n(self) -> int:
        return len(self.upper)

    @property
    def free_mass(self) -> float:
        return 1.0 - sum(self.lower)

    def reduced_upper(self) -> np.ndarray:
        """Upper bounds after the substitution ``x = l + (1 - sum l) y``."""
        lo = np.asarray(self.lower)
        return (np.asarray(self.upper) - lo) / self.free_mass

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= np.asarray(self.lower)) and np.all(x <= np.asarray(self.upper)))


def rescale_step(y: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """One rescale out of the joint induced simplex of all violated bounds.

    Works on a single vector or row-wise on a batch. Rows without violated
    bounds are returned unchanged.
    """
    viol = y > upper
    t = np.where(viol, upper, 0.0)
    s = 1.0 - t.sum(axis=-1, keepdims=True)
    return np.maximum((y - t) / s, 0.0)


def trajectory(y0, upper, max_iters: int = DEFAULT_MAX_ITERS) -> list[np.ndarray]:
    """All iterates from ``y0`` until every upper bound holds."""
    y = np.asarray(y0, dtype=float)
    upper = np.asarray(upper, dtype=float)
    path = [y]
    for _ in range(max_iters):
        if not np.any(y > upper):
            return path
        y = rescale_step(y, upper)
        path.append(y)
    if np.any(y > upper):
        raise NonTerminationError(f"no feasible iterate after {max_iters} rescale steps", y)
    return path


def rescale_until_feasible(Y: np.ndarray, upper: np.ndarray, max_iters: int = DEFAULT_MAX_ITERS):
    """Batch version of :func:`trajectory` returning final points and step counts."""
    Y = np.array(Y, dtype=float)
    steps = np.zeros(Y.shape[0], dtype=np.int64)
    active = np.flatnonzero(np.any(Y > upper, axis=1))
    it = 0
    while active.size:
        if it >= max_iters:
            raise NonTerminationError(
                f"{active.size} draws still infeasible after {max_iters} rescale steps", Y[active[0]].copy()
            )
        Y[active] = rescale_step(Y[active], upper)
        steps[active] += 1
        active = active[np.any(Y[active] > upper, axis=1)]
        it += 1
    return Y, steps


def drs_sample_batch(bounds: BoundsSpec, size: int, rng: np.random.Generator, max_iters: int = DEFAULT_MAX_ITERS):
    """``size`` draws from the simplified DRS sampler and their step counts."""
    if max_iters < 1:
        raise PreconditionError("max_iters must be at least 1")
    lo = np.asarray(bounds.lower)
    if bounds.free_mass <= 0.0:
        return np.tile(lo, (size, 1)), np.zeros(size, dtype=np.int64)
    upper = bounds.reduced_upper()
    Y = sample_flat_dirichlet_batch(bounds.n, size, rng)
    Y, steps = rescale_until_feasible(Y, upper, max_iters)
    X = lo + bounds.free_mass * Y
    # keep the substituted point inside the box despite rounding
    X = np.clip(X, lo, np.asarray(bounds.upper))
    return X, steps


def drs_sample(bounds: BoundsSpec, rng: np.random.Generator, max_iters: int = DEFAULT_MAX_ITERS):
    X, steps = drs_sample_batch(bounds, 1, rng, max_iters)
    return X[0], int(steps[0])
