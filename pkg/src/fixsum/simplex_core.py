"""Points on the standard simplex, flat-Dirichlet draws and the rescale maps.

Vectors are plain ``numpy`` arrays. Functions with a ``_batch`` suffix take
arrays of shape ``(m, n)`` and operate row-wise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSimplexError, DimensionError, PreconditionError

SUM_TOL = 1e-12
RENORMALIZE_TOL = 1e-9
MEMBERSHIP_TOL = 1e-12

# vertices of the standard 2-simplex in the plane
PLANE_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def make_rng(seed: int, worker: int | None = None) -> np.random.Generator:
    """Deterministic PCG64 stream for ``seed``.

    ``worker`` derives an independent child stream, so parallel samplers
    never share state.
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if worker is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(worker,))
    return np.random.Generator(np.random.PCG64(ss))


def simplex_vector(entries, tol: float = RENORMALIZE_TOL) -> np.ndarray:
    """Validate ``entries`` as a point of the standard simplex.

    Small drift (below ``tol``) in the total is renormalized away; anything
    larger is rejected.
    """
    x = np.array(entries, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionError(f"expected a 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise PreconditionError("entries must be finite")
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise PreconditionError(f"entries must lie in [0, 1]: {x}")
    total = x.sum()
    if abs(total - 1.0) > tol:
        raise PreconditionError(f"entries sum to {total!r}, not 1")
    x = np.clip(x, 0.0, 1.0)
    return x / x.sum()


def sample_flat_dirichlet(n: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw from the standard (n-1)-simplex."""
    if n < 2:
        raise DimensionError(f"dimension must be at least 2, got {n}")
    e = rng.standard_exponential(n)
    return e / e.sum()


def sample_flat_dirichlet_batch(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if n < 2:
        raise DimensionError(f"dimension must be at least 2, got {n}")
    e = rng.standard_exponential((size, n))
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class RegularSubSimplex:
    """The regular copy ``{x in S : x_i >= t_i for all i with t_i > 0}`` of S.

    Its vertices are ``t + scale * e_j``.
    """

    offset: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.offset, dtype=float)
        if np.any(t < 0):
            raise PreconditionError(f"offsets must be nonnegative: {self.offset}")
        if 1.0 - t.sum() <= 0.0:
            raise DegenerateSimplexError(f"offsets {self.offset} leave no room (scale <= 0)")
        object.__setattr__(self, "offset", tuple(float(v) for v in t))

    @classmethod
    def single(cls, n: int, i: int, threshold: float) -> RegularSubSimplex:
        t = [0.0] * n
        t[i] = threshold
        return cls(tuple(t))

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.offset)

    @property
    def scale(self) -> float:
        return 1.0 - math.fsum(self.offset)

    @property
    def n(self) -> int:
        return len(self.offset)

    def vertex(self, j: int) -> np.ndarray:
        v = self.t.copy()
        v[j] += self.scale
        return v

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        active = self.t > 0
        return bool(np.all(x[active] >= self.t[active] - tol))


def rescale_to_standard(x, sub: RegularSubSimplex) -> np.ndarray:
    """Map ``x`` from ``sub`` onto the standard simplex: ``(x - t) / s``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sub.n,):
        raise DimensionError(f"vector of length {x.shape} does not match simplex dimension {sub.n}")
    if not sub.contains(x):
        raise PreconditionError(f"{x} lies outside the induced simplex with offset {sub.offset}")
    y = (x - sub.t) / sub.scale
    return np.maximum(y, 0.0)


def rescale_inverse(y, sub: RegularSubSimplex) -> np.ndarray:
    """Map a point of the standard simplex into ``sub``: ``s * y + t``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (sub.n,):
        raise DimensionError(f"vector of length {y.shape} does not match simplex dimension {sub.n}")
    return sub.scale * y + sub.t


def project_to_plane(x) -> np.ndarray:
    """Send a point of the 2-simplex to the equilateral triangle of side 1."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DimensionError(f"planar projection needs n = 3, got n = {x.shape[-1]}")
    return x @ PLANE_VERTICES


def lift_from_plane(p) -> np.ndarray:
    """Inverse of :func:`project_to_plane` (barycentric coordinates)."""
    p = np.asarray(p, dtype=float)
    x3 = p[..., 1] / PLANE_VERTICES[2, 1]
    x2 = p[..., 0] - 0.5 * x3
    return np.stack([1.0 - x2 - x3, x2, x3], axis=-1)


def plane_halfplane(coef, bound: float) -> tuple[np.ndarray, float]:
    """Rewrite ``coef . x <= bound`` (x on the simplex) as ``a . p <= b`` in the plane."""
    c = np.asarray(coef, dtype=float)
    h = PLANE_VERTICES[2, 1]
    # x1 = 1 - px - py/(2h), x2 = px - py/(2h), x3 = py/h
    a = np.array([
        -c[0] + c[1],
        -c[0] / (2 * h) - c[1] / (2 * h) + c[2] / h,
    ])
    return a, float(bound - c[0])
