"""Chi-squared uniformity test on a grid of bins inside the feasible polytope.

Points are projected by dropping the last coordinate. A bin is kept only
when it lies entirely inside the projected feasible set, so under
uniformity every kept bin has the same expected count.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSet, bounds_constraints, expanded_matrix
from .drs import BoundsSpec
from .errors import DimensionError, FixsumError, PreconditionError

CORNER_SLACK = 1e-12
MIN_EXPECTED = 5.0
# sub-lattice points per axis used to test bins against polynomial constraints
POLY_LATTICE = 5
MAX_BINS_PER_DIM = 200
_EPS = 1e-16
_FPMIN = 1e-300


class DegenerateGridError(FixsumError, ValueError):
    pass


def _series_p(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _contfrac_q(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def incomplete_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)``."""
    if not a > 0:
        raise PreconditionError(f"Q(a, x) needs a > 0, got a = {a}")
    if x < 0:
        raise PreconditionError(f"Q(a, x) needs x >= 0, got x = {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _series_p(a, x)))
    return min(1.0, max(0.0, _contfrac_q(a, x)))


def chi2_sf(stat: float, dof: int) -> float:
    return incomplete_gamma_q(dof / 2.0, stat / 2.0)


@dataclass(frozen=True)
class ProjectedRegion:
    """Feasible set in the first ``n - 1`` coordinates: ``A y <= b`` plus polynomials."""

    A: np.ndarray
    b: np.ndarray
    cs: ConstraintSet

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @classmethod
    def of(cls, region) -> ProjectedRegion:
        cs = as_constraint_set(region)
        n = cs.n
        A_full, b_full = expanded_matrix(cs)
        # x_n = 1 - sum(y)
        A = A_full[:, :-1] - A_full[:, -1:]
        b = b_full - A_full[:, -1]
        simplex_A = np.vstack([-np.eye(n - 1), np.ones((1, n - 1))])
        simplex_b = np.concatenate([np.zeros(n - 1), [1.0]])
        return cls(np.vstack([A, simplex_A]), np.concatenate([b, simplex_b]), cs)

    def linear_ok(self, Y: np.ndarray, slack: float = CORNER_SLACK) -> np.ndarray:
        return np.all(Y @ self.A.T <= self.b + slack, axis=-1)

    def nonlinear_ok(self, Y: np.ndarray) -> np.ndarray:
        from .constraints import nonlinear_ok

        flat = Y.reshape(-1, Y.shape[-1])
        X = np.hstack([flat, 1.0 - flat.sum(axis=1, keepdims=True)])
        return nonlinear_ok(self.cs, X).reshape(Y.shape[:-1])


def as_constraint_set(region) -> ConstraintSet:
    if isinstance(region, ConstraintSet):
        return region
    if isinstance(region, BoundsSpec):
        return bounds_constraints(region.lower, region.upper)
    raise TypeError(f"expected ConstraintSet or BoundsSpec, got {type(region).__name__}")


@dataclass
class BinGrid:
    n_bins: int
    dim: int
    kept: np.ndarray  # (|B|, dim) integer multi-indices
    lookup: np.ndarray  # flat bin index -> position in kept, or -1

    @property
    def size(self) -> int:
        return len(self.kept)

    def corners(self, k: int) -> np.ndarray:
        base = self.kept[k] / self.n_bins
        offs = np.array(list(itertools.product((0, 1), repeat=self.dim))) / self.n_bins
        return base + offs

    def count(self, X) -> np.ndarray:
        """Counts per kept bin for simplex points ``X`` (shape ``(m, dim + 1)``)."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim + 1:
            raise DimensionError(f"sample of shape {X.shape} does not match grid dimension {self.dim + 1}")
        idx = np.floor(X[:, :-1] * self.n_bins).astype(np.int64)
        np.clip(idx, 0, self.n_bins - 1, out=idx)
        flat = np.ravel_multi_index(idx.T, (self.n_bins,) * self.dim)
        pos = self.lookup[flat]
        pos = pos[pos >= 0]
        return np.bincount(pos, minlength=self.size).astype(np.int64)


def build_grid(region, n_bins: int) -> BinGrid:
    """Keep the bins of ``[0, 1]^(n-1)`` that lie wholly in the projected region.

    Linear faces are tested exactly at the bin corners. Polynomial
    constraints are tested on a ``POLY_LATTICE``-point sub-lattice per axis,
    which is exact for multilinear terms and an approximation otherwise.
    """
    if n_bins < 1:
        raise PreconditionError("n_bins must be positive")
    proj = ProjectedRegion.of(region)
    dim = proj.dim
    shape = (n_bins,) * dim
    idx = np.indices(shape).reshape(dim, -1).T
    offs = np.array(list(itertools.product((0, 1), repeat=dim)), dtype=float)
    ok = np.ones(len(idx), dtype=bool)
    for off in offs:
        ok &= proj.linear_ok((idx + off) / n_bins)
    if proj.cs.has_nonlinear and ok.any():
        lattice = np.array(list(itertools.product(np.linspace(0, 1, POLY_LATTICE), repeat=dim)))
        cand = np.flatnonzero(ok)
        pts = (idx[cand][:, None, :] + lattice[None, :, :]) / n_bins
        ok[cand] = np.all(proj.nonlinear_ok(pts), axis=1)
    kept = idx[ok]
    if not len(kept):
        raise DegenerateGridError(f"no bin of a {n_bins}^{dim} grid lies inside the feasible region")
    lookup = np.full(n_bins**dim, -1, dtype=np.int64)
    lookup[np.ravel_multi_index(kept.T, shape)] = np.arange(len(kept))
    return BinGrid(n_bins, dim, kept, lookup)


def feasible_volume(region, draws: int = 200_000, seed: int = 0x5EED) -> float:
    """Monte-Carlo volume of the projected feasible set (fixed internal seed)."""
    from .constraints import satisfied_batch
    from .simplex_core import make_rng, sample_flat_dirichlet_batch

    cs = as_constraint_set(region)
    X = sample_flat_dirichlet_batch(cs.n, draws, make_rng(seed))
    frac = satisfied_batch(cs, X).mean()
    return float(frac) / math.factorial(cs.n - 1)


def auto_bins(region, sample_size: int, min_expected: float = 20.0, cap: int = MAX_BINS_PER_DIM) -> int:
    """Bins per axis so that a uniform sample fills each kept bin with ``min_expected`` points."""
    cs = as_constraint_set(region)
    dim = cs.n - 1
    vol = feasible_volume(cs)
    if vol <= 0:
        return cap
    nb = int((sample_size * 1.0 / (min_expected * vol)) ** (1.0 / dim))
    return max(2, min(cap, nb))


@dataclass
class GofReport:
    bins: int
    E: float
    chi2: float
    dof: int
    p: float
    total: int
    n_bins: int
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "bins": self.bins,
            "E": self.E,
            "chi2": self.chi2,
            "dof": self.dof,
            "p": self.p,
            "total": self.total,
            "n_bins_per_dim": self.n_bins,
            "warnings": list(self.warnings),
        }


def chi2_from_counts(counts, n_bins: int = 0) -> GofReport:
    O = np.asarray(counts, dtype=float)
    total = O.sum()
    if total <= 0:
        raise PreconditionError("no sample point fell into a kept bin")
    E = total / len(O)
    stat = float(((O - E) ** 2).sum() / E)
    dof = len(O) - 1
    notes = []
    if E < MIN_EXPECTED:
        notes.append(f"expected count {E:.3g} below {MIN_EXPECTED}; chi-squared approximation unreliable")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=3)
    p = chi2_sf(stat, dof) if dof > 0 else 1.0
    return GofReport(len(O), E, stat, dof, p, int(total), n_bins, notes)


def _iter_chunks(sample):
    if isinstance(sample, np.ndarray):
        yield sample
    else:
        for chunk in sample:
            yield np.atleast_2d(np.asarray(chunk, dtype=float))


def chi2_test(grid: BinGrid, sample) -> GofReport:
    """One-sample uniformity test; ``sample`` is an array or an iterable of chunks."""
    counts = np.zeros(grid.size, dtype=np.int64)
    seen = 0
    for chunk in _iter_chunks(sample):
        if len(chunk):
            counts += grid.count(chunk)
            seen += len(chunk)
    if seen == 0:
        raise PreconditionError("empty sample")
    return chi2_from_counts(counts, grid.n_bins)


def two_sample_chi2(counts_a, counts_b, n_bins: int = 0) -> GofReport:
    """Chi-squared test that two binned samples share one distribution.

    Bins empty in both samples are dropped; unequal totals are allowed.
    """
    R = np.asarray(counts_a, dtype=float)
    S = np.asarray(counts_b, dtype=float)
    keep = (R + S) > 0
    R, S = R[keep], S[keep]
    nr, ns = R.sum(), S.sum()
    if nr <= 0 or ns <= 0:
        raise PreconditionError("both samples need points in kept bins")
    stat = float((((math.sqrt(ns / nr) * R - math.sqrt(nr / ns) * S) ** 2) / (R + S)).sum())
    dof = len(R) - 1
    p = chi2_sf(stat, dof) if dof > 0 else 1.0
    E = min(nr, ns) / len(R)
    notes = []
    if E < MIN_EXPECTED:
        notes.append(f"expected count {E:.3g} below {MIN_EXPECTED}")
    return GofReport(len(R), E, stat, dof, p, int(nr + ns), n_bins, notes)
