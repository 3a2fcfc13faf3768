"""Dirichlet-Rescale-Constraints sampler.

Thresholds ``theta_i`` define induced simplices ``S_i = {x in S : x_i >= theta_i}``
that hold only infeasible points and do not overlap. A draw inside some
``S_i`` is rescaled onto S; any other infeasible draw is discarded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp
from .constraints import ConstraintSet, expand_linear, linear_ok, nonlinear_ok
from .errors import InfeasibleRegionError, NumericError, SamplingFailureError
from .simplex_core import RegularSubSimplex, sample_flat_dirichlet_batch

EMPTY_DELTA = 1e-9
DEFAULT_MAX_RESTARTS = 100_000
DEFAULT_MAX_RESCALES = 100_000


class InfeasibleConstraintsError(InfeasibleRegionError):
    def __init__(self, message, subproblem=None):
        super().__init__(message)
        self.subproblem = subproblem


@dataclass(frozen=True)
class InducedSimplexFamily:
    thetas: tuple[float, ...]
    order: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.thetas)

    @property
    def empty(self) -> tuple[bool, ...]:
        return tuple(1.0 - t < EMPTY_DELTA for t in self.thetas)

    @property
    def simplices(self) -> dict[int, RegularSubSimplex]:
        return {
            i: RegularSubSimplex.single(self.n, i, t)
            for i, t in enumerate(self.thetas)
            if not self.empty[i]
        }

    def active(self) -> list[int]:
        """Nonempty simplex indices in membership-check order (ascending)."""
        return [i for i in range(self.n) if not self.empty[i]]

    def membership(self, X: np.ndarray) -> np.ndarray:
        """Index of the first induced simplex holding each row, or -1."""
        X = np.atleast_2d(X)
        out = np.full(X.shape[0], -1, dtype=np.int64)
        for i in reversed(self.active()):
            out[X[:, i] >= self.thetas[i]] = i
        return out


def _simplex_rows(n):
    return [(np.ones(n), 1.0, lp.EQ)]


def theta_subproblems(cs: ConstraintSet, i: int, fixed: dict[int, float]) -> list[tuple[str, lp.LinearProgram]]:
    """The decomposed LPs whose best value is ``theta_i``.

    One LP over the feasible region, plus one per earlier nonempty simplex
    ``S_k`` (points of S with ``x_k >= theta_k``).
    """
    n = cs.n
    c = np.zeros(n)
    c[i] = 1.0
    box = tuple((0.0, 1.0) for _ in range(n))
    rows = _simplex_rows(n) + [(a, b, lp.LE) for a, b in expand_linear(cs)]
    probs = [("feasible", lp.LinearProgram(tuple(c), tuple(rows), box))]
    for k, theta_k in fixed.items():
        e = np.zeros(n)
        e[k] = 1.0
        rows_k = _simplex_rows(n) + [(e, theta_k, lp.GE)]
        probs.append((f"S_{k}", lp.LinearProgram(tuple(c), tuple(rows_k), box)))
    return probs


def compute_thetas(cs: ConstraintSet, order=None) -> InducedSimplexFamily:
    """Largest non-overlapping induced simplices, fixed one dimension at a time.

    ``order`` is the processing order of the dimensions (default ascending).
    """
    n = cs.n
    order = tuple(range(n)) if order is None else tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}, got {order}")
    thetas = [1.0] * n
    fixed: dict[int, float] = {}
    for i in order:
        best = -np.inf
        for name, prog in theta_subproblems(cs, i, fixed):
            try:
                sol = lp.solve(prog)
            except NumericError as exc:
                exc.diagnostics["subproblem"] = f"theta_{i}/{name}"
                raise
            if sol.status == lp.INFEASIBLE:
                if name == "feasible":
                    raise InfeasibleConstraintsError(
                        f"linear constraints admit no point of the simplex (LP theta_{i}/{name} infeasible)",
                        subproblem=f"theta_{i}/{name}",
                    )
                continue
            best = max(best, sol.objective_value)
        theta = float(min(max(best, 0.0), 1.0))
        thetas[i] = theta
        if 1.0 - theta >= EMPTY_DELTA:
            fixed[i] = theta
    return InducedSimplexFamily(tuple(thetas), order)


@dataclass
class DrscStats:
    draws: int = 0
    restarts: int = 0
    rescales: int = 0
    accepted: int = 0
    per_simplex: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.draws if self.draws else 0.0

    def merge(self, other: DrscStats) -> DrscStats:
        per = dict(self.per_simplex)
        for k, v in other.per_simplex.items():
            per[k] = per.get(k, 0) + v
        return DrscStats(
            self.draws + other.draws,
            self.restarts + other.restarts,
            self.rescales + other.rescales,
            self.accepted + other.accepted,
            per,
        )

    def as_dict(self) -> dict:
        return {
            "draws": self.draws,
            "restarts": self.restarts,
            "rescales": self.rescales,
            "accepted": self.accepted,
            "acceptance_rate": self.acceptance_rate,
            "rescales_per_sample": self.rescales / self.accepted if self.accepted else 0.0,
            "rescales_by_simplex": {str(k): v for k, v in sorted(self.per_simplex.items())},
        }


def drsc_sample_batch(
    cs: ConstraintSet,
    fam: InducedSimplexFamily,
    size: int,
    rng: np.random.Generator,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    max_rescales: int = DEFAULT_MAX_RESCALES,
):
    """``size`` DRSC draws plus aggregate statistics.

    Every pending slot is advanced in lock step: accept, rescale out of the
    first induced simplex containing it, or redraw.
    """
    n = cs.n
    out = np.empty((size, n))
    stats = DrscStats()
    pending = np.arange(size)
    X = sample_flat_dirichlet_batch(n, size, rng)
    stats.draws += size
    restarts = np.zeros(size, dtype=np.int64)
    rescales_now = np.zeros(size, dtype=np.int64)
    thetas = np.asarray(fam.thetas)
    while pending.size:
        lin = linear_ok(cs, X)
        ok = lin.copy()
        if cs.has_nonlinear and lin.any():
            ok[lin] = nonlinear_ok(cs, X[lin])
        if ok.any():
            out[pending[ok]] = X[ok]
            stats.accepted += int(ok.sum())
        bad = ~ok
        member = fam.membership(X[bad]) if bad.any() else np.zeros(0, dtype=np.int64)
        idx_bad = np.flatnonzero(bad)
        resc = idx_bad[member >= 0]
        which = member[member >= 0]
        restart = idx_bad[member < 0]
        if resc.size:
            t = np.zeros((resc.size, n))
            t[np.arange(resc.size), which] = thetas[which]
            s = 1.0 - thetas[which]
            X[resc] = np.maximum((X[resc] - t) / s[:, None], 0.0)
            stats.rescales += resc.size
            for k, cnt in zip(*np.unique(which, return_counts=True)):
                stats.per_simplex[int(k)] = stats.per_simplex.get(int(k), 0) + int(cnt)
            rescales_now[resc] += 1
            stuck = resc[rescales_now[resc] > max_rescales]
            if stuck.size:
                raise NumericError(
                    "rescale loop did not leave the induced simplices",
                    {"max_rescales": max_rescales, "point": X[stuck[0]].tolist()},
                )
        if restart.size:
            X[restart] = sample_flat_dirichlet_batch(n, restart.size, rng)
            stats.draws += restart.size
            stats.restarts += restart.size
            restarts[restart] += 1
            rescales_now[restart] = 0
            if np.any(restarts[restart] > max_restarts):
                rate = stats.accepted / max(stats.draws, 1)
                raise SamplingFailureError(
                    f"a draw needed more than {max_restarts} restarts (acceptance rate estimate {rate:.3g})",
                    acceptance_rate=rate,
                )
        keep = ~ok
        pending = pending[keep]
        X = X[keep]
        restarts = restarts[keep]
        rescales_now = rescales_now[keep]
    return out, stats


def drsc_sample(
    cs: ConstraintSet,
    fam: InducedSimplexFamily,
    rng: np.random.Generator,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
):
    X, stats = drsc_sample_batch(cs, fam, 1, rng, max_restarts)
    return X[0], stats
