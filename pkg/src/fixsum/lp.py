"""Dense two-phase simplex method with Bland's rule.

The problems solved here are tiny (a handful of variables, a few dozen
rows), so the tableau is kept dense and pivoting favours termination over
speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FixsumError, NumericError

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LE = "<="
EQ = "=="
GE = ">="


class LpInputError(FixsumError, ValueError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    """maximize ``c . x`` subject to ``rows`` and ``lo <= x <= hi``.

    Each row is ``(a, b, rel)`` with ``rel`` one of ``"<="``, ``"=="``;
    ``">="`` rows are accepted and negated.
    """

    objective: tuple
    rows: tuple = ()
    bounds: tuple | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise LpInputError("objective must be a nonempty vector")
        n = c.size
        rows = []
        for k, row in enumerate(self.rows):
            if len(row) != 3:
                raise LpInputError(f"row {k} must be (a, b, rel)")
            a, b, rel = row
            a = np.asarray(a, dtype=float)
            if a.shape != (n,):
                raise LpInputError(f"row {k} has length {a.size}, expected {n}")
            if rel == GE:
                a, b, rel = -a, -b, LE
            if rel not in (LE, EQ):
                raise LpInputError(f"row {k}: unknown relation {rel!r}")
            rows.append((tuple(a), float(b), rel))
        if self.bounds is None:
            bounds = tuple((0.0, math.inf) for _ in range(n))
        else:
            if len(self.bounds) != n:
                raise LpInputError(f"expected {n} variable bounds, got {len(self.bounds)}")
            bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
            for j, (lo, hi) in enumerate(bounds):
                if lo > hi:
                    raise LpInputError(f"variable {j}: lower bound {lo} exceeds upper bound {hi}")
                if lo == math.inf or hi == -math.inf:
                    raise LpInputError(f"variable {j}: empty bound interval")
        object.__setattr__(self, "objective", tuple(c))
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return len(self.objective)


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective_value: float = math.nan
    phase_one_objective: float = 0.0
    reduced_costs: np.ndarray | None = None
    pivots: list = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Standard-form tableau ``A z = b, z >= 0`` with an explicit basis."""

    def __init__(self, A, b, basis):
        self.A = A
        self.b = b
        self.basis = list(basis)
        self.pivots = []

    def pivot(self, r, c, phase):
        p = self.A[r, c]
        if abs(p) < PIVOT_TOL:
            raise NumericError(
                "pivot magnitude below threshold",
                {"row": r, "column": c, "pivot": p, "phase": phase},
            )
        self.A[r] /= p
        self.b[r] /= p
        for i in range(self.A.shape[0]):
            if i != r:
                f = self.A[i, c]
                if f != 0.0:
                    self.A[i] -= f * self.A[r]
                    self.b[i] -= f * self.b[r]
        self.b[(self.b < 0) & (self.b > -FEAS_TOL)] = 0.0
        self.basis[r] = c
        self.pivots.append((phase, r, c))

    def reduced_costs(self, cost):
        cb = cost[self.basis]
        return cost - cb @ self.A

    def run(self, cost, allowed, phase):
        """Maximize ``cost . z`` over the columns flagged in ``allowed``."""
        max_iter = 50 * (self.A.shape[0] + self.A.shape[1]) + 1000
        for _ in range(max_iter):
            d = self.reduced_costs(cost)
            entering = None
            for j in range(self.A.shape[1]):
                if allowed[j] and d[j] > FEAS_TOL and j not in self.basis:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL
            col = self.A[:, entering]
            best = None
            for i in range(self.A.shape[0]):
                if col[i] > PIVOT_TOL:
                    ratio = self.b[i] / col[i]
                    if (
                        best is None
                        or ratio < best[0] - 1e-15
                        or (abs(ratio - best[0]) <= 1e-15 and self.basis[i] < self.basis[best[1]])
                    ):
                        best = (ratio, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering, phase)
        raise NumericError("simplex iteration limit reached", {"phase": phase, "pivots": len(self.pivots)})


def _standard_form(lp: LinearProgram):
    """Shift/split variables so that every structural column is >= 0.

    Returns the dense constraint data plus a recipe to map ``z`` back to ``x``.
    """
    n = lp.n
    cols = []  # (original index, sign, offset)
    for j, (lo, hi) in enumerate(lp.bounds):
        if math.isfinite(lo):
            cols.append((j, 1.0, lo))
        elif math.isfinite(hi):
            cols.append((j, -1.0, hi))
        else:
            cols.append((j, 1.0, 0.0))
            cols.append((j, -1.0, 0.0))
    m_struct = len(cols)
    T = np.zeros((n, m_struct))
    shift = np.zeros(n)
    for k, (j, sign, off) in enumerate(cols):
        T[j, k] = sign
        shift[j] = off
    # x = T z + shift
    rows = []
    for a, b, rel in lp.rows:
        a = np.asarray(a)
        rows.append((a @ T, b - a @ shift, rel))
    for j, (lo, hi) in enumerate(lp.bounds):
        if math.isfinite(lo) and math.isfinite(hi):
            e = np.zeros(n)
            e[j] = 1.0
            rows.append((e @ T, hi - shift[j], LE))
    c = np.asarray(lp.objective) @ T
    return T, shift, rows, c


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` with the two-phase simplex method.

    Raises :class:`NumericError` when a pivot falls below ``PIVOT_TOL`` or
    the returned point fails its own feasibility re-check.
    """
    T, shift, rows, c_struct = _standard_form(lp)
    m = len(rows)
    ns = c_struct.size
    n_slack = sum(1 for _, _, rel in rows if rel == LE)
    b = np.zeros(m)
    slack_of = {}
    k = ns
    for i, (a, rhs, rel) in enumerate(rows):
        if rel == LE:
            slack_of[i] = k
            k += 1
    width = ns + n_slack
    needs_art = []
    A = np.zeros((m, width))
    for i, (a, rhs, rel) in enumerate(rows):
        A[i, :ns] = a
        if rel == LE:
            A[i, slack_of[i]] = 1.0
        b[i] = rhs
        if rhs < 0:
            A[i] *= -1.0
            b[i] = -rhs
        if rel == EQ or rhs < 0:
            needs_art.append(i)
    n_art = len(needs_art)
    full = np.zeros((m, width + n_art))
    full[:, :width] = A
    basis = [None] * m
    for i, (_, rhs, rel) in enumerate(rows):
        if rel == LE and rhs >= 0:
            basis[i] = slack_of[i]
    for k, i in enumerate(needs_art):
        full[i, width + k] = 1.0
        basis[i] = width + k
    tab = _Tableau(full, b.copy(), basis)
    is_art = np.zeros(width + n_art, dtype=bool)
    is_art[width:] = True

    phase_one = 0.0
    if n_art:
        cost1 = np.where(is_art, -1.0, 0.0)
        tab.run(cost1, np.ones(width + n_art, dtype=bool), phase=1)
        phase_one = float(sum(tab.b[i] for i in range(m) if is_art[tab.basis[i]]))
        if phase_one > FEAS_TOL:
            return LpSolution(INFEASIBLE, phase_one_objective=phase_one, pivots=tab.pivots)
        # drive zero-level artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if is_art[tab.basis[i]]:
                cand = [j for j in range(width) if abs(tab.A[i, j]) > PIVOT_TOL and j not in tab.basis]
                if cand:
                    tab.pivot(i, cand[0], phase=1)
                    keep.append(i)
            else:
                keep.append(i)
        tab.A = tab.A[keep][:, :width]
        tab.b = tab.b[keep]
        tab.basis = [tab.basis[i] for i in keep]
    else:
        tab.A = tab.A[:, :width]

    cost2 = np.zeros(width)
    cost2[:ns] = c_struct
    status = tab.run(cost2, np.ones(width, dtype=bool), phase=2)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, phase_one_objective=phase_one, pivots=tab.pivots)

    z = np.zeros(width)
    for i, j in enumerate(tab.basis):
        z[j] = tab.b[i]
    x = T @ z[:ns] + shift
    value = float(np.asarray(lp.objective) @ x)
    sol = LpSolution(
        OPTIMAL,
        x=x,
        objective_value=value,
        phase_one_objective=phase_one,
        reduced_costs=tab.reduced_costs(cost2),
        pivots=tab.pivots,
    )
    _verify(lp, sol)
    return sol


def _verify(lp: LinearProgram, sol: LpSolution) -> None:
    x = sol.x
    bad = []
    for k, (a, b, rel) in enumerate(lp.rows):
        lhs = float(np.dot(a, x))
        scale = max(1.0, abs(b), float(np.abs(a) @ np.abs(x)))
        if rel == LE and lhs > b + FEAS_TOL * scale:
            bad.append((k, lhs, b))
        if rel == EQ and abs(lhs - b) > FEAS_TOL * scale:
            bad.append((k, lhs, b))
    for j, (lo, hi) in enumerate(lp.bounds):
        if x[j] < lo - FEAS_TOL * max(1.0, abs(lo)) or x[j] > hi + FEAS_TOL * max(1.0, abs(hi)):
            bad.append((f"bound {j}", x[j], (lo, hi)))
    if bad:
        raise NumericError("solution fails feasibility re-check", {"violations": bad, "x": x.tolist()})


def maximize(objective, rows=(), bounds=None) -> LpSolution:
    return solve(LinearProgram(tuple(objective), tuple(rows), bounds))
