"""Linear and polynomial constraints on points of the simplex.

Linear constraints get an additive slack (``eps_ineq`` for inequalities,
``eps_eq`` for each half of an equality); polynomial constraints are tested
exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionError, PreconditionError

DEFAULT_EPS_INEQ = 1e-3
DEFAULT_EPS_EQ = 1e-2

LE = "<="
EQ = "=="
GE = ">="

_REL_ALIASES = {"<=": LE, "=<": LE, "le": LE, "==": EQ, "=": EQ, "eq": EQ, ">=": GE, "=>": GE, "ge": GE}


@dataclass(frozen=True)
class LinearConstraint:
    a: tuple[float, ...]
    b: float
    rel: str = LE

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or not np.any(a != 0):
            raise PreconditionError("linear constraint needs a nonzero coefficient vector")
        rel = _REL_ALIASES.get(self.rel)
        if rel is None:
            raise PreconditionError(f"unknown relation {self.rel!r}")
        b = float(self.b)
        if rel == GE:
            a, b, rel = -a, -b, LE
        object.__setattr__(self, "a", tuple(float(v) for v in a))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rel", rel)


@dataclass(frozen=True)
class PolynomialConstraint:
    """``sum(coef * prod(x_i ** exp_i)) <= bound``."""

    terms: tuple[tuple[float, tuple[int, ...]], ...]
    bound: float = 0.0

    def __post_init__(self):
        terms = []
        for coef, exps in self.terms:
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise PreconditionError(f"negative exponent in {exps}")
            terms.append((float(coef), exps))
        if not terms:
            raise PreconditionError("polynomial constraint needs at least one term")
        if len({len(e) for _, e in terms}) != 1:
            raise PreconditionError("all exponent vectors must have the same length")
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "bound", float(self.bound))

    @property
    def n(self) -> int:
        return len(self.terms[0][1])

    def evaluate(self, x) -> np.ndarray:
        """Polynomial value at ``x`` (a vector or an ``(m, n)`` batch)."""
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for coef, exps in self.terms:
            term = np.full(x.shape[:-1], coef)
            for i, e in enumerate(exps):
                if e:
                    term = term * x[..., i] ** e
            total = total + term
        return total


class ViolationReport(NamedTuple):
    satisfied: bool
    linear: list[int]
    nonlinear: list[int]


@dataclass(frozen=True)
class ConstraintSet:
    """The constraint family ``J``: linear rows, polynomials and predicates.

    ``predicates`` is a library-only hook: callables mapping an ``(m, n)``
    batch to a boolean mask of rows that satisfy the constraint. They are
    treated like polynomial constraints (restart on violation) and are not
    serialized.
    """

    n: int
    linear: tuple[LinearConstraint, ...] = ()
    nonlinear: tuple[PolynomialConstraint, ...] = ()
    eps_ineq: float = DEFAULT_EPS_INEQ
    eps_eq: float = DEFAULT_EPS_EQ
    predicates: tuple[Callable[[np.ndarray], np.ndarray], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"dimension must be at least 2, got {self.n}")
        object.__setattr__(self, "linear", tuple(self.linear))
        object.__setattr__(self, "nonlinear", tuple(self.nonlinear))
        object.__setattr__(self, "predicates", tuple(self.predicates))
        for k, c in enumerate(self.linear):
            if len(c.a) != self.n:
                raise DimensionError(f"linear constraint {k} has length {len(c.a)}, expected {self.n}")
        for k, c in enumerate(self.nonlinear):
            if c.n != self.n:
                raise DimensionError(f"nonlinear constraint {k} has length {c.n}, expected {self.n}")
        if self.eps_ineq < 0 or self.eps_eq < 0:
            raise PreconditionError("tolerances must be nonnegative")

    @property
    def has_nonlinear(self) -> bool:
        return bool(self.nonlinear or self.predicates)

    def with_eps(self, eps_ineq: float | None = None, eps_eq: float | None = None) -> ConstraintSet:
        return ConstraintSet(
            self.n,
            self.linear,
            self.nonlinear,
            self.eps_ineq if eps_ineq is None else eps_ineq,
            self.eps_eq if eps_eq is None else eps_eq,
            self.predicates,
        )


def expand_linear(cs: ConstraintSet) -> list[tuple[np.ndarray, float]]:
    """Inequality pairs ``(a, b)`` meaning ``a . x <= b``, slack included.

    Order follows ``cs.linear``; an equality expands in place into its upper
    and lower half.
    """
    out = []
    for c in cs.linear:
        a = np.asarray(c.a)
        if c.rel == EQ:
            out.append((a, c.b + cs.eps_eq))
            out.append((-a, -c.b + cs.eps_eq))
        else:
            out.append((a, c.b + cs.eps_ineq))
    return out


def _expanded_owner(cs: ConstraintSet) -> list[int]:
    owner = []
    for k, c in enumerate(cs.linear):
        owner.extend([k, k] if c.rel == EQ else [k])
    return owner


def expanded_matrix(cs: ConstraintSet) -> tuple[np.ndarray, np.ndarray]:
    """The expanded rows stacked as ``(A, b)`` with ``A x <= b``."""
    rows = expand_linear(cs)
    if not rows:
        return np.zeros((0, cs.n)), np.zeros(0)
    return np.array([a for a, _ in rows]), np.array([b for _, b in rows])


def check(cs: ConstraintSet, x) -> ViolationReport:
    x = np.asarray(x, dtype=float)
    if x.shape != (cs.n,):
        raise DimensionError(f"vector of shape {x.shape} does not match dimension {cs.n}")
    A, b = expanded_matrix(cs)
    owner = _expanded_owner(cs)
    lin = sorted({owner[r] for r in np.flatnonzero(A @ x > b)}) if len(b) else []
    non = [k for k, c in enumerate(cs.nonlinear) if c.evaluate(x) > c.bound]
    non += [len(cs.nonlinear) + k for k, p in enumerate(cs.predicates) if not bool(np.asarray(p(x[None, :]))[0])]
    return ViolationReport(not lin and not non, lin, non)


def linear_ok(cs: ConstraintSet, X: np.ndarray) -> np.ndarray:
    """Row mask of ``X`` satisfying every expanded linear constraint."""
    A, b = expanded_matrix(cs)
    if not len(b):
        return np.ones(X.shape[0], dtype=bool)
    return np.all(X @ A.T <= b, axis=1)


def nonlinear_ok(cs: ConstraintSet, X: np.ndarray) -> np.ndarray:
    ok = np.ones(X.shape[0], dtype=bool)
    for c in cs.nonlinear:
        ok &= c.evaluate(X) <= c.bound
    for p in cs.predicates:
        ok &= np.asarray(p(X), dtype=bool)
    return ok


def satisfied_batch(cs: ConstraintSet, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != cs.n:
        raise DimensionError(f"batch of shape {X.shape} does not match dimension {cs.n}")
    return linear_ok(cs, X) & nonlinear_ok(cs, X)


def bounds_constraints(lower, upper, eps_ineq: float = 0.0) -> ConstraintSet:
    """Per-coordinate bounds ``l <= x <= u`` as a constraint set."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = upper.size
    rows = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        if upper[i] < 1.0:
            rows.append(LinearConstraint(tuple(e), upper[i], LE))
        if lower[i] > 0.0:
            rows.append(LinearConstraint(tuple(-e), -lower[i], LE))
    return ConstraintSet(n, tuple(rows), (), eps_ineq, 0.0)


def from_dict(data: dict) -> ConstraintSet:
    n = int(data["n"])
    linear = tuple(
        LinearConstraint(tuple(row["a"]), row["b"], row.get("rel", LE)) for row in data.get("linear", [])
    )
    nonlinear = []
    for row in data.get("nonlinear", []):
        terms = tuple((t["coef"], tuple(t["exp"])) for t in row["terms"])
        rel = _REL_ALIASES.get(row.get("rel", LE))
        if rel == GE:
            terms = tuple((-c, e) for c, e in terms)
            nonlinear.append(PolynomialConstraint(terms, -float(row["b"])))
        elif rel == LE:
            nonlinear.append(PolynomialConstraint(terms, row["b"]))
        else:
            raise PreconditionError(f"nonlinear constraints support <= and >= only, got {row.get('rel')!r}")
    return ConstraintSet(
        n,
        linear,
        tuple(nonlinear),
        float(data.get("eps_ineq", DEFAULT_EPS_INEQ)),
        float(data.get("eps_eq", DEFAULT_EPS_EQ)),
    )


def to_dict(cs: ConstraintSet) -> dict:
    return {
        "n": cs.n,
        "linear": [{"a": list(c.a), "b": c.b, "rel": c.rel} for c in cs.linear],
        "nonlinear": [
            {"terms": [{"coef": coef, "exp": list(exp)} for coef, exp in c.terms], "b": c.bound}
            for c in cs.nonlinear
        ],
        "eps_ineq": cs.eps_ineq,
        "eps_eq": cs.eps_eq,
    }


def load(path) -> ConstraintSet:
    with open(Path(path), encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def dump(cs: ConstraintSet, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(to_dict(cs), fh, indent=2)
