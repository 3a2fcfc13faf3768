"""Reference implementations used only by the tests.

None of these share code with the package paths they check.
"""

import itertools
import math

import numpy as np


def enumerate_vertices(A_ub, b_ub, A_eq=None, b_eq=None, tol=1e-9):
    """All basic feasible points of ``A_ub x <= b_ub, A_eq x = b_eq``.

    Brute force: every choice of ``n - rank(A_eq)`` active inequalities is
    solved together with the equalities as a square system.
    """
    A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.asarray(b_ub, dtype=float)
    n = A_ub.shape[1]
    if A_eq is None:
        A_eq = np.zeros((0, n))
        b_eq = np.zeros(0)
    A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float)).reshape(-1, n)
    b_eq = np.asarray(b_eq, dtype=float)
    verts = []
    need = n - np.linalg.matrix_rank(A_eq) if len(A_eq) else n
    for active in itertools.combinations(range(len(A_ub)), need):
        M = np.vstack([A_eq, A_ub[list(active)]])
        rhs = np.concatenate([b_eq, b_ub[list(active)]])
        if np.linalg.matrix_rank(M) < n:
            continue
        x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        if not np.allclose(M @ x, rhs, atol=1e-10):
            continue
        if np.all(A_ub @ x <= b_ub + tol) and (not len(A_eq) or np.allclose(A_eq @ x, b_eq, atol=tol)):
            verts.append(x)
    return verts


def lp_oracle(c, rows, bounds):
    """Best objective over the vertices, or None if there are none (infeasible)."""
    n = len(c)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for a, b, rel in rows:
        a = np.asarray(a, dtype=float)
        if rel == "<=":
            A_ub.append(a)
            b_ub.append(b)
        elif rel == ">=":
            A_ub.append(-a)
            b_ub.append(-b)
        else:
            A_eq.append(a)
            b_eq.append(b)
    for j, (lo, hi) in enumerate(bounds):
        e = np.zeros(n)
        e[j] = 1.0
        A_ub.append(-e)
        b_ub.append(-lo)
        A_ub.append(e)
        b_ub.append(hi)
    verts = enumerate_vertices(np.array(A_ub), np.array(b_ub), np.array(A_eq).reshape(-1, n), np.array(b_eq))
    if not verts:
        return None
    return max(float(np.dot(c, v)) for v in verts)


def simplex_region_max(n, i, A, b, extra_lower=None):
    """max x_i over the simplex intersected with ``A x <= b`` (and ``x_k >= t``), by vertices."""
    rows = [(np.ones(n), 1.0, "==")]
    rows += [(A[r], b[r], "<=") for r in range(len(b))]
    if extra_lower is not None:
        k, t = extra_lower
        e = np.zeros(n)
        e[k] = 1.0
        rows.append((e, t, ">="))
    c = np.zeros(n)
    c[i] = 1.0
    return lp_oracle(c, rows, [(0.0, 1.0)] * n)


def thetas_oracle(n, A, b):
    """Thresholds computed from the closed form for earlier simplices.

    Over ``{x in S : x_k >= t_k}`` the largest ``x_i`` (``i != k``) is ``1 - t_k``.
    """
    thetas = []
    for i in range(n):
        best = simplex_region_max(n, i, A, b)
        if best is None:
            raise ValueError("infeasible")
        for k in range(i):
            if 1.0 - thetas[k] >= 1e-9:
                best = max(best, 1.0 - thetas[k])
        thetas.append(min(max(best, 0.0), 1.0))
    return thetas


def affine_from_vertices(src_vertices, dst_vertices):
    """Linear map M with ``M v_j = w_j`` (points of the plane sum(x) = 1)."""
    V = np.asarray(src_vertices, dtype=float).T
    W = np.asarray(dst_vertices, dtype=float).T
    return W @ np.linalg.inv(V)


def drs_brute(x, upper, max_iters=10_000):
    """Scalar DRS loop written from scratch: returns final point and step count."""
    x = [float(v) for v in x]
    steps = 0
    while any(xi > ui for xi, ui in zip(x, upper)):
        t = [ui if xi > ui else 0.0 for xi, ui in zip(x, upper)]
        s = 1.0 - math.fsum(t)
        x = [(xi - ti) / s for xi, ti in zip(x, t)]
        steps += 1
        if steps > max_iters:
            raise RuntimeError("no convergence")
    return x, steps


def chi2_tail_quadrature(stat, dof):
    """Upper tail of the chi-squared law by numerical integration of its density."""
    from scipy.integrate import quad

    k = dof / 2.0
    logc = -k * math.log(2.0) - math.lgamma(k)

    def pdf(x):
        return math.exp(logc + (k - 1) * math.log(x) - x / 2.0) if x > 0 else 0.0

    val, _ = quad(pdf, stat, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def corner_simplex_fraction(upper):
    """Feasible fraction of ``{x in S : x <= u}`` in 3-D by inclusion-exclusion."""
    u = list(upper)
    excess = [max(0.0, 1.0 - ui) for ui in u]
    frac = 1.0 - sum(e**2 for e in excess)
    for i, j in itertools.combinations(range(3), 2):
        over = 1.0 - u[i] - u[j]
        if over > 0:
            frac += over**2
    return frac
