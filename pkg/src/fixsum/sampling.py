"""Sampler dispatch, the rejection oracle and sharded generation.

Shard ``w`` of a run always uses the stream ``make_rng(seed, w)`` and the
shards are concatenated in worker order, so output depends only on
``(seed, threads)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSet, satisfied_batch
from .drs import BoundsSpec, drs_sample_batch
from .drsc import DrscStats, InducedSimplexFamily, compute_thetas, drsc_sample_batch
from .errors import SamplingFailureError
from .simplex_core import make_rng, sample_flat_dirichlet_batch

ALGORITHMS = ("drs", "drsc", "reject")
CHUNK = 250_000


def rejection_sample_batch(cs: ConstraintSet, size: int, rng: np.random.Generator, max_draws: int | None = None):
    """Exact-uniform reference: flat Dirichlet draws kept iff they satisfy ``cs``."""
    out = []
    have = 0
    draws = 0
    limit = max_draws if max_draws is not None else max(1000 * size, 10_000_000)
    while have < size:
        need = size - have
        batch = max(1024, min(4 * need + 1024, CHUNK))
        X = sample_flat_dirichlet_batch(cs.n, batch, rng)
        draws += batch
        X = X[satisfied_batch(cs, X)]
        out.append(X[:need])
        have += min(len(X), need)
        if draws > limit and have < size:
            raise SamplingFailureError(
                f"rejection sampler accepted {have} of {draws} draws", acceptance_rate=have / draws
            )
    return np.vstack(out) if out else np.zeros((0, cs.n)), DrscStats(draws=draws, accepted=size, restarts=draws - size)


@dataclass
class SampleRun:
    X: np.ndarray
    algo: str
    seed: int
    threads: int
    stats: dict = field(default_factory=dict)
    thetas: tuple | None = None


def _shard_sizes(n: int, k: int) -> list[int]:
    base, extra = divmod(n, k)
    return [base + (1 if w < extra else 0) for w in range(k)]


class Sampler:
    """Bound to one algorithm and region; draws reproducible samples.

    ``region`` is a :class:`BoundsSpec` for ``drs``; ``drsc`` and ``reject``
    take a :class:`ConstraintSet` (a ``BoundsSpec`` is converted).
    """

    def __init__(self, algo: str, region, family: InducedSimplexFamily | None = None, order=None):
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
        self.algo = algo
        self.region = region
        self.family = None
        if algo == "drs":
            if not isinstance(region, BoundsSpec):
                raise TypeError("drs needs a BoundsSpec (per-coordinate bounds)")
        else:
            if isinstance(region, BoundsSpec):
                from .constraints import bounds_constraints

                region = bounds_constraints(region.lower, region.upper)
                self.region = region
            if algo == "drsc":
                self.family = family if family is not None else compute_thetas(region, order)

    @property
    def n(self) -> int:
        return self.region.n

    def _draw(self, size: int, rng):
        if self.algo == "drs":
            X, steps = drs_sample_batch(self.region, size, rng)
            return X, {"rescales": int(steps.sum()), "max_steps": int(steps.max()) if size else 0}
        if self.algo == "drsc":
            X, st = drsc_sample_batch(self.region, self.family, size, rng)
            return X, st.as_dict()
        X, st = rejection_sample_batch(self.region, size, rng)
        return X, {"draws": st.draws, "accepted": st.accepted, "acceptance_rate": st.acceptance_rate}

    def _draw_chunked(self, size: int, rng):
        parts, stats = [], []
        left = size
        while left > 0:
            m = min(CHUNK, left)
            X, st = self._draw(m, rng)
            parts.append(X)
            stats.append(st)
            left -= m
        if not parts:
            return np.zeros((0, self.n)), {}
        return np.vstack(parts), _merge_stats(stats)

    def chunks(self, size: int, seed: int, threads: int = 1):
        """Yield the sample shard by shard (bounded memory for large runs)."""
        for w, m in enumerate(_shard_sizes(size, threads)):
            rng = make_rng(seed, w)
            left = m
            while left > 0:
                k = min(CHUNK, left)
                X, _ = self._draw(k, rng)
                left -= k
                yield X

    def sample(self, size: int, seed: int, threads: int = 1) -> SampleRun:
        sizes = _shard_sizes(size, threads)
        if threads == 1:
            results = [self._draw_chunked(sizes[0], make_rng(seed, 0))]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futs = [pool.submit(self._draw_chunked, m, make_rng(seed, w)) for w, m in enumerate(sizes)]
                results = [f.result() for f in futs]
        X = np.vstack([r[0] for r in results]) if results else np.zeros((0, self.n))
        stats = _merge_stats([r[1] for r in results])
        thetas = self.family.thetas if self.family is not None else None
        return SampleRun(X, self.algo, seed, threads, stats, thetas)


def _merge_stats(parts: list[dict]) -> dict:
    out: dict = {}
    for st in parts:
        for k, v in st.items():
            if isinstance(v, dict):
                sub = out.setdefault(k, {})
                for kk, vv in v.items():
                    sub[kk] = sub.get(kk, 0) + vv
            elif k == "max_steps":
                out[k] = max(out.get(k, 0), v)
            elif isinstance(v, (int, np.integer)):
                out[k] = out.get(k, 0) + int(v)
    if "draws" in out and "accepted" in out:
        out["acceptance_rate"] = out["accepted"] / out["draws"] if out["draws"] else 0.0
    if "rescales" in out and "accepted" in out:
        out["rescales_per_sample"] = out["rescales"] / out["accepted"] if out["accepted"] else 0.0
    return out
