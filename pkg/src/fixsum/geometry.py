"""Convex polygons in the plane: half-plane clipping, areas, differences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EMPTY_AREA = 1e-14


def shoelace(vertices) -> float:
    """Signed area, positive for counter-clockwise vertex order."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def clip_halfplane(vertices, a, b) -> np.ndarray:
    """Sutherland-Hodgman step: keep the part of the polygon with ``a . p <= b``."""
    v = np.asarray(vertices, dtype=float)
    if len(v) == 0:
        return v.reshape(0, 2)
    f = v @ np.asarray(a, dtype=float) - b
    out = []
    m = len(v)
    for k in range(m):
        p, q = v[k], v[(k + 1) % m]
        fp, fq = f[k], f[(k + 1) % m]
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            out.append(p + (fp / (fp - fq)) * (q - p))
    if not out:
        return np.zeros((0, 2))
    return _dedupe(np.array(out))


def _dedupe(v: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    keep = [0]
    for k in range(1, len(v)):
        if np.max(np.abs(v[k] - v[keep[-1]])) > tol:
            keep.append(k)
    if len(keep) > 1 and np.max(np.abs(v[keep[-1]] - v[keep[0]])) <= tol:
        keep.pop()
    return v[keep]


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Vertices in counter-clockwise order."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) >= 3 and shoelace(v) < 0:
            v = v[::-1]
        object.__setattr__(self, "vertices", v)

    @property
    def area(self) -> float:
        return max(shoelace(self.vertices), 0.0)

    @property
    def is_empty(self) -> bool:
        return self.area < EMPTY_AREA

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        a = cross.sum() / 2
        if abs(a) < EMPTY_AREA:
            return v.mean(axis=0)
        return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6 * a)

    def halfplanes(self) -> list[tuple[np.ndarray, float]]:
        """Edges as ``(a, b)`` with the interior on ``a . p <= b``."""
        v = self.vertices
        out = []
        for k in range(len(v)):
            p, q = v[k], v[(k + 1) % len(v)]
            d = q - p
            if not np.any(d):
                continue  # repeated vertex
            a = np.array([d[1], -d[0]])
            out.append((a, float(a @ p)))
        return out

    def clip(self, a, b) -> ConvexPolygon:
        return ConvexPolygon(clip_halfplane(self.vertices, a, b))

    def intersect(self, other: ConvexPolygon) -> ConvexPolygon:
        if self.is_empty or other.is_empty:
            return ConvexPolygon(np.zeros((0, 2)))
        v = self.vertices
        for a, b in other.halfplanes():
            v = clip_halfplane(v, a, b)
            if len(v) < 3:
                return ConvexPolygon(np.zeros((0, 2)))
        return ConvexPolygon(v)

    def difference(self, other: ConvexPolygon) -> list[ConvexPolygon]:
        """``self \\ other`` as disjoint convex pieces."""
        if self.is_empty:
            return []
        if other.is_empty:
            return [self]
        pieces = []
        rest = self.vertices
        for a, b in other.halfplanes():
            outside = ConvexPolygon(clip_halfplane(rest, -a, -b))
            if not outside.is_empty:
                pieces.append(outside)
            rest = clip_halfplane(rest, a, b)
            if len(rest) < 3 or shoelace(rest) < EMPTY_AREA:
                break
        return pieces

    def affine(self, scale: float, offset) -> ConvexPolygon:
        """Image under ``p -> scale * p + offset`` (``scale > 0``)."""
        return ConvexPolygon(scale * self.vertices + np.asarray(offset))

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.ones(len(pts), dtype=bool)
        for a, b in self.halfplanes():
            ok &= pts @ a <= b + tol * max(1.0, float(np.linalg.norm(a)))
        return ok

    def key(self, digits: int = 9) -> tuple:
        """Order-independent rounded vertex set, for deduplication."""
        return tuple(sorted((round(float(x), digits) + 0.0, round(float(y), digits) + 0.0) for x, y in self.vertices))


def halfplane_polygon(base: ConvexPolygon, planes) -> ConvexPolygon:
    v = base.vertices
    for a, b in planes:
        v = clip_halfplane(v, a, b)
    return ConvexPolygon(v)
