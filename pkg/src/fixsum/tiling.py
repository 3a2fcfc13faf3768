"""Exact audit of the simplified DRS sampler on a 3-D bound instance.

Running DRS backwards from the feasible set ``T_0`` tiles the simplex into
pieces that reach ``T_0`` after exactly ``i`` rescale steps. Pushing every
tile forward and comparing the mass it lands on each part of ``T_0`` with
the uniform share exposes the sampler's bias.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .geometry import ConvexPolygon, halfplane_polygon
from .simplex_core import PLANE_VERTICES, plane_halfplane

GOLDEN_UPPER = (0.5, 0.25, 1.0)
DEFAULT_DEPTH = 7
MAX_PIECES = 64
CONTAIN_TOL = 1e-9


class UnsupportedInstanceError(PreconditionError):
    pass


SIMPLEX = ConvexPolygon(PLANE_VERTICES)


@dataclass(frozen=True)
class Transform:
    """One rescale map together with the region where DRS applies it."""

    label: str
    violated: tuple[int, ...]
    offset: tuple[float, float, float]
    region: ConvexPolygon

    @property
    def scale(self) -> float:
        return 1.0 - sum(self.offset)

    @property
    def shift(self) -> np.ndarray:
        return np.asarray(self.offset) @ PLANE_VERTICES

    def forward(self, poly: ConvexPolygon) -> ConvexPolygon:
        return poly.affine(1.0 / self.scale, -self.shift / self.scale)

    def inverse(self, poly: ConvexPolygon) -> ConvexPolygon:
        return poly.affine(self.scale, self.shift)

    def forward_points(self, p: np.ndarray) -> np.ndarray:
        return (p - self.shift) / self.scale


@dataclass(frozen=True)
class TransformFamily:
    upper: tuple[float, float, float]
    feasible: ConvexPolygon
    transforms: tuple[Transform, ...]

    @classmethod
    def for_upper(cls, upper) -> TransformFamily:
        """Build the maps for a 3-D upper-bound vector.

        One map per nonempty set ``V`` of simultaneously violated bounds;
        ``A_k`` labels follow singletons in coordinate order, then larger
        sets.
        """
        u = tuple(float(v) for v in upper)
        if len(u) != 3:
            raise UnsupportedInstanceError(f"tiling audit needs a 3-D bound vector, got {len(u)} entries")
        if any(not 0.0 < v <= 1.0 for v in u) or sum(u) <= 1.0:
            raise UnsupportedInstanceError(f"bounds {u} do not give a full-dimensional feasible set")
        below = [halfplane_eq(i, u[i]) for i in range(3)]
        feasible = halfplane_polygon(SIMPLEX, [p for i, p in enumerate(below) if u[i] < 1.0])
        if feasible.is_empty:
            raise UnsupportedInstanceError("feasible set has zero area")
        binding = [i for i in range(3) if u[i] < 1.0]
        transforms = []
        for size in range(1, len(binding) + 1):
            for V in itertools.combinations(binding, size):
                planes = []
                for i in binding:
                    a, b = below[i]
                    planes.append((-a, -b) if i in V else (a, b))
                region = halfplane_polygon(SIMPLEX, planes)
                if region.is_empty:
                    continue
                offset = tuple(u[i] if i in V else 0.0 for i in range(3))
                transforms.append(Transform(f"A{len(transforms) + 1}", V, offset, region))
        if not transforms:
            raise UnsupportedInstanceError("no bound can be violated; nothing to audit")
        fam = cls(u, feasible, tuple(transforms))
        total = feasible.area + sum(t.region.area for t in transforms)
        if abs(total - SIMPLEX.area) > 1e-12:
            raise UnsupportedInstanceError("applicability regions do not partition the infeasible set")
        return fam

    def label(self, name: str) -> Transform:
        for t in self.transforms:
            if t.label == name:
                return t
        raise KeyError(name)


def halfplane_eq(i: int, bound: float):
    c = np.zeros(3)
    c[i] = 1.0
    return plane_halfplane(c, bound)


@dataclass(frozen=True)
class Tile:
    """Points that follow ``sequence`` (first map first) into ``T_0``."""

    sequence: tuple[str, ...]
    polygon: ConvexPolygon
    mass: float

    @property
    def steps(self) -> int:
        return len(self.sequence)

    @property
    def region(self) -> list[ConvexPolygon]:
        return [self.polygon]


@dataclass(frozen=True)
class ProjectedTile:
    tile: Tile
    polygon: ConvexPolygon

    @property
    def density(self) -> float:
        return self.tile.mass / self.polygon.area


def tile_simplex(upper=GOLDEN_UPPER, depth: int = DEFAULT_DEPTH) -> list[Tile]:
    """``T_0`` and every nonempty tile reachable in at most ``depth`` reverse steps."""
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    fam = upper if isinstance(upper, TransformFamily) else TransformFamily.for_upper(upper)
    total = SIMPLEX.area
    t0 = Tile((), fam.feasible, fam.feasible.area / total)
    tiles = [t0]
    frontier = [t0]
    for _ in range(depth):
        nxt = []
        for tile in frontier:
            for tr in fam.transforms:
                poly = tr.inverse(tile.polygon).intersect(tr.region)
                if poly.is_empty:
                    continue
                nxt.append(Tile((tr.label,) + tile.sequence, poly, poly.area / total))
        tiles.extend(nxt)
        frontier = nxt
    return tiles


def project_tiles(tiles: list[Tile], upper=GOLDEN_UPPER) -> list[ProjectedTile]:
    """Push each tile through its own maps into ``T_0``."""
    fam = upper if isinstance(upper, TransformFamily) else TransformFamily.for_upper(upper)
    maps = {t.label: t for t in fam.transforms}
    out = []
    for tile in tiles:
        poly = tile.polygon
        for label in tile.sequence:
            poly = maps[label].forward(poly)
        if poly.is_empty:
            continue
        out.append(ProjectedTile(tile, poly))
    return out


def unique_shapes(projected: list[ProjectedTile]) -> list[ConvexPolygon]:
    seen = {}
    for p in projected:
        seen.setdefault(p.polygon.key(), p.polygon)
    return list(seen.values())


@dataclass
class Region:
    index: int
    pieces: list[ConvexPolygon]
    realised: float
    target: float
    signature: tuple = ()

    @property
    def area(self) -> float:
        return sum(p.area for p in self.pieces)

    @property
    def delta(self) -> float:
        return self.realised - self.target

    @property
    def centroid(self) -> np.ndarray:
        return sum(p.centroid * p.area for p in self.pieces) / self.area

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        ok = np.zeros(len(pts), dtype=bool)
        for p in self.pieces:
            ok |= p.contains(pts, tol=1e-12)
        return ok


@dataclass
class RegionReport:
    """Masses in percent of the whole simplex."""

    regions: list[Region]
    residual: float
    depth: int
    n_tiles: int
    n_shapes: int
    upper: tuple = field(default=GOLDEN_UPPER)

    @property
    def realised_total(self) -> float:
        return sum(r.realised for r in self.regions)

    @property
    def target_total(self) -> float:
        return sum(r.target for r in self.regions)

    @property
    def sum_abs_delta(self) -> float:
        return sum(abs(r.delta) for r in self.regions)

    @property
    def max_abs_delta(self) -> float:
        return max(abs(r.delta) for r in self.regions)

    def as_dict(self) -> dict:
        return {
            "upper": list(self.upper),
            "depth": self.depth,
            "tiles": self.n_tiles,
            "unique_shapes": self.n_shapes,
            "regions": [
                {
                    "region": r.index,
                    "realised": r.realised,
                    "target": r.target,
                    "delta": r.delta,
                    "centroid": [float(c) for c in r.centroid],
                    "polygons": [p.vertices.tolist() for p in r.pieces],
                }
                for r in self.regions
            ],
            "total_realised": self.realised_total,
            "total_target": self.target_total,
            "residual": self.residual,
            "sum_abs_delta": self.sum_abs_delta,
        }


def atomic_regions(feasible: ConvexPolygon, shapes: list[ConvexPolygon], max_pieces: int = MAX_PIECES):
    """Split ``feasible`` by every shape; pieces sharing a membership pattern form one region."""
    pieces = [(feasible, ())]
    for shape in shapes:
        refined = []
        for poly, sig in pieces:
            inside = poly.intersect(shape)
            if not inside.is_empty:
                refined.append((inside, sig + (1,)))
            for part in poly.difference(shape):
                refined.append((part, sig + (0,)))
        pieces = refined
    groups: dict[tuple, list[ConvexPolygon]] = {}
    for poly, sig in pieces:
        groups.setdefault(sig, []).append(poly)
    if len(groups) > max_pieces:
        raise UnsupportedInstanceError(f"refinement produced {len(groups)} regions (limit {max_pieces})")
    return groups


def realised_mass(pieces: list[ConvexPolygon], projected: list[ProjectedTile]) -> float:
    """Fraction of simplex mass that the projected tiles deposit on ``pieces``."""
    total = 0.0
    for pt in projected:
        hit = sum(pt.polygon.intersect(p).area for p in pieces)
        if hit > 0.0:
            total += pt.tile.mass * hit / pt.polygon.area
    return total


def aggregate_by_shape(projected: list[ProjectedTile]) -> list[ProjectedTile]:
    """Merge projected tiles with identical shape; density is additive."""
    acc: dict[tuple, list] = {}
    for pt in projected:
        k = pt.polygon.key()
        if k in acc:
            acc[k][1] += pt.tile.mass
        else:
            acc[k] = [pt.polygon, pt.tile.mass]
    return [ProjectedTile(Tile((), poly, mass), poly) for poly, mass in acc.values()]


def region_report(tiles: list[Tile], projected: list[ProjectedTile], upper=GOLDEN_UPPER) -> RegionReport:
    """Realised vs uniform target mass on each atomic region of ``T_0``.

    Regions are numbered by descending centroid height, then ascending x.
    """
    fam = upper if isinstance(upper, TransformFamily) else TransformFamily.for_upper(upper)
    feasible = fam.feasible
    shapes = unique_shapes(projected)
    groups = atomic_regions(feasible, shapes)
    merged = aggregate_by_shape(projected)
    allocated = sum(t.mass for t in tiles)
    regions = []
    for sig, pieces in groups.items():
        area = sum(p.area for p in pieces)
        regions.append(Region(-1, pieces, 100.0 * realised_mass(pieces, merged), 100.0 * allocated * area / feasible.area, sig))
    regions.sort(key=lambda r: (-round(r.centroid[1], 12), round(r.centroid[0], 12)))
    for k, r in enumerate(regions):
        r.index = k
    return RegionReport(
        regions=regions,
        residual=100.0 * (1.0 - allocated),
        depth=max(t.steps for t in tiles),
        n_tiles=len(tiles),
        n_shapes=len(shapes),
        upper=fam.upper,
    )


def audit(upper=GOLDEN_UPPER, depth: int = DEFAULT_DEPTH):
    """Tile, project and report in one call."""
    fam = TransformFamily.for_upper(upper)
    tiles = tile_simplex(fam, depth)
    projected = project_tiles(tiles, fam)
    return tiles, projected, region_report(tiles, projected, fam)


def region_frequencies(report: RegionReport, X: np.ndarray) -> np.ndarray:
    """Percent of the rows of ``X`` (3-D simplex points) falling in each region."""
    from .simplex_core import project_to_plane

    P = project_to_plane(np.asarray(X))
    counts = np.array([r.contains(P).sum() for r in report.regions], dtype=float)
    return 100.0 * counts / len(P)


def contained(inner: ConvexPolygon, outer: ConvexPolygon, tol: float = CONTAIN_TOL) -> bool:
    return bool(np.all(outer.contains(inner.vertices, tol=tol)))
