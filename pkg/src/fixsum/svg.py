"""Minimal SVG writers for simplex scatter plots and tiling figures."""

from __future__ import annotations

import colorsys
from xml.sax.saxutils import escape

import numpy as np

from .geometry import ConvexPolygon
from .simplex_core import PLANE_VERTICES, plane_halfplane, project_to_plane

SIZE = 500
MARGIN = 20


def _xy(p) -> tuple[float, float]:
    scale = SIZE - 2 * MARGIN
    # flip y so the apex points up
    return MARGIN + scale * float(p[0]), SIZE - MARGIN - scale * float(p[1])


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _points(vertices) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (_xy(p) for p in vertices))


class Canvas:
    def __init__(self, title: str = "", meta: dict | None = None):
        self.parts: list[str] = []
        self.title = title
        self.meta = meta or {}

    def polygon(self, vertices, fill="none", stroke="black", width=1.0, opacity=1.0):
        self.parts.append(
            f'<polygon points="{_points(vertices)}" fill="{fill}" fill-opacity="{opacity:.3f}" '
            f'stroke="{stroke}" stroke-width="{width}"/>'
        )

    def line(self, p, q, stroke="red", width=1.0, dash=""):
        (x1, y1), (x2, y2) = _xy(p), _xy(q)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{width}"{extra}/>'
        )

    def dots(self, P, r=1.2, fill="#1f77b4"):
        for p in P:
            x, y = _xy(p)
            self.parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{fill}"/>')

    def text(self, p, s, size=11):
        x, y = _xy(p)
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" text-anchor="middle">{escape(s)}</text>'
        )

    def render(self) -> str:
        meta = "".join(f"<{k}>{escape(str(v))}</{k}>" for k, v in sorted(self.meta.items()))
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">\n'
            f"<title>{escape(self.title)}</title>\n"
            f'<metadata><run xmlns="urn:fixsum">{meta}</run></metadata>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _segment_in_simplex(a: np.ndarray, b: float):
    """Endpoints of ``{a . p = b}`` inside the planar triangle, if any."""
    V = PLANE_VERTICES
    pts = []
    for i in range(3):
        p, q = V[i], V[(i + 1) % 3]
        fp, fq = a @ p - b, a @ q - b
        if abs(fp) < 1e-15:
            pts.append(p)
        elif fp * fq < 0:
            pts.append(p + fp / (fp - fq) * (q - p))
    uniq = []
    for p in pts:
        if all(np.linalg.norm(p - u) > 1e-12 for u in uniq):
            uniq.append(p)
    return uniq[:2] if len(uniq) >= 2 else None


def scatter_svg(X, linear=(), meta=None, title="sample") -> str:
    """Simplex outline, boundary lines ``a . x = b`` and the projected points."""
    c = Canvas(title, meta)
    c.polygon(PLANE_VERTICES, stroke="black", width=1.5)
    for a, b in linear:
        ap, bp = plane_halfplane(a, b)
        seg = _segment_in_simplex(ap, bp)
        if seg:
            c.line(seg[0], seg[1], stroke="#d62728", width=1.0, dash="4,3")
    X = np.asarray(X, dtype=float)
    if len(X):
        c.dots(project_to_plane(X))
    return c.render()


def _step_color(i: int, depth: int) -> str:
    if i == 0:
        return "#ffffff"
    h = 0.6 * (1 - (i - 1) / max(depth - 1, 1))
    r, g, b = colorsys.hsv_to_rgb(h, 0.55, 0.95)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def tiling_svg(tiles, depth: int, meta=None) -> str:
    """Tiles coloured by the number of rescale steps they need."""
    c = Canvas(f"tiling, depth {depth}", meta)
    for t in sorted(tiles, key=lambda t: t.steps):
        c.polygon(t.polygon.vertices, fill=_step_color(t.steps, depth), stroke="#333333", width=0.3)
    c.polygon(PLANE_VERTICES, stroke="black", width=1.5)
    return c.render()


def shapes_svg(feasible: ConvexPolygon, shapes, meta=None) -> str:
    """Distinct projected tile shapes overlaid on the feasible set."""
    c = Canvas("projected tile shapes", meta)
    c.polygon(PLANE_VERTICES, stroke="#999999", width=1.0)
    c.polygon(feasible.vertices, fill="#eeeeee", stroke="black", width=1.5)
    for s in shapes:
        c.polygon(s.vertices, fill="#1f77b4", stroke="#1f77b4", width=0.8, opacity=0.15)
    return c.render()


def delta_svg(report, meta=None) -> str:
    """Regions of the feasible set shaded by realised minus target mass."""
    c = Canvas("realised minus target mass (percentage points)", meta)
    c.polygon(PLANE_VERTICES, stroke="#999999", width=1.0)
    m = max(report.max_abs_delta, 1e-12)
    for r in report.regions:
        v = r.delta / m
        if v >= 0:
            col = f"#ff{int(255 * (1 - v)):02x}{int(255 * (1 - v)):02x}"
        else:
            col = f"#{int(255 * (1 + v)):02x}{int(255 * (1 + v)):02x}ff"
        for piece in r.pieces:
            c.polygon(piece.vertices, fill=col, stroke="black", width=0.5)
        c.text(r.centroid, f"{r.index}: {r.delta:+.2f}", size=9)
    return c.render()
