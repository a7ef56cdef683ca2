"""Static SVG diagrams: 2-D dual balls with row-space lines, and the
response-space region whose penalized minimizer is zero.

Everything is drawn from exact rational geometry and formatted with fixed
precision, so a given input always produces byte-identical output.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .exact import RationalMatrix, dot, rank, rat_str, vec
from .geometry import (
    Face,
    enumerate_models,
    model_to_face,
    sign_to_cube_face,
    sign_to_crosspolytope_face,
    sign_vectors,
)
from .norms import (
    L1,
    SLOPE,
    SUP,
    PolytopeNorm,
    dual_ball_vertices,
    dual_norm_value,
    norm_value,
    unit_sphere_sign_points,
)

Vector = tuple[Fraction, ...]


def _norm_caption(norm: PolytopeNorm) -> str:
    if norm.kind == L1:
        return "l1 norm" if norm.scale == 1 else f"l1 norm, scale {rat_str(norm.scale)}"
    if norm.kind == SUP:
        return "sup norm"
    return "sorted-l1 weights (" + ", ".join(rat_str(w) for w in norm.weights) + ")"


def _fmt(v) -> str:
    s = f"{float(v):.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _ccw(points: Sequence[Vector]) -> list[Vector]:
    return sorted(points, key=lambda v: math.atan2(float(v[1]), float(v[0])))


def _pattern_faces(norm: PolytopeNorm) -> list[tuple[tuple[int, ...], Face, Vector]]:
    """Proper dual-ball faces keyed by their sign/model pattern, with the
    primal unit-sphere point exposing each."""
    out = []
    if norm.kind == SLOPE and not norm.weights.strict:
        return out
    if norm.kind == SLOPE:
        patterns = [m for m in enumerate_models(norm.dim) if any(m)]
        faces = [model_to_face(m, norm.weights.values) for m in patterns]
    elif norm.kind == L1:
        patterns = [s for s in sign_vectors(norm.dim) if any(s)]
        faces = [sign_to_cube_face(s, scale=norm.scale) for s in patterns]
    else:
        patterns = [s for s in sign_vectors(norm.dim) if any(s)]
        faces = [sign_to_crosspolytope_face(s) for s in patterns]
    for pattern, face in zip(patterns, faces):
        nv = norm_value(norm, vec(pattern))
        out.append((pattern, face, tuple(Fraction(t) / nv for t in pattern)))
    return out


def _minimal_boundary_face(norm: PolytopeNorm, s: Vector):
    """(pattern, face) of the smallest dual-ball face containing boundary
    point s, or None when the norm has no pattern indexing (tied weights)."""
    best = None
    for pattern, face, x in _pattern_faces(norm):
        if dot(x, s) == 1 and (best is None or face.codim > best[1].codim):
            best = (pattern, face)
    return best


class _Canvas:
    """Maps math coordinates into a square viewBox, y axis pointing up."""

    def __init__(self, reach: Fraction, size: int):
        self.size = size
        self.scale = size / (2.0 * float(reach))
        self.body: list[str] = []

    def map(self, pt) -> tuple[float, float]:
        return (
            self.size / 2.0 + float(pt[0]) * self.scale,
            self.size / 2.0 - float(pt[1]) * self.scale,
        )

    def line(self, a, b, stroke, width="1", dash=None):
        (x1, y1), (x2, y2) = self.map(a), self.map(b)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.body.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{width}"{extra} />'
        )

    def polygon(self, pts, fill, stroke, width="1.5"):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(self.map, pts))
        self.body.append(
            f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{width}" />'
        )

    def circle(self, center, r, fill):
        x, y = self.map(center)
        self.body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{fill}" />')

    def text(self, anchor_pt, label, size=11, fill="#1a1a1a"):
        x, y = self.map(anchor_pt)
        self.body.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" fill="{fill}" '
            f'font-family="sans-serif" text-anchor="middle">{escape(label)}</text>'
        )

    def caption(self, lines):
        for i, line in enumerate(lines):
            self.body.append(
                f'<text x="8" y="{16 + 14 * i}" font-size="12" fill="#1a1a1a" '
                f'font-family="sans-serif">{escape(line)}</text>'
            )

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" '
            f'height="{self.size}" viewBox="0 0 {self.size} {self.size}">'
        )
        bg = f'<rect width="{self.size}" height="{self.size}" fill="#ffffff" />'
        return "\n".join([head, bg, *self.body, "</svg>"])


def _axes(canvas: _Canvas, reach: Fraction):
    canvas.line((-reach, 0), (reach, 0), "#cccccc")
    canvas.line((0, -reach), (0, reach), "#cccccc")


def _label_point(face: Face, push: float) -> Vector:
    verts = face.vertices()
    centroid = [sum(col) / len(verts) for col in zip(*verts)]
    return tuple(c * Fraction(push).limit_denominator(100) for c in centroid)


def _highlight(canvas: _Canvas, face: Face, pattern, color: str):
    verts = face.vertices()
    if len(verts) == 1:
        canvas.circle(verts[0], 5, color)
    else:
        for a, b in zip(verts, verts[1:]):
            canvas.line(a, b, color, width="4")
    canvas.text(_label_point(face, 1.22), str(tuple(pattern)), fill="#9c3c00")


def dual_ball_figure(norm: PolytopeNorm, X: RationalMatrix | None = None, size: int = 420) -> str:
    """Dual unit ball in the plane; with a design matrix, also its row-space
    line and the faces that line crosses, labeled by sign vector or model."""
    if norm.dim != 2:
        raise ValueError("dual-ball figures need exactly two columns")
    poly = _ccw(dual_ball_vertices(norm))
    radius = max(max(abs(c) for c in v) for v in poly)
    reach = radius * Fraction(3, 2)
    canvas = _Canvas(reach, size)
    _axes(canvas, reach)
    canvas.polygon(poly, "#e8eef8", "#33557f")

    caption = [_norm_caption(norm)]
    if X is None:
        for pattern, face, _ in _pattern_faces(norm):
            push = 1.18 if face.codim >= 2 else 1.3
            canvas.text(_label_point(face, push), str(tuple(pattern)))
    else:
        if X.ncols != 2:
            raise ValueError("design matrix must have two columns")
        r = rank(X)
        caption.append(f"rank(X) = {r}")
        if r == 1:
            d = next(row for row in X.rows if any(row))
            stretch = reach / max(abs(c) for c in d)
            canvas.line(
                tuple(-c * stretch for c in d), tuple(c * stretch for c in d),
                "#b03030", width="1.5",
            )
            gauge = dual_norm_value(norm, d)
            for side in (1, -1):
                s = tuple(side * c / gauge for c in d)
                hit = _minimal_boundary_face(norm, s)
                canvas.circle(s, 3, "#701010")
                if hit is not None:
                    _highlight(canvas, hit[1], hit[0], "#e8850c")
    canvas.caption(caption)
    return canvas.render()


def _halfspace_rows(X: RationalMatrix, norm: PolytopeNorm) -> list[Vector]:
    rows: list[Vector] = []
    for _, x in unit_sphere_sign_points(norm):
        a = X.matvec(x)
        if any(t != 0 for t in a) and a not in rows:
            rows.append(a)
    return rows


def _polygon_vertices(rows: list[Vector]) -> list[Vector]:
    verts: list[Vector] = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            (a1, a2), (b1, b2) = rows[i], rows[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            u = ((b2 - a2) / det, (a1 - b1) / det)
            if u not in verts and all(dot(r, u) <= 1 for r in rows):
                verts.append(u)
    return _ccw(verts)


def response_region_figure(X: RationalMatrix, norm: PolytopeNorm, size: int = 420) -> str:
    """Region of responses whose penalized minimizer is exactly zero, drawn in
    the plane. Needs two rows and full row rank so the region is a polygon;
    its faces are then preimages under X' of the dual-ball faces met by
    row(X), labeled accordingly."""
    if X.nrows != 2:
        raise ValueError("response-region figures need exactly two rows")
    if norm.dim != X.ncols:
        raise ValueError("norm dimension must match column count")
    if rank(X) != 2:
        raise ValueError("rows must be linearly independent, else the region is unbounded")
    rows = _halfspace_rows(X, norm)
    poly = _polygon_vertices(rows)
    radius = max(max(abs(c) for c in v) for v in poly)
    reach = radius * Fraction(3, 2)
    canvas = _Canvas(reach, size)
    _axes(canvas, reach)
    canvas.polygon(poly, "#e7f3e7", "#2f6d2f")

    labeled = norm.kind != SLOPE or norm.weights.strict
    for i, v in enumerate(poly):
        canvas.circle(v, 2.5, "#2f6d2f")
        nxt = poly[(i + 1) % len(poly)]
        if labeled:
            hit = _minimal_boundary_face(norm, X.rmatvec(v))
            if hit is not None:
                canvas.text(tuple(c * Fraction(118, 100) for c in v), str(tuple(hit[0])), size=10)
            mid = tuple((a + b) / 2 for a, b in zip(v, nxt))
            hit = _minimal_boundary_face(norm, X.rmatvec(mid))
            if hit is not None:
                canvas.text(tuple(c * Fraction(13, 10) for c in mid), str(tuple(hit[0])), size=10)
    canvas.caption(["responses with zero minimizer", _norm_caption(norm)])
    return canvas.render()
