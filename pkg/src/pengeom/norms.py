"""Polytope norms: scaled l1, supremum, and sorted-l1 (SLOPE), with exact
dual norms and subdifferential faces of the dual ball.

Values are duck-typed: Fraction inputs give exact rationals, float inputs
give floats. Face construction is exact-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Vector, rat, vec
from .geometry import (
    Face,
    hull_face,
    model_of,
    model_to_face,
    sign_to_crosspolytope_face,
    sign_to_cube_face,
    signed_permutations,
)

L1 = "l1"
SUP = "sup"
SLOPE = "slope"


@dataclass(frozen=True)
class SlopeWeights:
    """Nonincreasing nonnegative weights with w1 > 0. Strictly decreasing
    positive weights unlock the model/face machinery; the relaxed form is
    good for norm evaluation and uniqueness analysis only."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("empty weight vector")
        if self.values[0] <= 0 or any(x < 0 for x in self.values):
            raise ValueError("weights need w1 > 0 and all entries >= 0")
        if any(a < b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("weights must be nonincreasing")

    @classmethod
    def of(cls, entries: Sequence) -> "SlopeWeights":
        return cls(vec(entries))

    @property
    def strict(self) -> bool:
        return all(a > b for a, b in zip(self.values, self.values[1:])) and self.values[-1] > 0

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class PolytopeNorm:
    kind: str
    dim: int
    scale: Fraction = Fraction(1)  # l1 penalty multiplier
    weights: SlopeWeights | None = None

    def __post_init__(self):
        if self.kind not in (L1, SUP, SLOPE):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == L1 and self.scale <= 0:
            raise ValueError("l1 scale must be positive")
        if self.kind == SLOPE:
            if self.weights is None or len(self.weights) != self.dim:
                raise ValueError("slope norm needs weights matching the dimension")
        elif self.weights is not None:
            raise ValueError("weights only apply to the slope norm")

    def describe(self) -> dict:
        from .exact import rat_str

        d: dict = {"kind": self.kind, "dim": self.dim}
        if self.kind == L1:
            d["scale"] = rat_str(self.scale)
        if self.kind == SLOPE:
            d["weights"] = [rat_str(w) for w in self.weights]
        return d


def l1_norm(dim: int, scale=1) -> PolytopeNorm:
    return PolytopeNorm(L1, dim, scale=rat(scale))


def sup_norm(dim: int) -> PolytopeNorm:
    return PolytopeNorm(SUP, dim)


def slope_norm(weights: Sequence) -> PolytopeNorm:
    w = weights if isinstance(weights, SlopeWeights) else SlopeWeights.of(weights)
    return PolytopeNorm(SLOPE, len(w), weights=w)


def norm_value(norm: PolytopeNorm, x: Sequence):
    if len(x) != norm.dim:
        raise ValueError("dimension mismatch")
    if norm.kind == L1:
        return norm.scale * sum(abs(v) for v in x)
    if norm.kind == SUP:
        return max(abs(v) for v in x)
    mags = sorted((abs(v) for v in x), reverse=True)
    return sum(w * m for w, m in zip(norm.weights, mags))


def dual_norm_value(norm: PolytopeNorm, x: Sequence):
    """Support function of the unit ball: max/scale for l1, plain l1 sum for
    sup, and the best prefix ratio sum_{j<=k}|x|_(j) / sum_{j<=k} w_j for
    slope (the denominators are positive since w1 > 0)."""
    if len(x) != norm.dim:
        raise ValueError("dimension mismatch")
    if norm.kind == L1:
        return max(abs(v) for v in x) / norm.scale
    if norm.kind == SUP:
        return sum(abs(v) for v in x)
    mags = sorted((abs(v) for v in x), reverse=True)
    best = None
    num = 0
    den = 0
    for m, w in zip(mags, norm.weights):
        num = num + m
        den = den + w
        ratio = num / den
        if best is None or ratio > best:
            best = ratio
    return best


def dual_ball_membership(norm: PolytopeNorm, s: Sequence) -> bool:
    return dual_norm_value(norm, vec(s)) <= 1


def dual_ball_vertices(norm: PolytopeNorm) -> tuple[Vector, ...]:
    """Vertex set of the dual unit ball, deduplicated (ties or zeros in slope
    weights make signed permutations collide)."""
    p = norm.dim
    if norm.kind == L1:
        face = sign_to_cube_face(tuple([0] * p), scale=norm.scale)
        return face.vertices()
    if norm.kind == SUP:
        return sign_to_crosspolytope_face(tuple([0] * p)).vertices()
    seen: dict[Vector, None] = {}
    for g in signed_permutations(p):
        seen.setdefault(g.apply(norm.weights.values))
    return tuple(seen)


def subdifferential_face(norm: PolytopeNorm, x: Sequence) -> Face:
    """The face of the dual ball where s'x attains ||x||; equivalently the
    subdifferential of the norm at x. At x = 0 this is the whole ball."""
    xx = vec(x)
    if len(xx) != norm.dim:
        raise ValueError("dimension mismatch")
    if norm.kind == L1:
        sigma = tuple((v > 0) - (v < 0) for v in xx)
        return sign_to_cube_face(sigma, scale=norm.scale)
    if norm.kind == SUP:
        if not any(xx):
            return sign_to_crosspolytope_face(tuple([0] * norm.dim))
        top = max(abs(v) for v in xx)
        sigma = tuple(((v > 0) - (v < 0)) if abs(v) == top else 0 for v in xx)
        return sign_to_crosspolytope_face(sigma)
    if norm.weights.strict:
        return model_to_face(model_of(xx), norm.weights.values)
    # degenerate weights: fall back to the explicit achieving-vertex hull
    value = norm_value(norm, xx)
    achieving = [v for v in dual_ball_vertices(norm) if sum(a * b for a, b in zip(v, xx)) == value]
    return hull_face(achieving)


def unit_sphere_sign_points(norm: PolytopeNorm) -> list[tuple[tuple[int, ...], Vector]]:
    """(sigma, sigma / ||sigma||) for every nonzero sign vector: points of the
    primal unit sphere whose pairing against dual-ball faces identifies the
    vertex sets dual to a face. Every vertex of the primal ball is among them
    for all three families."""
    import itertools

    out = []
    for sigma in itertools.product((1, 0, -1), repeat=norm.dim):
        if not any(sigma):
            continue
        nv = norm_value(norm, vec(sigma))
        out.append((sigma, tuple(Fraction(s) / nv for s in sigma)))
    return out
