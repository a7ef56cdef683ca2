"""Combinatorial geometry of the dual balls: cube faces, cross-polytope
faces, and faces of the sign permutohedron labeled by integer models.

A model is an integer vector m encoding a sign and clustering pattern: the
entries of |m| are exactly {0, 1, ..., max|m|} minus nothing, i.e. every level
up to the top one is attained. model_of(x) is the pattern of x itself: equal
magnitudes share a level, larger magnitudes get larger levels, signs carry
over. Faces of the sign permutohedron of a strictly decreasing positive
weight vector are in bijection with models; the face of model m is a product
of plain permutohedra over the level blocks of m (largest level first, taking
consecutive weight chunks) times a sign permutohedron on the zero block.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact import RationalMatrix, Vector, dot, kernel_basis, rat, rowspace_preimage, vec
from .lp import LinearProgram, lp_feasible

DEFAULT_MODEL_LIMIT = 6
DEFAULT_SIGN_LIMIT = 10
DEFAULT_VERTEX_CAP = 100_000
BRUTE_FORCE_FACE_LIMIT = 4


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap; refuse, never truncate."""


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# models


def model_of(x: Sequence, tol=0) -> tuple[int, ...]:
    """Sign/cluster pattern of x. tol > 0 merges nearly equal magnitudes and
    flattens near-zeros (float inputs); tol = 0 is exact."""
    mags = [abs(v) for v in x]
    if tol == 0:
        level = {m: i + 1 for i, m in enumerate(sorted({m for m in mags if m > 0}))}
        return tuple(_sign(v) * level.get(abs(v), 0) for v in x)
    clusters: list[list] = []  # [lo, hi] magnitude ranges, ascending
    for m in sorted(m for m in mags if m > tol):
        if not clusters or m - clusters[-1][1] > tol:
            clusters.append([m, m])
        else:
            clusters[-1][1] = m

    def level_of(m):
        for i, (lo, hi) in enumerate(clusters):
            if lo - tol <= m <= hi + tol:
                return i + 1
        raise AssertionError("unclustered magnitude")

    return tuple(0 if abs(v) <= tol else _sign(v) * level_of(abs(v)) for v in x)


def is_model(m: Sequence[int]) -> bool:
    """Integer vector whose nonzero magnitudes cover 1..max exactly."""
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in m):
        return False
    mags = {abs(v) for v in m if v != 0}
    return mags == set(range(1, max(mags) + 1)) if mags else True


def _surjection_patterns(k: int) -> list[list[tuple[int, ...]]]:
    """patterns[L] = all maps [k] -> {1..L} hitting every level."""
    out: list[list[tuple[int, ...]]] = [[] for _ in range(k + 1)]
    for L in range(1, k + 1):
        for assignment in itertools.product(range(1, L + 1), repeat=k):
            if len(set(assignment)) == L:
                out[L].append(assignment)
    return out


def enumerate_models(p: int, limit: int = DEFAULT_MODEL_LIMIT) -> list[tuple[int, ...]]:
    """All models in dimension p, sorted by (max level, entries). The count
    grows like the ordered Bell numbers, hence the refusal cap."""
    if p < 1:
        raise ValueError("dimension must be >= 1")
    if p > limit:
        raise CapExceeded(f"model enumeration for p={p} exceeds cap {limit}")
    patterns_by_size = {k: _surjection_patterns(k) for k in range(1, p + 1)}
    out = [tuple([0] * p)]
    for support_size in range(1, p + 1):
        patterns = patterns_by_size[support_size]
        for support in itertools.combinations(range(p), support_size):
            for L in range(1, support_size + 1):
                for assignment in patterns[L]:
                    for signs in itertools.product((1, -1), repeat=support_size):
                        m = [0] * p
                        for pos, lvl, s in zip(support, assignment, signs):
                            m[pos] = s * lvl
                        out.append(tuple(m))
    out.sort(key=lambda m: (max(abs(v) for v in m), m))
    return out


def sign_vectors(p: int, limit: int = DEFAULT_SIGN_LIMIT) -> Iterator[tuple[int, ...]]:
    """All of {-1,0,1}^p in descending lexicographic order (1 > 0 > -1)."""
    if p > limit:
        raise CapExceeded(f"sign vector sweep for p={p} exceeds cap {limit}")
    return itertools.product((1, 0, -1), repeat=p)


# ---------------------------------------------------------------------------
# signed permutations


@dataclass(frozen=True)
class SignedPermutation:
    """x -> (signs[j] * x[perm[j]])_j. Orthogonal, preserves every norm here."""

    signs: tuple[int, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm is not a permutation")
        if len(self.signs) != len(self.perm) or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +/-1 and match perm length")

    @property
    def dim(self) -> int:
        return len(self.perm)

    def apply(self, x: Sequence) -> tuple:
        if len(x) != self.dim:
            raise ValueError("dimension mismatch")
        return tuple(s * x[p] for s, p in zip(self.signs, self.perm))

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self after other: compose(g).apply(x) == self.apply(other.apply(x))."""
        return SignedPermutation(
            tuple(self.signs[j] * other.signs[self.perm[j]] for j in range(self.dim)),
            tuple(other.perm[self.perm[j]] for j in range(self.dim)),
        )

    def invert(self) -> "SignedPermutation":
        q = [0] * self.dim
        for j, pj in enumerate(self.perm):
            q[pj] = j
        return SignedPermutation(tuple(self.signs[q[i]] for i in range(self.dim)), tuple(q))

    @classmethod
    def identity(cls, p: int) -> "SignedPermutation":
        return cls(tuple([1] * p), tuple(range(p)))

    @classmethod
    def sorting(cls, x: Sequence) -> "SignedPermutation":
        """A map taking x to its magnitude-sorted nonnegative rearrangement
        (descending). Ties break by original index, zeros keep sign +1."""
        order = sorted(range(len(x)), key=lambda j: (-abs(x[j]), j))
        signs = tuple(-1 if x[j] < 0 else 1 for j in order)
        return cls(signs, tuple(order))


def signed_permutations(p: int) -> Iterator[SignedPermutation]:
    for perm in itertools.permutations(range(p)):
        for signs in itertools.product((1, -1), repeat=p):
            yield SignedPermutation(signs, perm)


def apply_signed_permutation(g: SignedPermutation, x: Sequence) -> tuple:
    return g.apply(x)


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Block:
    coords: tuple[int, ...]
    weights: tuple[Fraction, ...]
    signed: bool  # sign permutohedron factor (zero-level block)


@dataclass(frozen=True)
class Face:
    """A face of one of the three dual-ball families.

    kind "box":       cube [-scale, scale]^p face; sign_vector fixes coords.
    kind "crosspoly": conv{sign_vector[j] * e_j}; all-zero sign_vector is the
                      whole cross-polytope.
    kind "signperm":  sign permutohedron face of a model; blocks hold the
                      weight chunks, signs the per-coordinate orientation.
    kind "hull":      explicit vertex list (brute-force fallback).
    """

    ambient_dim: int
    kind: str
    codim: int
    scale: Fraction = Fraction(1)
    sign_vector: tuple[int, ...] | None = None
    model: tuple[int, ...] | None = None
    blocks: tuple[Block, ...] = ()
    signs: tuple[int, ...] | None = None
    hull: tuple[Vector, ...] = ()

    def contains_zero(self) -> bool:
        if self.kind == "box":
            return all(s == 0 for s in self.sign_vector)
        if self.kind == "crosspoly":
            return all(s == 0 for s in self.sign_vector)
        if self.kind == "signperm":
            return all(v == 0 for v in self.model)
        return _hull_contains_zero(self.hull)

    def vertex_count(self) -> int:
        if self.kind == "box":
            return 2 ** sum(1 for s in self.sign_vector if s == 0)
        if self.kind == "crosspoly":
            k = sum(1 for s in self.sign_vector if s != 0)
            return k if k else 2 * self.ambient_dim
        if self.kind == "signperm":
            n = 1
            for b in self.blocks:
                n *= math.factorial(len(b.coords))
                if b.signed:
                    n *= 2 ** len(b.coords)
            return n
        return len(self.hull)

    def vertices(self, cap: int = DEFAULT_VERTEX_CAP) -> tuple[Vector, ...]:
        count = self.vertex_count()
        if cap is not None and count > cap:
            raise CapExceeded(f"face has {count} vertices, cap is {cap}")
        return _materialized_vertices(self)

    def _materialize(self) -> tuple[Vector, ...]:
        p = self.ambient_dim
        if self.kind == "box":
            choices = [
                ((self.scale * s,) if s else (-self.scale, self.scale))
                for s in self.sign_vector
            ]
            return tuple(itertools.product(*choices))
        if self.kind == "crosspoly":
            out = []
            supp = [j for j, s in enumerate(self.sign_vector) if s != 0]
            if not supp:
                for j in range(p):
                    for s in (1, -1):
                        e = [Fraction(0)] * p
                        e[j] = Fraction(s)
                        out.append(tuple(e))
                return tuple(out)
            for j in supp:
                e = [Fraction(0)] * p
                e[j] = Fraction(self.sign_vector[j])
                out.append(tuple(e))
            return tuple(out)
        if self.kind == "signperm":
            per_block = []
            for b in self.blocks:
                assignments = []
                for wperm in itertools.permutations(b.weights):
                    if b.signed:
                        for flips in itertools.product((1, -1), repeat=len(b.coords)):
                            assignments.append(tuple(f * w for f, w in zip(flips, wperm)))
                    else:
                        assignments.append(wperm)
                # duplicated assignments appear when weights tie; keep unique
                seen = []
                for a in assignments:
                    if a not in seen:
                        seen.append(a)
                per_block.append(seen)
            out = []
            for combo in itertools.product(*per_block):
                v = [Fraction(0)] * p
                for b, assigned in zip(self.blocks, combo):
                    for j, w in zip(b.coords, assigned):
                        v[j] = self.signs[j] * w
                out.append(tuple(v))
            return tuple(out)
        return self.hull

    def to_json_dict(self, include_vertices: bool = False) -> dict:
        from .exact import rat_str

        d: dict = {"kind": self.kind, "ambient_dim": self.ambient_dim, "codim": self.codim}
        if self.kind == "box":
            d["scale"] = rat_str(self.scale)
            d["sign_vector"] = list(self.sign_vector)
        elif self.kind == "crosspoly":
            d["sign_vector"] = list(self.sign_vector)
        elif self.kind == "signperm":
            d["model"] = list(self.model)
            d["signs"] = list(self.signs)
            d["blocks"] = [
                {
                    "coords": list(b.coords),
                    "weights": [rat_str(w) for w in b.weights],
                    "signed": b.signed,
                }
                for b in self.blocks
            ]
        if include_vertices or self.kind == "hull":
            d["vertices"] = [[rat_str(x) for x in v] for v in self.vertices()]
        return d


@functools.lru_cache(maxsize=8192)
def _materialized_vertices(face: Face) -> tuple[Vector, ...]:
    # repeated sweeps (accessibility tables, Monte Carlo trials) hit the same
    # faces over and over; materialization is pure, so a shared cache is safe
    return face._materialize()


def _hull_contains_zero(verts: tuple[Vector, ...]) -> bool:
    k = len(verts)
    p = len(verts[0])
    rows = [tuple(v[i] for v in verts) for i in range(p)]
    rows.append(tuple(Fraction(1) for _ in range(k)))
    rhs = [Fraction(0)] * p + [Fraction(1)]
    lp = LinearProgram(
        c=tuple(Fraction(0) for _ in range(k)),
        a_eq=tuple(vec(r) for r in rows),
        b_eq=vec(rhs),
        lower=tuple(Fraction(0) for _ in range(k)),
    )
    return lp_feasible(lp) is not None


def _validate_weights_strict(w: Sequence[Fraction]) -> tuple[Fraction, ...]:
    ww = vec(w)
    if any(a <= b for a, b in zip(ww, ww[1:])) or any(x <= 0 for x in ww):
        raise ValueError("model-level operations need strictly decreasing positive weights")
    return ww


def model_to_face(m: Sequence[int], w: Sequence) -> Face:
    """The sign-permutohedron face attached to model m: level blocks take
    consecutive weight chunks from the top, the zero block keeps free signs.
    Its codimension equals the top level of m."""
    mm = tuple(int(v) for v in m)
    if not is_model(mm):
        raise ValueError(f"{mm} is not a model: levels must cover 1..max")
    ww = _validate_weights_strict(w)
    p = len(ww)
    if len(mm) != p:
        raise ValueError("model and weights dimension mismatch")
    top = max(abs(v) for v in mm) if any(mm) else 0
    blocks = []
    start = 0
    for level in range(top, 0, -1):
        coords = tuple(j for j in range(p) if abs(mm[j]) == level)
        blocks.append(Block(coords, ww[start : start + len(coords)], signed=False))
        start += len(coords)
    zero_coords = tuple(j for j in range(p) if mm[j] == 0)
    if zero_coords:
        blocks.append(Block(zero_coords, ww[start:], signed=True))
    signs = tuple(-1 if v < 0 else 1 for v in mm)
    return Face(
        ambient_dim=p,
        kind="signperm",
        codim=top,
        model=mm,
        blocks=tuple(blocks),
        signs=signs,
    )


def sign_to_cube_face(sigma: Sequence[int], scale=1) -> Face:
    s = tuple(int(v) for v in sigma)
    if any(v not in (-1, 0, 1) for v in s):
        raise ValueError("sign vector entries must be -1, 0 or 1")
    return Face(
        ambient_dim=len(s),
        kind="box",
        codim=sum(1 for v in s if v != 0),
        scale=rat(scale),
        sign_vector=s,
    )


def sign_to_crosspolytope_face(sigma: Sequence[int]) -> Face:
    s = tuple(int(v) for v in sigma)
    if any(v not in (-1, 0, 1) for v in s):
        raise ValueError("sign vector entries must be -1, 0 or 1")
    p = len(s)
    supp = sum(1 for v in s if v != 0)
    return Face(
        ambient_dim=p,
        kind="crosspoly",
        codim=(p - supp + 1) if supp else 0,
        sign_vector=s,
    )


def hull_face(vertices: Sequence[Sequence]) -> Face:
    verts = tuple(vec(v) for v in vertices)
    p = len(verts[0])
    if len(verts) == 1:
        dim = 0
    else:
        from .exact import rank

        diffs = RationalMatrix(tuple(
            tuple(a - b for a, b in zip(v, verts[0])) for v in verts[1:]
        ))
        dim = rank(diffs)
    return Face(ambient_dim=p, kind="hull", codim=p - dim, hull=verts)


# ---------------------------------------------------------------------------
# row-space intersection


@dataclass(frozen=True)
class RowspaceIntersection:
    point: Vector  # a point of the face inside row(X)
    z: Vector      # X'z == point


def face_intersects_rowspace(
    face: Face,
    X: RationalMatrix,
    kernel: tuple[Vector, ...] | None = None,
    cap: int = DEFAULT_VERTEX_CAP,
) -> RowspaceIntersection | None:
    """Exact intersection test between a dual-ball face and row(X).

    Works in kernel coordinates: with K a basis of ker(X), a convex
    combination s = V alpha lies in row(X) iff K's = 0, which leaves a tiny
    LP over alpha alone. The z with X'z = s is recovered afterwards.
    """
    if face.ambient_dim != X.ncols:
        raise ValueError("face and matrix dimension mismatch")
    zero = tuple(Fraction(0) for _ in range(X.ncols))
    if face.contains_zero():
        return RowspaceIntersection(zero, tuple(Fraction(0) for _ in range(X.nrows)))
    K = kernel_basis(X) if kernel is None else kernel
    verts = face.vertices(cap)
    if not K:
        point = verts[0]
    elif len(verts) == 1:
        v = verts[0]
        if any(dot(kb, v) != 0 for kb in K):
            return None
        point = v
    elif len(verts) == 2:
        # segment: solve a(K'v0) + (1-a)(K'v1) = 0 directly, no simplex
        a, b = verts
        da = [dot(kb, a) for kb in K]
        db = [dot(kb, b) for kb in K]
        alpha = None
        for ca, cb in zip(da, db):
            if ca != cb:
                alpha = cb / (cb - ca)
                break
        if alpha is None:
            if any(c != 0 for c in da):
                return None
            alpha = Fraction(0)
        if not 0 <= alpha <= 1:
            return None
        if any(alpha * ca + (1 - alpha) * cb != 0 for ca, cb in zip(da, db)):
            return None
        point = tuple(alpha * x + (1 - alpha) * y for x, y in zip(a, b))
    else:
        k = len(verts)
        rows = [tuple(dot(kb, v) for v in verts) for kb in K]
        rows.append(tuple(Fraction(1) for _ in range(k)))
        rhs = [Fraction(0)] * len(K) + [Fraction(1)]
        lp = LinearProgram(
            c=tuple(Fraction(0) for _ in range(k)),
            a_eq=tuple(vec(r) for r in rows),
            b_eq=vec(rhs),
            lower=tuple(Fraction(0) for _ in range(k)),
        )
        alpha = lp_feasible(lp)
        if alpha is None:
            return None
        point = tuple(
            sum((a * v[i] for a, v in zip(alpha, verts)), Fraction(0))
            for i in range(face.ambient_dim)
        )
    z = rowspace_preimage(X, point)
    if z is None:
        raise AssertionError("kernel-orthogonal point must lie in the row space")
    return RowspaceIntersection(point, z)


# ---------------------------------------------------------------------------
# brute-force exposed faces (degenerate weights and test oracles)


def enumerate_exposed_faces(vertices: Sequence[Sequence]) -> list[Face]:
    """Every non-empty face of conv(vertices), found as argmax vertex sets of
    the integer functional grid {-p..p}^p.

    Valid because each vertex set here is a single orbit of the signed
    permutation group, so the polytope's normal fan is coarsened by the
    signed-permutation fan and every cell of that fan contains a grid point.
    Exact integer arithmetic throughout.
    """
    verts = [vec(v) for v in vertices]
    p = len(verts[0])
    if p > BRUTE_FORCE_FACE_LIMIT:
        raise CapExceeded(f"brute-force face enumeration capped at p={BRUTE_FORCE_FACE_LIMIT}")
    ref = sorted(abs(x) for x in verts[0])
    if any(sorted(abs(x) for x in v) != ref for v in verts):
        raise ValueError("vertex set must be one signed-permutation orbit")
    scale = 1
    for v in verts:
        for x in v:
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
    iverts = [tuple(int(x * scale) for x in v) for v in verts]
    found: set[frozenset[int]] = set()
    for a in itertools.product(range(-p, p + 1), repeat=p):
        best = None
        arg: list[int] = []
        for idx, v in enumerate(iverts):
            d = sum(ai * vi for ai, vi in zip(a, v))
            if best is None or d > best:
                best = d
                arg = [idx]
            elif d == best:
                arg.append(idx)
        found.add(frozenset(arg))
    faces = [hull_face([verts[i] for i in sorted(s)]) for s in found]
    faces.sort(key=lambda f: (f.codim, f.hull))
    return faces
