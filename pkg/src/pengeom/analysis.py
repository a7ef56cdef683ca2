"""Decision procedures built on the geometry engine.

Everything here is exact: uniqueness of penalized / equality-constrained
minimizers for all responses, accessibility of sign vectors and of ordered
sign/cluster models, certified non-uniqueness witnesses, response
classification, projection onto the null set, and seeded genericity
experiments over random designs.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    RationalMatrix,
    Vector,
    dot,
    kernel_basis,
    parse_rational,
    rank,
    rat_str,
    vec,
)
from .geometry import (
    BRUTE_FORCE_FACE_LIMIT,
    DEFAULT_MODEL_LIMIT,
    DEFAULT_SIGN_LIMIT,
    DEFAULT_VERTEX_CAP,
    CapExceeded,
    Face,
    enumerate_exposed_faces,
    enumerate_models,
    face_intersects_rowspace,
    model_of,
    model_to_face,
    sign_to_crosspolytope_face,
    sign_to_cube_face,
    sign_vectors,
)
from .norms import (
    L1,
    SLOPE,
    SUP,
    PolytopeNorm,
    dual_ball_membership,
    dual_ball_vertices,
    l1_norm,
    norm_value,
    slope_norm,
    unit_sphere_sign_points,
)
from .solvers import (
    SolverOptions,
    bp_certificate_holds,
    kkt_certify,
    norm_min_subject_to,
    solve_penalized,
)

GEOMETRIC = "geometric"
ANALYTIC = "analytic"
BOTH = "both"

# beyond this many sphere points the witness builder thins them to a
# spanning subset before the exact kernel solve
_WITNESS_POINT_BUDGET = 64


def _json_scalar(v):
    if isinstance(v, bool) or isinstance(v, (int, float)):
        return v
    return rat_str(v)


def _json_vector(xs):
    return None if xs is None else [_json_scalar(x) for x in xs]


def _certificate_dict(cert):
    return {
        "dual_vector": _json_vector(cert.dual_vector),
        "dual_norm": _json_scalar(cert.dual_norm),
        "pairing_gap": _json_scalar(cert.pairing_gap),
        "tol": _json_scalar(cert.tol),
        "passed": cert.passed,
    }


# ---------------------------------------------------------------------------
# uniqueness for all responses


@dataclass(frozen=True)
class NonUniquenessWitness:
    """Two distinct certified minimizers for one explicit response."""

    response: Vector
    first: Vector
    second: Vector
    objective: Fraction
    dual_vector: Vector

    def to_json_dict(self) -> dict:
        return {
            "response": _json_vector(self.response),
            "first": _json_vector(self.first),
            "second": _json_vector(self.second),
            "objective": _json_scalar(self.objective),
            "dual_vector": _json_vector(self.dual_vector),
        }


@dataclass(frozen=True)
class UniquenessReport:
    unique_for_all_y: bool
    rank: int
    mode: str  # "penalized" | "bp"
    norm: PolytopeNorm | None
    offending_face: Face | None = None
    witness: NonUniquenessWitness | None = None

    def to_json_dict(self) -> dict:
        return {
            "unique_for_all_y": self.unique_for_all_y,
            "rank": self.rank,
            "mode": self.mode,
            "norm": self.norm.describe() if self.norm is not None else None,
            "offending_face": (
                self.offending_face.to_json_dict(include_vertices=True)
                if self.offending_face is not None
                else None
            ),
            "witness": self.witness.to_json_dict() if self.witness is not None else None,
        }


@functools.lru_cache(maxsize=128)
def _cube_faces_beyond(p, r, scale, limit):
    buckets = {}
    for s in sign_vectors(p, limit):
        c = sum(1 for t in s if t)
        if c > r:
            buckets.setdefault(c, []).append(s)
    out = []
    for c in sorted(buckets):
        for s in buckets[c]:
            out.append(sign_to_cube_face(s, scale))
    return tuple(out)


def _faces_beyond_rank_uncached(norm: PolytopeNorm, r: int, limit: int | None):
    """Proper dual-ball faces with codimension > r, ascending codimension,
    deterministic label order within each level."""
    p = norm.dim
    if norm.kind == L1:
        yield from _cube_faces_beyond(p, r, norm.scale, limit or DEFAULT_SIGN_LIMIT)
    elif norm.kind == SUP:
        buckets = {}
        for s in sign_vectors(p, limit or DEFAULT_SIGN_LIMIT):
            supp = sum(1 for t in s if t)
            if supp == 0:
                continue
            c = p - supp + 1
            if c > r:
                buckets.setdefault(c, []).append(s)
        for c in sorted(buckets):
            for s in buckets[c]:
                yield sign_to_crosspolytope_face(s)
    elif norm.weights.strict:
        for m in enumerate_models(p, limit or DEFAULT_MODEL_LIMIT):
            if max(abs(t) for t in m) > r:
                yield model_to_face(m, norm.weights)
    else:
        # tied or zero weights break the model bijection; fall back to
        # brute-force exposed-face enumeration of the dual ball
        if p > BRUTE_FORCE_FACE_LIMIT:
            raise CapExceeded(
                f"degenerate weights need brute-force faces, capped at p <= {BRUTE_FORCE_FACE_LIMIT}"
            )
        faces = [f for f in enumerate_exposed_faces(dual_ball_vertices(norm)) if f.codim > r]
        faces.sort(key=lambda f: f.codim)
        yield from faces


@functools.lru_cache(maxsize=64)
def _faces_beyond_rank(norm: PolytopeNorm, r: int, limit: int | None) -> tuple[Face, ...]:
    # Monte Carlo sweeps reuse the same face list across hundreds of designs
    return tuple(_faces_beyond_rank_uncached(norm, r, limit))


def _combine(points, coeffs) -> Vector:
    p = len(points[0])
    return tuple(
        sum((c * pt[i] for c, pt in zip(coeffs, points)), Fraction(0)) for i in range(p)
    )


def _spanning_subset(points, target_rank):
    chosen, r = [], 0
    for x in points:
        trial = chosen + [x]
        rr = rank(RationalMatrix.from_rows(trial))
        if rr > r:
            chosen, r = trial, rr
            if r == target_rank:
                break
    return chosen


def _penalized_witness(X, norm, face, hit) -> NonUniquenessWitness:
    """Two certified minimizers from an intersected face of codim > rk(X).

    The sphere points pairing to 1 against every vertex of the face span the
    same space as the corresponding primal face, so their span meets ker(X)
    nontrivially; summing them and perturbing along that kernel direction
    (coefficients scaled below 1) keeps the norm and the fit unchanged.
    """
    verts = face.vertices()
    points = [x for _, x in unit_sphere_sign_points(norm) if all(dot(x, s) == 1 for s in verts)]
    if len(points) > _WITNESS_POINT_BUDGET:
        points = _spanning_subset(points, face.codim)
    cols = [X.matvec(x) for x in points]
    compressed = RationalMatrix.from_rows(
        [tuple(col[i] for col in cols) for i in range(X.nrows)]
    )
    coeffs = None
    for c in kernel_basis(compressed):
        if any(t != 0 for t in _combine(points, c)):
            coeffs = c
            break
    if coeffs is None:
        raise AssertionError("face span does not meet the kernel")
    scale = 2 * max(abs(t) for t in coeffs)
    coeffs = tuple(t / scale for t in coeffs)
    h = _combine(points, coeffs)
    first = tuple(sum(col, Fraction(0)) for col in zip(*points))
    second = tuple(a + b for a, b in zip(first, h))
    y = tuple(a + b for a, b in zip(X.matvec(first), hit.z))
    if norm_value(norm, second) != norm_value(norm, first) or first == second:
        raise AssertionError("perturbation must preserve the norm and move the point")
    for b in (first, second):
        if not kkt_certify(X, y, b, norm).passed:
            raise AssertionError("witness failed exact certification")
    objective = dot(hit.z, hit.z) / 2 + norm_value(norm, first)
    return NonUniquenessWitness(y, first, second, objective, hit.z)


def check_uniqueness(
    X: RationalMatrix,
    norm: PolytopeNorm,
    limit: int | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> UniquenessReport:
    """Is the penalized minimizer unique for every response?

    Sweeps the dual-ball faces of codimension above rk(X), ascending; the
    first face meeting row(X) settles the question and is turned into an
    explicit two-minimizer witness. No face hit means uniqueness for all y.
    """
    if norm.dim != X.ncols:
        raise ValueError("norm dimension does not match the matrix")
    r = rank(X)
    if r == X.ncols:
        return UniquenessReport(True, r, "penalized", norm)
    kernel = kernel_basis(X)
    for face in _faces_beyond_rank(norm, r, limit):
        hit = face_intersects_rowspace(face, X, kernel=kernel, cap=vertex_cap)
        if hit is not None:
            witness = _penalized_witness(X, norm, face, hit)
            return UniquenessReport(False, r, "penalized", norm, face, witness)
    return UniquenessReport(True, r, "penalized", norm)


def _bp_witness(X, face, hit) -> NonUniquenessWitness:
    sigma = face.sign_vector
    J = [j for j, s in enumerate(sigma) if s]
    sub = RationalMatrix.from_rows([tuple(row[j] for j in J) for row in X.rows])
    directions = [d for d in kernel_basis(sub)]
    if not directions:
        raise AssertionError("columns beyond the rank must be dependent")
    d = directions[0]
    top = max(abs(t) for t in d)
    d = tuple(t / (2 * top) for t in d)
    h = [Fraction(0)] * X.ncols
    for j, t in zip(J, d):
        h[j] = t
    first = vec(sigma)
    second = tuple(a + b for a, b in zip(first, h))
    value = sum(abs(t) for t in first)
    if sum(abs(t) for t in second) != value or first == second:
        raise AssertionError("kernel perturbation must preserve the l1 value")
    y = X.matvec(first)
    for b in (first, second):
        if not bp_certificate_holds(X, b, hit.z):
            raise AssertionError("witness failed the shared dual certificate")
    return NonUniquenessWitness(y, first, second, value, hit.z)


def check_uniqueness_bp(
    X: RationalMatrix,
    limit: int | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> UniquenessReport:
    """Equality-constrained l1 analogue of check_uniqueness: sweeps unit-cube
    faces of codimension above rk(X) against row(X)."""
    r = rank(X)
    if r == X.ncols:
        return UniquenessReport(True, r, "bp", None)
    kernel = kernel_basis(X)
    for face in _cube_faces_beyond(X.ncols, r, 1, limit or DEFAULT_SIGN_LIMIT):
        hit = face_intersects_rowspace(face, X, kernel=kernel, cap=vertex_cap)
        if hit is not None:
            witness = _bp_witness(X, face, hit)
            return UniquenessReport(False, r, "bp", None, face, witness)
    return UniquenessReport(True, r, "bp", None)


# ---------------------------------------------------------------------------
# accessibility


@dataclass(frozen=True)
class AccessibilityReport:
    pattern: tuple[int, ...]
    kind: str  # "sign" | "model"
    accessible: bool
    geometric_hit: bool | None
    analytic_value: Fraction | None
    pattern_norm: Fraction
    dual_witness: Vector | None
    response_witness: Vector | None
    response_witness_bp: Vector | None = None

    def to_json_dict(self) -> dict:
        return {
            "pattern": list(self.pattern),
            "kind": self.kind,
            "accessible": self.accessible,
            "geometric_hit": self.geometric_hit,
            "analytic_value": (
                _json_scalar(self.analytic_value) if self.analytic_value is not None else None
            ),
            "pattern_norm": _json_scalar(self.pattern_norm),
            "dual_witness": _json_vector(self.dual_witness),
            "response_witness": _json_vector(self.response_witness),
            "response_witness_bp": _json_vector(self.response_witness_bp),
        }


def _check_route(route):
    if route not in (GEOMETRIC, ANALYTIC, BOTH):
        raise ValueError(f"unknown route {route!r}")


def accessible_sign_vectors(
    X: RationalMatrix,
    route: str = BOTH,
    lam: Fraction = Fraction(1),
    limit: int | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> list[AccessibilityReport]:
    """Which sign vectors are realized by some l1 minimizer for some response.

    The geometric route intersects row(X) with the subdifferential face of
    each sign vector; the analytic route compares the constrained minimum of
    the l1 norm over the fiber against the pattern's own value. Both are
    exact and, when asked for together, are cross-checked against each other.
    The decision does not involve lam; it only scales the response witness.
    """
    _check_route(route)
    lam = parse_rational(lam) if not isinstance(lam, Fraction) else lam
    if lam <= 0:
        raise ValueError("penalty scale must be positive")
    p = X.ncols
    kernel = kernel_basis(X)
    plain = l1_norm(p)
    scaled = l1_norm(p, scale=lam)
    out = []
    for sigma in sign_vectors(p, limit or DEFAULT_SIGN_LIMIT):
        pattern_norm = Fraction(sum(1 for t in sigma if t))
        hit = None
        geometric_hit = None
        analytic_value = None
        if route in (GEOMETRIC, BOTH):
            face = sign_to_cube_face(sigma, 1)
            hit = face_intersects_rowspace(face, X, kernel=kernel, cap=vertex_cap)
            geometric_hit = hit is not None
        if route in (ANALYTIC, BOTH):
            analytic_value = norm_min_subject_to(X, vec(sigma), plain)[0]
        if route == BOTH and geometric_hit != (analytic_value == pattern_norm):
            raise AssertionError(f"route disagreement at {sigma}")
        accessible = geometric_hit if geometric_hit is not None else analytic_value == pattern_norm
        z = hit.z if hit is not None else None
        response = None
        response_bp = None
        if accessible:
            point = vec(sigma)
            response_bp = X.matvec(point)
            if z is not None:
                response = tuple(lam * a + b for a, b in zip(z, response_bp))
                if not kkt_certify(X, response, point, scaled).passed:
                    raise AssertionError("response witness failed certification")
                if not bp_certificate_holds(X, point, z):
                    raise AssertionError("shared dual vector must certify the pattern")
        out.append(
            AccessibilityReport(
                tuple(sigma),
                "sign",
                bool(accessible),
                geometric_hit,
                analytic_value,
                pattern_norm,
                z,
                response,
                response_bp,
            )
        )
    return out


def accessible_slope_models(
    X: RationalMatrix,
    weights,
    route: str = BOTH,
    limit: int | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> list[AccessibilityReport]:
    """Same sweep over all ordered sign/cluster models; the face of a model
    comes from the bijection with the signed-permutation polytope, so the
    weights must be strictly decreasing and positive."""
    _check_route(route)
    norm = slope_norm(weights)
    if norm.dim != X.ncols:
        raise ValueError("weight vector length does not match the matrix")
    w = norm.weights
    if not w.strict:
        raise ValueError("model sweep requires strictly decreasing positive weights")
    p = X.ncols
    kernel = kernel_basis(X)
    out = []
    for m in enumerate_models(p, limit or DEFAULT_MODEL_LIMIT):
        pattern_norm = norm_value(norm, vec(m))
        hit = None
        geometric_hit = None
        analytic_value = None
        if route in (GEOMETRIC, BOTH):
            face = model_to_face(m, w)
            hit = face_intersects_rowspace(face, X, kernel=kernel, cap=vertex_cap)
            geometric_hit = hit is not None
        if route in (ANALYTIC, BOTH):
            analytic_value = norm_min_subject_to(X, vec(m), norm)[0]
        if route == BOTH and geometric_hit != (analytic_value == pattern_norm):
            raise AssertionError(f"route disagreement at {m}")
        accessible = geometric_hit if geometric_hit is not None else analytic_value == pattern_norm
        z = hit.z if hit is not None else None
        response = None
        if accessible and z is not None:
            point = vec(m)
            response = tuple(a + b for a, b in zip(z, X.matvec(point)))
            if not kkt_certify(X, response, point, norm).passed:
                raise AssertionError("response witness failed certification")
        out.append(
            AccessibilityReport(
                tuple(m),
                "model",
                bool(accessible),
                geometric_hit,
                analytic_value,
                pattern_norm,
                z,
                response,
            )
        )
    return out


# ---------------------------------------------------------------------------
# response classification and null-set projection


@dataclass(frozen=True)
class Classification:
    model: tuple[int, ...]
    solution: tuple
    residual: tuple
    model_face: Face
    objective: float
    ambiguous: bool | None
    certificate: object

    def to_json_dict(self) -> dict:
        return {
            "model": list(self.model),
            "solution": _json_vector(self.solution),
            "residual": _json_vector(self.residual),
            "model_face": self.model_face.to_json_dict(),
            "objective": _json_scalar(self.objective),
            "ambiguous": self.ambiguous,
            "certificate": _certificate_dict(self.certificate),
        }


def _exact_input(X, y):
    if not isinstance(X, RationalMatrix):
        return None
    try:
        return vec(y)
    except TypeError:
        return None


def classify_response(
    X,
    weights,
    y,
    options: SolverOptions = SolverOptions(),
    cluster_tol: float = 1e-6,
) -> Classification:
    """Solve at y, read off the solution's model, and decompose y into fit
    plus residual. The ambiguity flag records whether the design admits
    non-unique minimizers at all (None when that check is out of reach)."""
    norm = slope_norm(weights)
    w = norm.weights
    exact_y = _exact_input(X, y)
    if exact_y is not None and dual_ball_membership(norm, X.rmatvec(exact_y)):
        # response inside the null set: zero is optimal and the residual is
        # the response itself, exactly
        m = tuple([0] * X.ncols)
        cert = kkt_certify(X, exact_y, vec([0] * X.ncols), norm)
        face = model_to_face(m, w)
        amb = _ambiguity_flag(X, norm)
        obj = dot(exact_y, exact_y) / 2
        return Classification(m, tuple([Fraction(0)] * X.ncols), exact_y, face, obj, amb, cert)
    sol = solve_penalized(X, y, norm, options)
    if not sol.converged:
        raise RuntimeError(
            f"solver failed to certify at tol {options.tol} within {options.max_iter} iterations"
        )
    m = model_of(sol.point, tol=cluster_tol)
    Xf = X.to_float_array() if isinstance(X, RationalMatrix) else X
    fitted = Xf @ [float(t) for t in sol.point]
    residual = tuple(float(t) - f for t, f in zip(y, fitted))
    face = model_to_face(m, w)
    amb = _ambiguity_flag(X, norm) if isinstance(X, RationalMatrix) else None
    return Classification(m, sol.point, residual, face, sol.objective, amb, sol.certificate)


def _ambiguity_flag(X, norm):
    try:
        return not check_uniqueness(X, norm).unique_for_all_y
    except CapExceeded:
        return None


def null_set_projection(X, norm: PolytopeNorm, y, options: SolverOptions = SolverOptions()):
    """Residual of the certified solve, which is the Euclidean projection of
    the response onto {u : the dual norm of X'u is at most 1}. Responses
    already inside that set come back unchanged."""
    exact_y = _exact_input(X, y)
    if exact_y is not None and dual_ball_membership(norm, X.rmatvec(exact_y)):
        return exact_y
    sol = solve_penalized(X, y, norm, options)
    if not sol.converged:
        raise RuntimeError("projection requires a certified solve")
    Xf = X.to_float_array() if isinstance(X, RationalMatrix) else X
    fitted = Xf @ [float(t) for t in sol.point]
    return tuple(float(t) - f for t, f in zip(y, fitted))


# ---------------------------------------------------------------------------
# genericity experiments


@dataclass(frozen=True)
class GenericityReport:
    n: int
    p: int
    mode: str
    norm: PolytopeNorm | None
    trials: int
    seed: int
    outcomes: tuple[bool, ...]

    @property
    def fraction_unique(self) -> Fraction:
        return Fraction(sum(self.outcomes), self.trials)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "mode": self.mode,
            "norm": self.norm.describe() if self.norm is not None else None,
            "trials": self.trials,
            "seed": self.seed,
            "fraction_unique": _json_scalar(self.fraction_unique),
            "outcomes": list(self.outcomes),
        }


def genericity_experiment(
    n: int,
    p: int,
    norm: PolytopeNorm | None = None,
    mode: str = "penalized",
    trials: int = 100,
    seed: int = 0,
    limit: int | None = None,
) -> GenericityReport:
    """Fraction of random Gaussian designs that are unique-for-all-y.

    Entries are drawn per trial from an independent substream and snapped to
    exact rationals at 12 significant digits, so every decision inside the
    loop is exact and the whole experiment replays bit-for-bit from the seed.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if mode == "penalized":
        if norm is None:
            raise ValueError("penalized mode needs a norm")
        if norm.dim != p:
            raise ValueError("norm dimension does not match p")
    elif mode == "bp":
        if norm is not None:
            raise ValueError("bp mode does not take a norm")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    outcomes = []
    for t in range(trials):
        rng = random.Random(seed + 7919 * t)
        X = RationalMatrix.from_rows(
            [[parse_rational(f"{rng.gauss(0, 1):.12g}") for _ in range(p)] for _ in range(n)]
        )
        if mode == "bp":
            report = check_uniqueness_bp(X, limit=limit)
        else:
            report = check_uniqueness(X, norm, limit=limit)
        outcomes.append(report.unique_for_all_y)
    return GenericityReport(n, p, mode, norm, trials, seed, tuple(outcomes))
