"""Solvers: proximal operators, a FISTA route for penalized least squares,
an exact LP route for basis pursuit, and exact norm minimization over the
fiber {b : Xb = X target}.

The float route never decides anything: it produces a candidate point plus a
KKT certificate, and only the certificate (exact on rational inputs, with an
explicit tolerance on float ones) is trusted downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import RationalMatrix, Vector, dot, vec
from .lp import OPTIMAL, LinearProgram, lp_feasible, lp_solve, nonneg_lp
from .norms import L1, SUP, PolytopeNorm, dual_norm_value, norm_value


def prox_l1(v: Sequence, threshold) -> tuple:
    """Soft thresholding, componentwise; exact on Fractions."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    out = []
    for x in v:
        if x > threshold:
            out.append(x - threshold)
        elif x < -threshold:
            out.append(x + threshold)
        else:
            out.append(0 * x)
    return tuple(out)


def prox_slope(v: Sequence, w: Sequence) -> tuple:
    """Prox of the sorted-l1 penalty with weight vector w (nonincreasing,
    nonnegative): sort magnitudes, subtract weights, project onto the
    nonincreasing nonnegative cone by stack-based pool-adjacent-violators,
    then restore signs and positions. Exact on Fractions."""
    if len(w) != len(v):
        raise ValueError("dimension mismatch")
    if any(a < b for a, b in zip(w, w[1:])) or (len(w) and w[len(w) - 1] < 0):
        raise ValueError("weights must be nonincreasing and nonnegative")
    p = len(v)
    order = sorted(range(p), key=lambda j: (-abs(v[j]), j))
    d = [abs(v[order[i]]) - w[i] for i in range(p)]
    sums: list = []
    counts: list[int] = []
    for x in d:
        s, c = x, 1
        while sums and sums[-1] * c <= s * counts[-1]:
            s += sums.pop()
            c += counts.pop()
        sums.append(s)
        counts.append(c)
    mags = []
    for s, c in zip(sums, counts):
        avg = s / c
        if avg < 0:
            avg = 0 * avg
        mags.extend([avg] * c)
    out = [None] * p
    for i, j in enumerate(order):
        x = v[j]
        sign = 1 if x > 0 else (-1 if x < 0 else 0)
        out[j] = sign * mags[i] if sign else 0 * mags[i]
    return tuple(out)


@dataclass(frozen=True)
class Certificate:
    """Optimality evidence for min 0.5||y - Xb||^2 + ||b||: the dual vector
    s = X'(y - Xb) must sit in the dual ball and pair exactly with b."""

    dual_vector: tuple
    dual_norm: object
    pairing_gap: object
    tol: object
    passed: bool


def kkt_certify(X, y: Sequence, b: Sequence, norm: PolytopeNorm, tol=0) -> Certificate:
    """Exact when X, y, b are rational and tol = 0; float otherwise."""
    if isinstance(X, RationalMatrix) and tol == 0:
        yy, bb = vec(y), vec(b)
        residual = tuple(a - c for a, c in zip(yy, X.matvec(bb)))
        s = X.rmatvec(residual)
        dn = dual_norm_value(norm, s)
        gap = abs(dot(bb, s) - norm_value(norm, bb))
        return Certificate(s, dn, gap, 0, dn <= 1 and gap == 0)
    Xf = X.to_float_array() if isinstance(X, RationalMatrix) else np.asarray(X, dtype=float)
    yf = np.asarray([float(t) for t in y])
    bf = np.asarray([float(t) for t in b])
    s = Xf.T @ (yf - Xf @ bf)
    dn = float(dual_norm_value(norm, [float(t) for t in s]))
    gap = abs(float(np.dot(bf, s)) - float(norm_value(norm, [float(t) for t in bf])))
    return Certificate(tuple(float(t) for t in s), dn, gap, tol, dn <= 1 + tol and gap <= tol)


@dataclass(frozen=True)
class Solution:
    point: tuple
    objective: object
    route: str
    certificate: Certificate | None = None
    iterations: int = 0
    converged: bool = True


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 100_000
    tol: float = 1e-9
    check_every: int = 25
    restart: bool = True
    x0: tuple | None = None


def _prox_for(norm: PolytopeNorm, step: float):
    if norm.kind == L1:
        lam = float(norm.scale)

        def prox(v):
            t = lam * step
            return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)

        return prox
    if norm.kind == SUP:
        w = [step] + [0.0] * (norm.dim - 1)
    else:
        w = [float(x) * step for x in norm.weights]

    def prox(v):
        return np.asarray(prox_slope([float(t) for t in v], w), dtype=float)

    return prox


def _lipschitz(Xf: np.ndarray) -> float:
    """Largest eigenvalue of X'X by power iteration (deterministic start)."""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(Xf.shape[1])
    v /= np.linalg.norm(v) or 1.0
    lam = 0.0
    for _ in range(1000):
        u = Xf.T @ (Xf @ v)
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        new_lam = float(v @ u)
        v = u / nu
        if abs(new_lam - lam) <= 1e-15 * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
    return lam


def solve_penalized(
    X, y: Sequence, norm: PolytopeNorm, options: SolverOptions = SolverOptions()
) -> Solution:
    """FISTA with adaptive restart; stops when the KKT certificate passes at
    options.tol. The returned flag `converged` reports certification, not
    iteration exhaustion."""
    Xf = X.to_float_array() if isinstance(X, RationalMatrix) else np.asarray(X, dtype=float)
    yf = np.asarray([float(t) for t in y])
    n, p = Xf.shape
    if norm.dim != p:
        raise ValueError("norm dimension does not match the matrix")
    L = _lipschitz(Xf) * (1 + 1e-6)
    step = 1.0 / L if L > 0 else 1.0
    prox = _prox_for(norm, step)

    def objective(b):
        r = yf - Xf @ b
        return 0.5 * float(r @ r) + float(norm_value(norm, [float(t) for t in b]))

    x = np.zeros(p) if options.x0 is None else np.asarray([float(t) for t in options.x0])
    z = x.copy()
    t_mom = 1.0
    f_prev = objective(x)
    it = 0
    while it < options.max_iter:
        it += 1
        grad = Xf.T @ (Xf @ z - yf)
        cand = prox(z - step * grad)
        f_cand = objective(cand)
        if options.restart and f_cand > f_prev:
            # overshoot: kill the momentum and take the plain descent step
            # from the last accepted iterate, which cannot increase the
            # objective, so accepted objectives stay nonincreasing
            grad = Xf.T @ (Xf @ x - yf)
            cand = prox(x - step * grad)
            f_cand = objective(cand)
            t_mom = 1.0
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_mom * t_mom))
        z = cand + ((t_mom - 1.0) / t_new) * (cand - x)
        x, t_mom = cand, t_new
        f_prev = f_cand
        if it % options.check_every == 0:
            cert = kkt_certify(Xf, yf, x, norm, tol=options.tol)
            if cert.passed:
                return Solution(tuple(float(v) for v in x), objective(x), "fista", cert, it, True)
    cert = kkt_certify(Xf, yf, x, norm, tol=options.tol)
    return Solution(tuple(float(v) for v in x), objective(x), "fista", cert, it, cert.passed)


# ---------------------------------------------------------------------------
# exact LP routes


def solve_bp(X: RationalMatrix, y: Sequence) -> Solution:
    """Exact basis pursuit: min ||b||_1 s.t. Xb = y, solved as an LP over the
    positive/negative parts. Deterministic vertex, certified before return."""
    yy = vec(y)
    if len(yy) != X.nrows:
        raise ValueError("dimension mismatch")
    p = X.ncols
    res = lp_solve(
        nonneg_lp(
            c=[1] * (2 * p),
            a_eq=[tuple(r) + tuple(-x for x in r) for r in X.rows],
            b_eq=yy,
        )
    )
    if res.status != OPTIMAL:
        raise ValueError("response is outside the column space of the matrix")
    b = tuple(res.x[j] - res.x[p + j] for j in range(p))
    z = bp_dual_certificate(X, b)
    if z is None:
        raise AssertionError("LP optimum failed the basis pursuit certificate")
    s = X.rmatvec(z)
    gap = abs(dot(b, s) - sum(abs(v) for v in b))
    cert = Certificate(s, max(abs(v) for v in s), gap, 0, True)
    return Solution(b, res.value, "lp", cert)


def bp_dual_certificate(X: RationalMatrix, b: Sequence) -> Vector | None:
    """z with ||X'z||_inf <= 1 and X_j'z = sign(b_j) on the support of b;
    exists iff b solves basis pursuit for y = Xb."""
    bb = vec(b)
    p = X.ncols
    n = X.nrows
    a_eq = []
    b_eq = []
    a_ub = []
    b_ub = []
    for j in range(p):
        col = X.column(j)
        if bb[j] != 0:
            a_eq.append(col)
            b_eq.append(Fraction(1 if bb[j] > 0 else -1))
        else:
            a_ub.append(col)
            b_ub.append(Fraction(1))
            a_ub.append(tuple(-x for x in col))
            b_ub.append(Fraction(1))
    lp = LinearProgram(
        c=tuple(Fraction(0) for _ in range(n)),
        a_eq=tuple(a_eq),
        b_eq=tuple(b_eq),
        a_ub=tuple(a_ub),
        b_ub=tuple(b_ub),
    )
    return lp_feasible(lp)


def bp_certificate_holds(X: RationalMatrix, b: Sequence, z: Sequence, tol=0) -> bool:
    bb, zz = vec(b), vec(z)
    s = X.rmatvec(zz)
    if any(abs(v) > 1 + tol for v in s):
        return False
    return all(abs(s[j] - (1 if bb[j] > 0 else -1)) <= tol for j in range(len(bb)) if bb[j] != 0)


def norm_min_subject_to(X: RationalMatrix, target: Sequence, norm: PolytopeNorm):
    """Exact (value, minimizer) of min ||b|| s.t. Xb = X target.

    l1 goes through positive/negative parts, sup through a single bound
    variable, and the sorted-l1 norm through the partial-sum (CVaR)
    linearization: ||b||_w = sum_k (w_k - w_{k+1}) S_k(|b|) with each S_k
    expressed as min over a threshold theta_k and overshoots r_ik.
    """
    tt = vec(target)
    p = X.ncols
    if len(tt) != p or norm.dim != p:
        raise ValueError("dimension mismatch")
    rhs = X.matvec(tt)
    if norm.kind == L1:
        res = lp_solve(
            nonneg_lp(
                c=[1] * (2 * p),
                a_eq=[tuple(r) + tuple(-x for x in r) for r in X.rows],
                b_eq=rhs,
            )
        )
        assert res.status == OPTIMAL
        b = tuple(res.x[j] - res.x[p + j] for j in range(p))
        return norm.scale * res.value, b
    if norm.kind == SUP:
        # vars: b (free) then s >= 0; minimize s with -s <= b_j <= s
        zero = Fraction(0)
        one = Fraction(1)
        c = tuple([zero] * p + [one])
        a_eq = tuple(tuple(r) + (zero,) for r in X.rows)
        a_ub = []
        for j in range(p):
            row = [zero] * (p + 1)
            row[j] = one
            row[p] = -one
            a_ub.append(tuple(row))
            row = [zero] * (p + 1)
            row[j] = -one
            row[p] = -one
            a_ub.append(tuple(row))
        lp = LinearProgram(
            c=c,
            a_eq=a_eq,
            b_eq=rhs,
            a_ub=tuple(a_ub),
            b_ub=tuple(Fraction(0) for _ in a_ub),
            lower=tuple([None] * p + [zero]),
        )
        res = lp_solve(lp)
        assert res.status == OPTIMAL
        return res.value, tuple(res.x[:p])
    w = list(norm.weights)
    diffs = [w[k] - (w[k + 1] if k + 1 < p else Fraction(0)) for k in range(p)]
    zero = Fraction(0)
    one = Fraction(1)
    # variable layout: b (p, free) | u (p, >=0) | theta (p, free) | r (p*p, >=0)
    nvars = 3 * p + p * p

    def r_index(i, k):
        return 3 * p + i * p + k

    c = [zero] * nvars
    for k in range(p):
        c[2 * p + k] = diffs[k] * (k + 1)
        for i in range(p):
            c[r_index(i, k)] = diffs[k]
    a_eq = [tuple(r) + tuple([zero] * (nvars - p)) for r in X.rows]
    a_ub = []
    b_ub = []
    for i in range(p):
        row = [zero] * nvars
        row[i] = one
        row[p + i] = -one
        a_ub.append(tuple(row))  # b_i - u_i <= 0
        row = [zero] * nvars
        row[i] = -one
        row[p + i] = -one
        a_ub.append(tuple(row))  # -b_i - u_i <= 0
        b_ub.extend([zero, zero])
    for i in range(p):
        for k in range(p):
            row = [zero] * nvars
            row[p + i] = one
            row[2 * p + k] = -one
            row[r_index(i, k)] = -one
            a_ub.append(tuple(row))  # u_i - theta_k - r_ik <= 0
            b_ub.append(zero)
    lower: list = [None] * p + [zero] * p + [None] * p + [zero] * (p * p)
    lp = LinearProgram(
        c=tuple(c),
        a_eq=tuple(a_eq),
        b_eq=rhs,
        a_ub=tuple(a_ub),
        b_ub=tuple(b_ub),
        lower=tuple(lower),
    )
    res = lp_solve(lp)
    assert res.status == OPTIMAL
    return res.value, tuple(res.x[:p])
