"""Dense exact simplex over the rationals.

Two-phase tableau method with Bland's anticycling rule throughout, so every
solve is deterministic and terminates. Problem sizes here are desk scale
(tens of variables); no factorization or sparsity is attempted on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import Vector, vec

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LinearProgram:
    """minimize c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  bounds.

    lower[j] may be 0, a finite rational, or None (free). upper[j] may be a
    finite rational or None. Defaults: all variables free.
    """

    c: Vector
    a_eq: tuple[Vector, ...] = ()
    b_eq: Vector = ()
    a_ub: tuple[Vector, ...] = ()
    b_ub: Vector = ()
    lower: tuple[Fraction | None, ...] | None = None
    upper: tuple[Fraction | None, ...] | None = None

    def __post_init__(self):
        n = len(self.c)
        for rows, rhs, name in ((self.a_eq, self.b_eq, "eq"), (self.a_ub, self.b_ub, "ub")):
            if len(rows) != len(rhs):
                raise ValueError(f"a_{name} / b_{name} length mismatch")
            for r in rows:
                if len(r) != n:
                    raise ValueError(f"a_{name} row width != number of variables")
        for bnd in (self.lower, self.upper):
            if bnd is not None and len(bnd) != n:
                raise ValueError("bounds length mismatch")


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Vector | None = None
    value: Fraction | None = None


def nonneg_lp(c, a_eq=(), b_eq=(), a_ub=(), b_ub=()) -> LinearProgram:
    """All variables >= 0."""
    cc = vec(c)
    return LinearProgram(
        c=cc,
        a_eq=tuple(vec(r) for r in a_eq),
        b_eq=vec(b_eq) if b_eq else (),
        a_ub=tuple(vec(r) for r in a_ub),
        b_ub=vec(b_ub) if b_ub else (),
        lower=tuple(_ZERO for _ in cc),
    )


class _Tableau:
    """Simplex tableau for min c'x, Ax = b, x >= 0, with b >= 0 assumed."""

    def __init__(self, a: list[list[Fraction]], b: list[Fraction]):
        self.a = a
        self.b = b
        self.m = len(a)
        self.n = len(a[0]) if a else 0
        self.basis: list[int] = [-1] * self.m

    def add_artificials(self) -> list[int]:
        arts = []
        for i in range(self.m):
            col = self.n + len(arts)
            for k, row in enumerate(self.a):
                row.append(_ONE if k == i else _ZERO)
            self.basis[i] = col
            arts.append(col)
        self.n += len(arts)
        return arts

    def _reduced_costs(self, cost: list[Fraction]) -> tuple[list[Fraction], Fraction]:
        # r_j = c_j - c_B B^{-1} A_j; tableau rows are already B^{-1} A
        red = list(cost)
        obj = _ZERO
        for i in range(self.m):
            cb = cost[self.basis[i]]
            if cb:
                row = self.a[i]
                for j in range(self.n):
                    if row[j]:
                        red[j] -= cb * row[j]
                obj += cb * self.b[i]
        return red, obj

    def _pivot(self, r: int, c: int, red: list[Fraction]):
        row = self.a[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            self.a[r] = row = [x * inv for x in row]
            self.b[r] *= inv
        for i in range(self.m):
            if i == r:
                continue
            f = self.a[i][c]
            if f:
                ai = self.a[i]
                self.a[i] = [x - f * y for x, y in zip(ai, row)]
                self.b[i] -= f * self.b[r]
        f = red[c]
        if f:
            for j in range(self.n):
                if row[j]:
                    red[j] -= f * row[j]
        self.basis[r] = c

    def run(self, cost: list[Fraction], frozen: set[int] | None = None) -> str:
        """Bland-rule simplex on the current basis. frozen columns are never
        entered (used to keep artificials out during phase 2)."""
        red, _ = self._reduced_costs(cost)
        frozen = frozen or set()
        while True:
            enter = -1
            for j in range(self.n):
                if j not in frozen and red[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best = None
            for i in range(self.m):
                aic = self.a[i][enter]
                if aic > 0:
                    ratio = self.b[i] / aic
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            self._pivot(leave, enter, red)

    def solution(self) -> list[Fraction]:
        x = [_ZERO] * self.n
        for i, bi in enumerate(self.basis):
            x[bi] = self.b[i]
        return x


def _solve_standard(a, b, c) -> LPResult:
    """min c'x, Ax = b, x >= 0. a, b, c are lists of Fractions; rows of a are
    consumed."""
    m = len(a)
    n = len(c)
    for i in range(m):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]
    t = _Tableau(a, b)
    arts = t.add_artificials()
    phase1 = [_ZERO] * n + [_ONE] * len(arts)
    t.run(phase1)
    _, obj = t._reduced_costs(phase1)
    if obj != 0:
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis; drop rows that prove redundant
    art_set = set(arts)
    drop = []
    for i in range(t.m):
        if t.basis[i] in art_set:
            piv_col = -1
            for j in range(n):
                if t.a[i][j] != 0:
                    piv_col = j
                    break
            if piv_col < 0:
                drop.append(i)
            else:
                red = [_ZERO] * t.n
                t._pivot(i, piv_col, red)
    for i in reversed(drop):
        del t.a[i], t.b[i], t.basis[i]
        t.m -= 1
    cost2 = list(c) + [_ZERO] * len(arts)
    status = t.run(cost2, frozen=art_set)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = t.solution()[:n]
    value = sum((ci * xi for ci, xi in zip(c, x)), _ZERO)
    return LPResult(OPTIMAL, tuple(x), value)


@dataclass
class _Compiled:
    cols: list[tuple[int, int]] = field(default_factory=list)  # (plus_col, minus_col or -1)
    shifts: list[Fraction] = field(default_factory=list)


def _compile(lp: LinearProgram):
    n = len(lp.c)
    lower = lp.lower if lp.lower is not None else tuple(None for _ in range(n))
    upper = lp.upper if lp.upper is not None else tuple(None for _ in range(n))
    comp = _Compiled()
    ncols = 0
    for j in range(n):
        lo = lower[j]
        comp.shifts.append(lo if lo is not None else _ZERO)
        if lo is None:
            comp.cols.append((ncols, ncols + 1))
            ncols += 2
        else:
            comp.cols.append((ncols, -1))
            ncols += 1

    a_rows: list[list[Fraction]] = []
    b_vals: list[Fraction] = []
    row_kinds: list[str] = []  # "eq" or "ub"

    def expand(row: Sequence[Fraction], rhs: Fraction, kind: str):
        out = [_ZERO] * ncols
        shift = _ZERO
        for j, coef in enumerate(row):
            if not coef:
                continue
            pc, mc = comp.cols[j]
            out[pc] += coef
            if mc >= 0:
                out[mc] -= coef
            shift += coef * comp.shifts[j]
        a_rows.append(out)
        b_vals.append(rhs - shift)
        row_kinds.append(kind)

    for row, rhs in zip(lp.a_eq, lp.b_eq):
        expand(row, rhs, "eq")
    for row, rhs in zip(lp.a_ub, lp.b_ub):
        expand(row, rhs, "ub")
    for j in range(n):
        up = upper[j]
        if up is not None:
            unit = [_ZERO] * n
            unit[j] = _ONE
            expand(unit, up, "ub")

    # slack columns for ub rows
    n_slack = sum(1 for k in row_kinds if k == "ub")
    for i, kind in enumerate(row_kinds):
        if kind == "ub":
            for k, r in enumerate(a_rows):
                r.append(_ONE if k == i else _ZERO)
    ncols_total = ncols + n_slack

    cost = [_ZERO] * ncols_total
    const = _ZERO
    for j, cj in enumerate(lp.c):
        if not cj:
            continue
        pc, mc = comp.cols[j]
        cost[pc] += cj
        if mc >= 0:
            cost[mc] -= cj
        const += cj * comp.shifts[j]
    return a_rows, b_vals, cost, const, comp, ncols_total


def lp_solve(lp: LinearProgram) -> LPResult:
    """Exact optimum of a general-form LP. Deterministic: identical input
    produces the identical optimal vertex."""
    a_rows, b_vals, cost, const, comp, _ = _compile(lp)
    res = _solve_standard(a_rows, b_vals, cost)
    if res.status != OPTIMAL:
        return res
    x = []
    for (pc, mc), shift in zip(comp.cols, comp.shifts):
        v = res.x[pc] - (res.x[mc] if mc >= 0 else _ZERO) + shift
        x.append(v)
    value = res.value + const
    return LPResult(OPTIMAL, tuple(x), value)


def lp_feasible(lp: LinearProgram) -> Vector | None:
    """Phase-1 only: a feasible point, or None."""
    zero = LinearProgram(
        c=tuple(_ZERO for _ in lp.c),
        a_eq=lp.a_eq,
        b_eq=lp.b_eq,
        a_ub=lp.a_ub,
        b_ub=lp.b_ub,
        lower=lp.lower,
        upper=lp.upper,
    )
    res = lp_solve(zero)
    return res.x if res.status == OPTIMAL else None
