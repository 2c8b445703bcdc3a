"""Exact linear programming over the rationals.

A dense two-phase simplex with Bland's rule.  Every row carries an
artificial column that is kept (but barred from entering) in phase 2, so the
final tableau also yields B^{-1} and hence the dual solution.  The result can
be re-verified without trusting the solver: primal feasibility, dual
feasibility and equal objective values are all exact rational checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .kernel import as_fraction


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list = field(default_factory=list)
    value: Fraction | None = None
    dual_ub: list = field(default_factory=list)  # multipliers of the <= rows (all <= 0)
    dual_eq: list = field(default_factory=list)


def _frac_rows(rows) -> list[list[Fraction]]:
    return [[as_fraction(v) for v in r] for r in rows]


def linprog(c: Sequence, A_ub: Sequence = (), b_ub: Sequence = (),
            A_eq: Sequence = (), b_eq: Sequence = ()) -> LPResult:
    """Minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0."""
    c = [as_fraction(v) for v in c]
    nv = len(c)
    A_ub, A_eq = _frac_rows(A_ub), _frac_rows(A_eq)
    b_ub, b_eq = [as_fraction(v) for v in b_ub], [as_fraction(v) for v in b_eq]
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise ValueError("constraint rows and right-hand sides differ in length")
    if any(len(r) != nv for r in A_ub + A_eq):
        raise ValueError("constraint row length does not match the objective")
    n_ub = len(A_ub)
    m = n_ub + len(A_eq)
    # columns: x (nv) | slacks (n_ub) | artificials (m) | rhs
    ns = n_ub
    T: list[list[Fraction]] = []
    flip = []
    for i in range(m):
        if i < n_ub:
            row = A_ub[i] + [Fraction(1) if k == i else Fraction(0) for k in range(ns)]
            rhs = b_ub[i]
        else:
            row = A_eq[i - n_ub] + [Fraction(0)] * ns
            rhs = b_eq[i - n_ub]
        s = -1 if rhs < 0 else 1
        flip.append(s)
        row = [s * v for v in row] + [Fraction(1) if k == i else Fraction(0) for k in range(m)] + [s * rhs]
        T.append(row)
    basis = [nv + ns + i for i in range(m)]
    art0 = nv + ns

    def pivot(r: int, col: int) -> None:
        pr = T[r]
        pv = pr[col]
        if pv != 1:
            T[r] = pr = [v / pv for v in pr]
        for i in range(m):
            if i != r:
                f = T[i][col]
                if f:
                    Ti = T[i]
                    T[i] = [a - f * b for a, b in zip(Ti, pr)]
        basis[r] = col

    def run(cost: list[Fraction], allowed: int) -> str:
        while True:
            # reduced costs d_j = c_j - c_B B^{-1} A_j, Bland: smallest entering index
            cb = [cost[b] for b in basis]
            in_basis = set(basis)
            enter = None
            for j in range(allowed):
                if j in in_basis:
                    continue
                d = cost[j] - sum((cb[i] * T[i][j] for i in range(m) if T[i][j]), Fraction(0))
                if d < 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            best = None
            for i in range(m):
                a = T[i][enter]
                if a > 0:
                    ratio = T[i][-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], enter)

    # phase 1: minimize the sum of artificials
    cost1 = [Fraction(0)] * (nv + ns) + [Fraction(1)] * m
    run(cost1, nv + ns)
    if sum((T[i][-1] for i in range(m) if basis[i] >= art0), Fraction(0)) > 0:
        return LPResult("infeasible")
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= art0:
            for j in range(nv + ns):
                if T[i][j] != 0 and j not in basis:
                    pivot(i, j)
                    break
    # phase 2; a remaining basic artificial sits on a redundant row at level 0
    cost2 = c + [Fraction(0)] * (ns + m)
    status = run(cost2, nv + ns)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * nv
    for i, b in enumerate(basis):
        if b < nv:
            x[b] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    # y^T = c_B^T B^{-1}; B^{-1} sits in the artificial columns (up to the row flips)
    cb = [cost2[b] for b in basis]
    y = []
    for k in range(m):
        col = art0 + k
        yk = sum((cb[i] * T[i][col] for i in range(m) if T[i][col]), Fraction(0))
        y.append(yk * flip[k])
    return LPResult("optimal", x, value, y[:n_ub], y[n_ub:])


def certify(c, A_ub, b_ub, A_eq, b_eq, res: LPResult) -> list[str]:
    """Independent optimality check of an LPResult; empty list means certified."""
    bad = []
    if res.status != "optimal":
        return [f"status {res.status}"]
    c = [as_fraction(v) for v in c]
    x = res.x
    if any(v < 0 for v in x):
        bad.append("x has a negative entry")
    for r, b in zip(A_ub, b_ub):
        if sum((as_fraction(a) * v for a, v in zip(r, x)), Fraction(0)) > as_fraction(b):
            bad.append("primal <= row violated")
    for r, b in zip(A_eq, b_eq):
        if sum((as_fraction(a) * v for a, v in zip(r, x)), Fraction(0)) != as_fraction(b):
            bad.append("primal = row violated")
    if any(y > 0 for y in res.dual_ub):
        bad.append("dual multiplier of a <= row is positive")
    rows = list(A_ub) + list(A_eq)
    ys = list(res.dual_ub) + list(res.dual_eq)
    for j in range(len(c)):
        aty = sum((as_fraction(r[j]) * y for r, y in zip(rows, ys)), Fraction(0))
        if aty > c[j]:
            bad.append(f"dual constraint {j} violated")
            break
    dual_value = sum((as_fraction(b) * y for b, y in zip(list(b_ub) + list(b_eq), ys)), Fraction(0))
    if dual_value != res.value:
        bad.append("primal and dual objectives differ")
    return bad
