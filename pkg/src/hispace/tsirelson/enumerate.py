"""Explicit enumeration of the norming set K^s on a finite window (scalar ground).

Functionals are built bottom-up exactly as the closure rule reads: K^0 holds
the signed unit functionals and K^s adds theta_k * (f_1 + ... + f_d) for every
admissible successive run of elements of K^{s-1}.  Nonnegative functionals are
packed into one Python integer (a fixed-width field per coordinate, scaled by
a common denominator); successive functionals have disjoint supports, so the
sum of two packed functionals is integer addition.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from ..families import fam_start, fam_step
from ..ground import ScalarGround
from ..kernel import FinVec, Interval
from .params import MTParams


class BudgetExceeded(RuntimeError):
    def __init__(self, reached: int, budget: int):
        super().__init__(f"enumeration budget {budget} exceeded ({reached} functionals reached)")
        self.reached = reached
        self.budget = budget


@dataclass
class NormingTable:
    """Nonnegative functionals of a window as integer rows over a common denominator."""

    window: Interval
    denominator: int
    rows: np.ndarray  # shape (count, len(window)), dtype object or int64

    def __len__(self) -> int:
        return self.rows.shape[0]

    def functionals(self) -> list[FinVec]:
        lo = self.window.lo
        return [FinVec({lo + i: Fraction(int(v), self.denominator) for i, v in enumerate(row) if v})
                for row in self.rows]

    def sup(self, x: FinVec) -> Fraction:
        """max_f f(|x|); equals max over the signed set by sign symmetry."""
        return self.sup_many([x])[0]

    def sup_many(self, xs: list[FinVec]) -> list[Fraction]:
        if not len(self):
            return [Fraction(0) for _ in xs]
        lo, width = self.window.lo, len(self.window)
        dens = [lcm(1, *(abs(v).denominator for _, v in x.items())) for x in xs]
        L = lcm(1, *dens)
        cols = np.zeros((width, len(xs)), dtype=object)
        for j, x in enumerate(xs):
            for i, v in x.items():
                if i not in self.window:
                    raise ValueError(f"vector leaves the window at {i}")
                cols[i - lo, j] = int(abs(v) * L)
        rows = self.rows
        fast = rows.dtype != object and _fits_int64(rows, cols)
        if not fast:
            rows = rows.astype(object)
        best = []
        step = max(1, 2 ** 24 // max(1, rows.shape[0]))
        for start in range(0, len(xs), step):
            chunk = cols[:, start:start + step]
            prod = rows @ (chunk.astype(np.int64) if fast else chunk)
            best.extend(prod.max(axis=0))
        return [Fraction(int(b), self.denominator * L) for b in best]


def _fits_int64(rows: np.ndarray, cols: np.ndarray) -> bool:
    rmax = int(np.abs(rows).max()) if rows.size else 0
    cmax = max((abs(int(v)) for v in cols.flat), default=0)
    return rmax * cmax * rows.shape[1] < 2 ** 62


def _packing(params: MTParams, depth: int):
    q = lcm(*(t.denominator for t in params.thetas))
    D = q ** depth
    width = (D * max(t.numerator for t in params.thetas)).bit_length() + 1
    return D, width


def _enumerate_packed(params: MTParams, window: Interval, depth: int, budget: int,
                      maximal: bool) -> tuple[set, int, int]:
    if not isinstance(params.ground, ScalarGround):
        raise ValueError("enumeration supports the scalar ground only")
    if window.empty:
        return set(), 1, 1
    W = len(window)
    D, w = _packing(params, depth)
    mask = (1 << w) - 1

    def lohi(f):
        return ((f & -f).bit_length() - 1) // w, (f.bit_length() - 1) // w

    K = {D << (w * i) for i in range(W)}
    for _ in range(depth):
        bymin = [[] for _ in range(W)]
        for f in K:
            lo, hi = lohi(f)
            bymin[lo].append((f, hi))
        for bucket in bymin:
            bucket.sort()
        new = set(K)
        for fam, th in zip(params.families, params.thetas):
            p, q = th.numerator, th.denominator
            layer = {(f, hi, fam_start(fam, window.lo + lo))
                     for lo in range(W) for f, hi in bymin[lo]}
            while layer:
                nxt = set()
                for g, last, st in layer:
                    new.add(g * p // q)
                    if len(new) > budget:
                        raise BudgetExceeded(len(new), budget)
                    for lo in range(last + 1, W):
                        nst = fam_step(fam, st, window.lo + lo)
                        if nst is None:
                            continue
                        for f, hi in bymin[lo]:
                            nxt.add((g + f, hi, nst))
                    if len(nxt) > budget * 4:
                        raise BudgetExceeded(len(nxt), budget)
                layer = nxt
        K = _maximal(new, W, w, mask) if maximal else new
    return K, D, w


def _unpack(f: int, W: int, w: int, mask: int) -> list[int]:
    return [(f >> (w * i)) & mask for i in range(W)]


def _maximal(K: set, W: int, w: int, mask: int) -> set:
    """Keep, for each range, the coordinatewise-maximal functionals."""
    groups: dict = {}
    for f in K:
        key = (((f & -f).bit_length() - 1) // w, (f.bit_length() - 1) // w)
        groups.setdefault(key, []).append(f)
    out = set()
    for fs in groups.values():
        rows = [_unpack(f, W, w, mask) for f in fs]
        order = sorted(range(len(fs)), key=lambda i: (-sum(rows[i]), rows[i]))
        kept: list = []
        for i in order:
            r = rows[i]
            if any(all(a >= b for a, b in zip(k, r)) for k in kept):
                continue
            kept.append(r)
            out.add(fs[i])
    return out


def norming_table(params: MTParams, window: Interval, depth: int, budget: int = 2_000_000,
                  maximal: bool = False) -> NormingTable:
    """Nonnegative part of K^depth on ``window``.

    ``maximal=True`` keeps only coordinatewise-maximal functionals of each
    range after every closure step.  Those are still members of K^depth and
    give the same sup on every vector.
    """
    K, D, w = _enumerate_packed(params, window, depth, budget, maximal)
    W = len(window)
    mask = (1 << w) - 1
    rows = np.array(sorted(_unpack(f, W, w, mask) for f in K), dtype=object).reshape(len(K), W)
    if D.bit_length() < 62:
        rows = rows.astype(np.int64)
    return NormingTable(window, D, rows)


def enumerate_norming_set(params: MTParams, window: Interval, depth: int,
                          budget: int = 200_000, signs: str = "all",
                          maximal: bool = False) -> list[FinVec]:
    """Functionals of K^depth supported in ``window``, deduplicated and sorted.

    ``signs="nonnegative"`` returns the nonnegative cone only.  The budget caps
    the number of returned functionals; it is all-or-nothing.
    """
    if signs not in ("all", "nonnegative"):
        raise ValueError("signs must be 'all' or 'nonnegative'")
    table = norming_table(params, window, depth, budget, maximal)
    base = table.functionals()
    if signs == "nonnegative":
        return sorted(base, key=_order)
    total = sum(2 ** len(f) for f in base)
    if total > budget:
        raise BudgetExceeded(total, budget)
    out = []
    for f in base:
        items = f.items()
        for flips in itertools.product((1, -1), repeat=len(items)):
            out.append(FinVec({i: s * v for (i, v), s in zip(items, flips)}))
    return sorted(out, key=_order)


def _order(f: FinVec):
    return (len(f), [(i, v) for i, v in f.items()])
