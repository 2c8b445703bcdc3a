"""Schreier families S_xi (xi < w*w), size families A_n, admissibility, repeated averages."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .kernel import FinVec, Interval


# -- ordinals below w*w ------------------------------------------------------

@dataclass(frozen=True, order=True)
class Ordinal:
    """The ordinal c*w + r."""

    c: int = 0
    r: int = 0

    def __post_init__(self):
        if self.c < 0 or self.r < 0:
            raise ValueError("ordinal coefficients must be natural numbers")

    @property
    def is_limit(self) -> bool:
        return self.r == 0 and self.c > 0

    @property
    def is_zero(self) -> bool:
        return self.c == 0 and self.r == 0

    def pred(self) -> "Ordinal":
        if self.r == 0:
            raise ValueError(f"{self} has no predecessor")
        return Ordinal(self.c, self.r - 1)

    def fundamental(self, n: int) -> "Ordinal":
        """n-th term (n >= 1) of the fixed fundamental sequence (c-1)*w + n."""
        if not self.is_limit:
            raise ValueError(f"{self} is not a limit")
        if n < 1:
            raise ValueError("fundamental sequence is indexed from 1")
        return Ordinal(self.c - 1, n)

    def __str__(self) -> str:
        if self.c == 0:
            return str(self.r)
        head = "w" if self.c == 1 else f"{self.c}w"
        return head if self.r == 0 else f"{head}+{self.r}"

    @classmethod
    def parse(cls, text) -> "Ordinal":
        if isinstance(text, Ordinal):
            return text
        if isinstance(text, int):
            return cls(0, text)
        s = str(text).replace(" ", "").replace("ω", "w")
        m = re.fullmatch(r"(?:(\d*)\*?w(?:\*(\d+))?)?(?:\+?(\d+))?", s)
        if not s or m is None:
            raise ValueError(f"cannot parse ordinal {text!r}")
        lead, trail, r = m.groups()
        if "w" not in s:
            return cls(0, int(r))
        if lead and trail:
            raise ValueError(f"cannot parse ordinal {text!r}")
        c = int(lead or trail or 1)
        return cls(c, int(r) if r else 0)


# -- family descriptors ------------------------------------------------------

@dataclass(frozen=True)
class SizeFamily:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("A_n needs n >= 1")

    def __str__(self) -> str:
        return f"A{self.n}"


@dataclass(frozen=True)
class Schreier:
    xi: Ordinal

    def __str__(self) -> str:
        return f"S{self.xi}" if self.xi.c == 0 else f"S[{self.xi}]"


Family = SizeFamily | Schreier


def parse_family(text) -> Family:
    """Parse "A3", "S2", "S[w]", "S[w+1]" (or a JSON dict with kind/n/xi)."""
    if isinstance(text, (SizeFamily, Schreier)):
        return text
    if isinstance(text, dict):
        kind = str(text.get("kind", "")).upper()
        if kind == "A":
            return SizeFamily(int(text["n"]))
        if kind == "S":
            return Schreier(Ordinal.parse(text.get("xi", 0)))
        raise ValueError(f"unknown family kind {text.get('kind')!r}")
    s = str(text).strip()
    if s[:1].upper() == "A" and s[1:].isdigit():
        return SizeFamily(int(s[1:]))
    if s[:1].upper() == "S":
        body = s[1:]
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        return Schreier(Ordinal.parse(body))
    raise ValueError(f"cannot parse family {text!r}")


def family_to_json(fam: Family) -> dict:
    if isinstance(fam, SizeFamily):
        return {"kind": "A", "n": fam.n}
    return {"kind": "S", "xi": str(fam.xi)}


# -- membership: recursive definition ----------------------------------------

@lru_cache(maxsize=None)
def _schreier_member(F: tuple, xi: Ordinal) -> bool:
    if not F:
        return True
    if xi.is_zero:
        return len(F) == 1
    if xi.is_limit:
        return any(_schreier_member(F, xi.fundamental(n)) for n in range(1, F[0] + 1))
    return _min_pieces(F, xi.pred()) <= F[0]


@lru_cache(maxsize=None)
def _min_pieces(F: tuple, zeta: Ordinal) -> int:
    """Fewest consecutive pieces of F, each in S_zeta."""
    if not F:
        return 0
    best = len(F) + 1
    for cut in range(1, len(F) + 1):
        if _schreier_member(F[:cut], zeta):
            best = min(best, 1 + _min_pieces(F[cut:], zeta))
    return best


def family_member(F: Iterable[int], fam: Family) -> bool:
    fam = parse_family(fam)
    G = tuple(sorted(set(F)))
    if any(not isinstance(k, int) or k < 1 for k in G):
        raise ValueError("families live on positive integers")
    if isinstance(fam, SizeFamily):
        return len(G) <= fam.n
    return _schreier_member(G, fam.xi)


# -- membership: incremental automaton --------------------------------------
#
# Reads an increasing sequence m_1 < m_2 < ... one element at a time. A state
# is a hashable value; None means the set read so far left the family. The
# norm DP and the enumerator use this instead of re-testing whole sets.

def fam_start(fam: Family, m: int):
    if isinstance(fam, SizeFamily):
        return 1
    return _s_start(fam.xi, m)


def fam_step(fam: Family, state, m: int):
    if isinstance(fam, SizeFamily):
        return state + 1 if state < fam.n else None
    return _s_step(fam.xi, state, m)


def _s_start(xi: Ordinal, m: int):
    if xi.is_zero:
        return ("0",)
    if xi.is_limit:
        inner = xi.fundamental(m)
        return ("lim", inner, _s_start(inner, m))
    # greedy: pieces are taken as long as possible, which is optimal for
    # hereditary families
    return ("succ", m, 1, _s_start(xi.pred(), m))


def _s_step(xi: Ordinal, state, m: int):
    tag = state[0]
    if tag == "0":
        return None
    if tag == "lim":
        inner = state[1]
        nxt = _s_step(inner, state[2], m)
        return None if nxt is None else ("lim", inner, nxt)
    _, cap, used, inner_state = state
    zeta = xi.pred()
    nxt = _s_step(zeta, inner_state, m)
    if nxt is not None:
        return ("succ", cap, used, nxt)
    if used + 1 > cap:
        return None
    return ("succ", cap, used + 1, _s_start(zeta, m))


def automaton_member(F: Iterable[int], fam: Family) -> bool:
    fam = parse_family(fam)
    G = sorted(set(F))
    if not G:
        return True
    state = fam_start(fam, G[0])
    for m in G[1:]:
        state = fam_step(fam, state, m)
        if state is None:
            return False
    return True


# -- admissibility ------------------------------------------------------------

@dataclass(frozen=True)
class Admissibility:
    ok: bool
    witness: tuple = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _as_set(E) -> list:
    if isinstance(E, Interval):
        return list(E)
    if isinstance(E, FinVec):
        return E.support()
    return sorted(set(E))


def admissible(sets: Sequence, fam: Family) -> Admissibility:
    fam = parse_family(fam)
    parts = [_as_set(E) for E in sets]
    parts = [p for p in parts if p]
    for i in range(len(parts) - 1):
        if parts[i][-1] >= parts[i + 1][0]:
            return Admissibility(False, reason=f"sets {i} and {i + 1} are not successive")
    witness = tuple(p[0] for p in parts)
    if family_member(witness, fam):
        return Admissibility(True, witness)
    return Admissibility(False, witness, f"{set(witness) or '{}'} is not in {fam}")


# -- repeated averages ----------------------------------------------------------

class MTooShort(ValueError):
    """M ran out; ``needed`` is the length the recursion asked for."""

    def __init__(self, needed: int, have: int):
        super().__init__(f"M too short: need at least {needed} elements, have {have}")
        self.needed = needed
        self.have = have


class AverageTooLarge(ValueError):
    """The explicit average would exceed the coordinate budget."""

    def __init__(self, xi: Ordinal, budget: int):
        super().__init__(f"repeated average of order {xi} exceeds {budget} coordinates")
        self.xi = xi
        self.budget = budget


CONVENTIONS = ("first", "literal")


@dataclass
class _RACtx:
    M: Sequence[int]
    convention: str
    budget: int
    produced: int = 0

    def at(self, pos: int) -> int:
        if pos >= len(self.M):
            raise MTooShort(pos + 1, len(self.M))
        return self.M[pos]


def _first_average(xi: Ordinal, start: int, ctx: _RACtx) -> tuple[dict, int]:
    """xi_1 of M[start:]; returns (weights by position, next free position)."""
    if xi.is_zero:
        ctx.at(start)
        ctx.produced += 1
        if ctx.produced > ctx.budget:
            raise AverageTooLarge(xi, ctx.budget)
        return {start: Fraction(1)}, start + 1
    if xi.is_limit:
        return _first_average(xi.fundamental(ctx.at(start)), start, ctx)
    zeta = xi.pred()
    if ctx.convention == "first":
        k = ctx.at(start)
    else:
        k = ctx.at(start + ctx.at(start) - 1)
    out: dict = {}
    pos = start
    for _ in range(k):
        w, pos = _first_average(zeta, pos, ctx)
        for p, v in w.items():
            out[p] = v / k
    return out, pos


@dataclass(frozen=True)
class RAvg:
    vector: FinVec
    xi: Ordinal
    M: tuple
    n: int
    convention: str = "first"


def repeated_averages(xi, M: Sequence[int], n: int, convention: str = "first",
                      budget: int = 200_000) -> list[RAvg]:
    """xi_1^M, ..., xi_n^M."""
    xi = Ordinal.parse(xi)
    M = tuple(M)
    if any(b <= a for a, b in zip(M, M[1:])) or (M and M[0] < 1):
        raise ValueError("M must be a strictly increasing list of positive integers")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = _RACtx(M, convention, budget)
    out, pos = [], 0
    for k in range(1, n + 1):
        w, pos = _first_average(xi, pos, ctx)
        vec = FinVec({M[p]: v for p, v in w.items()})
        out.append(RAvg(vec, xi, M, k, convention))
    return out


def repeated_average(xi, M: Sequence[int], n: int, convention: str = "first",
                     budget: int = 200_000) -> RAvg:
    return repeated_averages(xi, M, n, convention, budget)[-1]


def ra_violations(avgs: Sequence[RAvg]) -> list[str]:
    """Properties 1-3 on a computed prefix xi_1^M..xi_k^M; empty list means all hold."""
    bad = []
    if not avgs:
        return bad
    xi, M = avgs[0].xi, avgs[0].M
    fam = Schreier(xi)
    used = []
    for a in avgs:
        v = a.vector
        if any(c < 0 for _, c in v.items()) or sum((c for _, c in v.items()), Fraction(0)) != 1:
            bad.append(f"n={a.n}: not in the positive l1 sphere")
        if not xi.is_zero and v.linf() > Fraction(1, M[0]):
            bad.append(f"n={a.n}: coordinate exceeds 1/min M")
        # the automaton is linear in |supp|; the recursive definition is quadratic and deep
        if not automaton_member(v.support(), fam):
            bad.append(f"n={a.n}: support not in {fam}")
        if used and not used[-1][-1] < v.support()[0]:
            bad.append(f"n={a.n}: support not after previous")
        used.append(v.support())
    flat = [i for s in used for i in s]
    if flat != list(M[: len(flat)]):
        bad.append("supports do not exhaust a prefix of M")
    return bad


def stability_reindex(xi, M: Sequence[int], nks: Sequence[int], convention: str = "first",
                      budget: int = 200_000) -> bool:
    """Checks xi_k^{M'} == xi_{n_k}^M with M' the union of the selected supports."""
    nks = list(nks)
    if any(b <= a for a, b in zip(nks, nks[1:])) or not nks or nks[0] < 1:
        raise ValueError("(n_k) must be strictly increasing and start at >= 1")
    full = repeated_averages(xi, M, nks[-1], convention, budget)
    picked = [full[k - 1].vector for k in nks]
    Mp = sorted(i for v in picked for i in v.support())
    try:
        re_avgs = repeated_averages(xi, Mp, len(nks), convention, budget)
    except MTooShort:
        return False
    return all(a.vector == b for a, b in zip(re_avgs, picked))
