"""Seminormalized n_j-averages by iterated averaging, and rapidly increasing sequences."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..kernel import FinVec
from .norm import norm_value
from .params import MTParams

HALF = Fraction(1, 2)


class InsufficientBlocks(ValueError):
    def __init__(self, needed: int, have: int):
        super().__init__(f"need at least {needed} blocks, have {have}")
        self.needed = needed
        self.have = have


class IterationBoundExceeded(RuntimeError):
    def __init__(self, bound: int, flags: dict):
        failed = [k for k, v in flags.items() if not v]
        super().__init__(f"no seminormalized average within {bound} levels; "
                         f"growth conditions not met: {failed or 'none'}")
        self.bound = bound
        self.flags = flags


class ParamsTooShort(ValueError):
    def __init__(self, needed: int, have: int, reason: str):
        super().__init__(f"need family index {needed} ({reason}); params have {have}")
        self.needed = needed
        self.have = have


def _check_successive(blocks: Sequence[FinVec]) -> None:
    prev = None
    for b in blocks:
        if not b:
            raise ValueError("zero block")
        r = b.range()
        if prev is not None and not prev.hi < r.lo:
            raise ValueError("blocks are not successive")
        prev = r


def iteration_bound(j: int, params: MTParams) -> int | None:
    """Levels the averaging loop may use: s_j - 1 (j odd) or s_j s_{j+1} - 1 (j even)."""
    sch = params.scheme
    if sch is None:
        return None
    s = sch.exponents()
    if s is None:
        return None
    if j % 2 == 1:
        return s[j - 1] - 1 if j - 1 < len(s) else None
    if j < len(s):
        return s[j - 1] * s[j] - 1
    return None


@dataclass
class AverageResult:
    vector: FinVec
    j: int
    level: int
    components: list  # the n_j normalized vectors averaged
    norm: Fraction
    used: int  # number of input blocks consumed
    bound: int | None
    tried: int = 0  # candidates examined before success

    @property
    def seminormalized(self) -> bool:
        return self.norm >= HALF


def build_average(blocks: Sequence[FinVec], j: int, params: MTParams,
                  bound: int | None = -1) -> AverageResult:
    """Iterated averaging: average n_j consecutive normalized vectors, renormalize, repeat.

    ``bound=-1`` takes the iteration bound from the parameters; ``None``
    disables it.
    """
    n = params.n(j)
    if bound == -1:
        bound = iteration_bound(j, params)
    blocks = list(blocks)
    _check_successive(blocks)
    if len(blocks) < n:
        raise InsufficientBlocks(n, len(blocks))
    level = []
    for b in blocks:
        level.append(b / norm_value(b, params))
    t = 0
    tried = 0
    while True:
        t += 1
        if bound is not None and t > bound:
            raise IterationBoundExceeded(bound, params.growth_flags)
        count = len(level) // n
        if count == 0:
            raise InsufficientBlocks(n ** t, len(blocks))
        nxt = []
        for k in range(count):
            parts = level[k * n:(k + 1) * n]
            x = sum(parts[1:], parts[0]) / n
            v = norm_value(x, params)
            tried += 1
            if v >= HALF:
                return AverageResult(x, j, t, parts, v, (k + 1) * n ** t, bound, tried)
            nxt.append(x / v)
        level = nxt


@dataclass
class RIS:
    vectors: list
    r: list  # family indices r_j
    params: MTParams
    k: int | None = None  # n_k-RIS when given
    norms: list = field(default_factory=list)

    def average(self) -> FinVec:
        n = len(self.vectors)
        return sum(self.vectors[1:], self.vectors[0]) / n

    def violations(self) -> list[str]:
        bad = []
        p = self.params
        for i, x in enumerate(self.vectors):
            v = self.norms[i] if i < len(self.norms) else norm_value(x, p)
            if v < HALF:
                bad.append(f"x_{i + 1} not seminormalized")
        for a, b in zip(self.vectors, self.vectors[1:]):
            if not a.range().hi < b.range().lo:
                bad.append("vectors not successive")
        if any(b <= a for a, b in zip(self.r, self.r[1:])):
            bad.append("r_j not strictly increasing")
        if self.k is not None:
            if self.r and self.r[0] <= self.k:
                bad.append("r_1 <= k")
            if len(self.vectors) != p.n(self.k):
                bad.append(f"length {len(self.vectors)} != n_k = {p.n(self.k)}")
        for i in range(len(self.vectors) - 1):
            r = self.r[i + 1]
            if r < 2:
                bad.append(f"condition (ii) needs m_{r - 1}")
                continue
            if self.vectors[i].l1() > Fraction(p.m(r), p.m(r - 1)):
                bad.append(f"||x_{i + 1}||_1 > m_{r}/m_{r - 1}")
        return bad


def build_ris(blocks: Sequence[FinVec], k: int | None, params: MTParams,
              length: int | None = None, r_start: int | None = None,
              bound: int | None = -1) -> RIS:
    """Greedy RIS: r_1 = max(k+1, r_start), then each r_{j+1} is the least index with
    ||x_j||_1 <= m_{r_{j+1}} / m_{r_{j+1}-1}.  ``bound`` is passed to build_average."""
    if length is None:
        if k is None:
            raise ValueError("give k or an explicit length")
        length = params.n(k)
    J = len(params)
    r = max((k or 0) + 1, r_start or 1)
    blocks = list(blocks)
    pos = 0
    vecs, rs, norms = [], [], []
    for step in range(length):
        if r > J:
            raise ParamsTooShort(r, J, "r_j beyond the parameter list")
        res = build_average(blocks[pos:], r, params, bound)
        vecs.append(res.vector)
        rs.append(r)
        norms.append(res.norm)
        pos += res.used
        if step == length - 1:
            break
        l1 = res.vector.l1()
        nxt = r + 1
        while nxt <= J and l1 > Fraction(params.m(nxt), params.m(nxt - 1)):
            nxt += 1
        if nxt > J:
            raise ParamsTooShort(J + 1, J, f"need m_r/m_(r-1) >= {l1} for some r > {r}")
        r = nxt
    return RIS(vecs, rs, params, k, norms)
