"""Checkers for the quantitative estimates on mixed-Tsirelson norms."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..ground import ScalarGround
from ..kernel import FinVec
from ..lpcompare import DEFAULT_MAX_BITS, lp_power_sum, min_exponent, mixed_tsirelson_exponent
from .averages import RIS
from .norm import CertNode, NormCert, cert_evaluate, mt_norm, norm_table
from .params import MTParams


@dataclass
class UpperPReport:
    norm: Fraction
    p: object
    holds: bool


def upper_exponent(params: MTParams, j: int | None = None):
    """p = min_{i <= j} 1/(1 - log_{n_i} m_i)."""
    j = len(params) if j is None else j
    ps = []
    for i in range(1, j + 1):
        m, n = params.m(i), params.n(i)
        if not m < n:
            raise ValueError(f"need m_{i} < n_{i}")
        ps.append(mixed_tsirelson_exponent(m, n))
    return min_exponent(ps)


def check_upper_p(x: FinVec, params: MTParams, j: int | None = None,
                  max_bits: int = DEFAULT_MAX_BITS) -> UpperPReport:
    """Certifies |x|_j <= ||x||_p."""
    if not isinstance(params.ground, ScalarGround):
        raise ValueError("the l_p upper estimate is for the scalar ground")
    j = len(params) if j is None else j
    p = upper_exponent(params, j)
    v, _ = mt_norm(x, params.truncate(j))
    return UpperPReport(v, p, lp_power_sum(x, p, max_bits).ge(v))


@dataclass
class SplitReport:
    max_sum: Fraction
    intervals: list  # the maximizing (lo, hi) pairs
    parts: int
    holds: bool


def check_interval_splits(x: FinVec, n: int, params: MTParams, bound: Fraction = Fraction(2)) -> SplitReport:
    """max over successive intervals E_1 < ... < E_n of sum ||E_i x||, against ``bound``.

    Every split of range(x) is covered: intervals only matter through the
    support runs they cut out, and empty intervals contribute zero, so the
    maximum over at most n nonempty runs equals the maximum over exactly n
    intervals.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table = norm_table(x, params)
    S = table.support
    L = len(S)
    if L == 0:
        return SplitReport(Fraction(0), [], n, True)
    # best[c][q]: best sum using runs inside positions c..L-1 with at most q runs
    best = [[(Fraction(0), ()) for _ in range(n + 1)] for _ in range(L + 1)]
    for c in range(L - 1, -1, -1):
        for q in range(1, n + 1):
            cand = best[c + 1][q]
            for e in range(c, L):
                v = table.values[(c, e)] + best[e + 1][q - 1][0]
                if v > cand[0]:
                    cand = (v, ((c, e),) + best[e + 1][q - 1][1])
            best[c][q] = cand
    total, runs = best[0][n]
    intervals = [(S[a], S[b]) for a, b in runs]
    return SplitReport(total, intervals, n, total <= bound)


@dataclass
class RISActionReport:
    value: Fraction
    r: int
    case: str
    bound: Fraction
    holds: bool
    status: str
    hypothesis_satisfiable: bool = True
    norm_check: dict = field(default_factory=dict)


def ris_case_bound(r: int, k: int, r1: int, params: MTParams) -> tuple[str, Fraction]:
    mk, mr = params.m(k), params.m(r)
    if r < k:
        return "r<k", Fraction(4, mk * mr)
    if r < r1:
        return "k<=r<r1", Fraction(2, mr)
    if r < 2:
        raise ValueError("third case needs m_(r-1)")
    return "r1<=r", Fraction(2, params.m(r - 1)) + Fraction(2, params.n(k))


def check_ris_action(ris: RIS, cert: NormCert) -> RISActionReport:
    """|phi(x)| on the n_k-RIS average against the bound selected by r versus k and r_1."""
    p = ris.params
    if ris.k is None:
        raise ValueError("the RIS must be an n_k-RIS")
    if not isinstance(cert, CertNode):
        raise ValueError("the functional needs a definite weight 1/m_r")
    k, r, r1 = ris.k, cert.family, ris.r[0]
    x = ris.average()
    value = abs(cert_evaluate(cert, x))
    case, bound = ris_case_bound(r, k, r1, p)
    holds = value <= bound
    satisfiable = any(k <= q < r1 for q in range(1, len(p) + 1))
    status = "holds" if holds else ("fails" if p.growth_ok else "assumption-not-met")
    rep = RISActionReport(value, r, case, bound, holds, status, satisfiable)
    if k % 2 == 0:
        v, _ = mt_norm(x, p)
        lo, hi = Fraction(1, 2 * p.m(k)), Fraction(4, p.m(k))
        ok = lo <= v <= hi
        rep.norm_check = {"norm": v, "lower": lo, "upper": hi, "holds": ok,
                          "status": "holds" if ok else ("fails" if p.growth_ok else "assumption-not-met")}
    return rep
