"""d-products under an external mixed-Tsirelson norm, diagonal vectors, sigma-coding and
dependent sequences.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .families import SizeFamily
from .ground import CallableGround
from .kernel import FinVec, as_fraction, fraction_to_json, vec_to_json
from .treespace import TreeParams, gauge, w_gauge
from .tsirelson.averages import build_ris
from .tsirelson.norm import CertLeaf, CertNode, NormCert, cert_evaluate, mt_norm
from .tsirelson.params import MTParams


# -- d-product vectors -----------------------------------------------------------------

@dataclass(frozen=True)
class DProductVec:
    """Finitely many blocks; block n lives in the ground space of coordinate n."""

    blocks: dict
    params: MTParams

    def __post_init__(self):
        object.__setattr__(self, "blocks", {int(n): b for n, b in self.blocks.items() if b})
        if any(n < 1 for n in self.blocks):
            raise ValueError("block coordinates start at 1")

    def restrict(self, lo: int, hi: int) -> "DProductVec":
        return DProductVec({n: b for n, b in self.blocks.items() if lo <= n <= hi}, self.params)


def dproduct_norm(x: DProductVec) -> tuple[Fraction, NormCert | None]:
    """mt_norm with ground leaves: each block enters through its ground norm and norming functional."""
    return mt_norm(x, x.params)


def gauge_ground(gens: Sequence[FinVec], a: Callable[[int], Fraction], tree: TreeParams) -> CallableGround:
    """Ground whose n-th norm is the gauge of 2^n W + a_n B; the LP dual is the leaf functional."""
    cache: dict = {}
    lock = threading.Lock()

    def fn(n: int, block: FinVec):
        key = (n, block)
        with lock:
            hit = cache.get(key)
        if hit is None:
            g = gauge(block, gens, n, a(n), tree)
            hit = (g.value, g.functional)
            with lock:
                cache[key] = hit
        return hit

    return CallableGround(fn, "gauge")


def _a_sequence(a) -> Callable[[int], Fraction]:
    if callable(a):
        return lambda n: as_fraction(a(n))
    seq = [as_fraction(v) for v in a]
    return lambda n: seq[n - 1]


@dataclass
class DiagonalBounds:
    lower: Fraction
    upper: Fraction
    tail: Fraction
    rho_W: Fraction
    N: int
    cert: NormCert | None
    per_coordinate: list


def diagonal_norm_bounds(x: FinVec, gens: Sequence[FinVec], a, outer: MTParams, tree: TreeParams,
                         N: int) -> DiagonalBounds:
    """Bracket ||(x, x, ...)|| in the d-product with ||.||_n = gauge of 2^n W + a_n B.

    lower: the N-truncation (truncations have norm <= 1).  upper: lower plus
    sum_{n > N} ||x||_n <= 2^{-N} rho_W(x), since x lies in rho_W(x) W and
    therefore in 2^{-n} rho_W(x) (2^n W + a_n B).
    """
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    af = _a_sequence(a)
    if not x:
        return DiagonalBounds(Fraction(0), Fraction(0), Fraction(0), Fraction(0), N, None, [])
    rho = w_gauge(x, gens)
    if rho is None:
        raise ValueError("x is outside the span of the generators; the tail gauges are not summable")
    params = replace(outer, ground=gauge_ground(gens, af, tree))
    v = DProductVec({n: x for n in range(1, N + 1)}, params)
    lower, cert = dproduct_norm(v)
    per = [params.ground.norm(n, x)[0] for n in range(1, N + 1)]
    tail = rho / 2 ** N
    return DiagonalBounds(lower, lower + tail, tail, rho, N, cert, per)


def athin_probe(sample: Sequence[FinVec], gens: Sequence[FinVec], a, tree: TreeParams,
                n_max: int) -> list[dict]:
    """Gauge values ||y||_n for n <= n_max; trends only, no thinness verdict."""
    af = _a_sequence(a)
    rows = []
    for y in sample:
        vals = [gauge(y, gens, n, af(n), tree).value for n in range(1, n_max + 1)]
        diffs = [b - c for b, c in zip(vals[1:], vals)]
        trend = ("increasing" if all(d > 0 for d in diffs) else
                 "decreasing" if all(d < 0 for d in diffs) else
                 "constant" if all(d == 0 for d in diffs) else "mixed")
        rows.append({"vector": y, "values": vals, "trend": trend})
    return rows


# -- sigma coding -----------------------------------------------------------------------

def functional_key(f) -> str:
    """Canonical serialization of a functional (certificate tree or FinVec)."""
    if isinstance(f, (CertLeaf, CertNode)):
        return json.dumps(f.to_json(), sort_keys=True, separators=(",", ":"))
    if isinstance(f, FinVec):
        return json.dumps(vec_to_json(f), separators=(",", ":"))
    if isinstance(f, tuple) and len(f) == 2 and isinstance(f[0], str):
        return f[0]
    raise TypeError(f"cannot serialize functional {f!r}")


def weight_index(f) -> int:
    """j(f): the family index of the top node, 0 for ground functionals."""
    if isinstance(f, CertNode):
        return f.family
    if isinstance(f, tuple) and len(f) == 2 and isinstance(f[0], str):
        return int(f[1])
    return 0


class SigmaRegistry:
    """Append-only injection from functional sequences to even integers.

    A new code is the smallest unused even integer above j(last functional)
    and above the codes of all proper prefixes (allocated first).
    """

    def __init__(self):
        self._codes: dict = {}
        self._used: set = set()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._codes)

    def code(self, history: Sequence) -> int | None:
        return self._codes.get(tuple(functional_key(f) for f in history))

    def next(self, history: Sequence) -> int:
        if not history:
            raise ValueError("history must be nonempty")
        with self._lock:
            return self._alloc(list(history))

    def _alloc(self, history: list) -> int:
        key = tuple(functional_key(f) for f in history)
        if key in self._codes:
            return self._codes[key]
        floor = weight_index(history[-1])
        if len(history) > 1:
            floor = max(floor, self._alloc(history[:-1]))
        c = floor + 1 + (floor + 1) % 2  # smallest even > floor
        while c in self._used:
            c += 2
        self._codes[key] = c
        self._used.add(c)
        return c

    def items(self):
        return list(self._codes.items())

    def snapshot(self) -> list:
        return [{"history": list(k), "code": v} for k, v in self._codes.items()]

    @classmethod
    def from_snapshot(cls, raw: list) -> "SigmaRegistry":
        reg = cls()
        for item in raw:
            reg._codes[tuple(item["history"])] = int(item["code"])
            reg._used.add(int(item["code"]))
        return reg


def sigma_next(registry: SigmaRegistry, history: Sequence) -> int:
    return registry.next(history)


def sigma_violations(registry: SigmaRegistry, weights: dict) -> list[str]:
    """Injectivity, sigma > j(last) and prefix monotonicity over the whole registry.

    ``weights`` maps a functional key to j(f).
    """
    bad = []
    codes = registry.items()
    values = [c for _, c in codes]
    if len(values) != len(set(values)):
        bad.append("two histories share a code")
    table = dict(codes)
    for hist, c in codes:
        if c % 2:
            bad.append(f"odd code {c}")
        if c <= weights.get(hist[-1], 0):
            bad.append(f"code {c} not above j of the last functional")
        if len(hist) > 1:
            pc = table.get(hist[:-1])
            if pc is None:
                bad.append("prefix without a code")
            elif not pc < c:
                bad.append(f"prefix code {pc} not below {c}")
    return bad


# -- dependent sequences ------------------------------------------------------------------

class ParameterExhaustion(ValueError):
    def __init__(self, needed: int, have: int):
        super().__init__(f"dependent sequence needs family index {needed}; params have {have}")
        self.needed = needed
        self.have = have


def even_only(params: MTParams) -> MTParams:
    """Odd families replaced by A_1; a single child never helps, so every norming
    functional of the result is built from even-weight nodes and lies in L."""
    fams = tuple(f if i % 2 == 0 else SizeFamily(1) for i, f in enumerate(params.families, start=1))
    return MTParams(fams, params.thetas, params.ground)


def in_L_even(cert: NormCert | None) -> bool:
    """Sufficient condition for membership in L: no odd-weight node anywhere."""
    if cert is None or isinstance(cert, CertLeaf):
        return True
    return cert.family % 2 == 0 and all(in_L_even(c) for c in cert.children)


@dataclass
class DependentSeq:
    vectors: list  # y~_k
    duals: list  # y_k* as certificates
    r: list  # r_k (the families are 2 r_k)
    thetas: list  # theta_k with y_k*(theta_k m_{2r_k} y~_k) = 1
    j: int
    params: MTParams
    ris: list
    warnings: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def plus(self) -> FinVec:
        return self._combo(1)

    def alternating(self) -> FinVec:
        return self._combo(-1)

    def _combo(self, s: int) -> FinVec:
        p, n = self.params, self.n
        out = FinVec()
        for k, (y, th, r) in enumerate(zip(self.vectors, self.thetas, self.r), start=1):
            out = out + y * (Fraction(s) ** k * th * p.m(2 * r) / n)
        return out

    def violations(self, registry: SigmaRegistry) -> list[str]:
        bad = []
        p, n = self.params, self.n
        if n != p.n(2 * self.j + 1):
            bad.append(f"length {n} != n_(2j+1) = {p.n(2 * self.j + 1)}")
        if not self.r[0] > p.n(2 * self.j + 1):
            bad.append("r_1 <= n_(2j+1)")
        if any(b <= a for a, b in zip(self.r, self.r[1:])):
            bad.append("r_k not increasing")
        for k in range(1, n):
            if 2 * self.r[k] != registry.code(self.duals[:k]):
                bad.append(f"2 r_{k + 1} is not sigma(y_1*, ..., y_{k}*)")
        for k, (y, f, r) in enumerate(zip(self.vectors, self.duals, self.r), start=1):
            if not (isinstance(f, CertNode) and f.family == 2 * r):
                bad.append(f"y_{k}* is not in B_(2 r_{k})")
            if not in_L_even(f):
                bad.append(f"y_{k}* not certified in L")
            rng = y.range()
            if not (rng.lo <= f.lo and f.hi <= rng.hi):
                bad.append(f"supp y_{k}* outside range(y_{k})")
            v = cert_evaluate(f, y)
            m = p.m(2 * r)
            if not Fraction(1, 2 * m) <= v <= Fraction(4, m):
                bad.append(f"y_{k}*(y_{k}) = {v} outside [1/(2m), 4/m]")
        for a, b in zip(self.vectors, self.vectors[1:]):
            if not a.range().hi < b.range().lo:
                bad.append("vectors not successive")
        return bad

    def theta_report(self) -> dict:
        lo, hi = Fraction(1, 4), Fraction(2)
        return {"derived_range": [lo, hi], "stated_range": [Fraction(1, 2), Fraction(5)],
                "thetas": self.thetas,
                "derived_ok": all(lo <= t <= hi for t in self.thetas),
                "stated_ok": all(Fraction(1, 2) <= t <= 5 for t in self.thetas)}


def _take_blocks(source: Iterator[FinVec], after: int, count: int) -> list[FinVec]:
    out = []
    for b in source:
        if b and b.range().lo > after:
            out.append(b)
            if len(out) == count:
                break
    return out


def build_dependent_sequence(Y: Iterator[FinVec], Z: Iterator[FinVec], j: int, params: MTParams,
                             registry: SigmaRegistry, pool: int = 64) -> DependentSeq:
    """Alternate the sources: y~_k is an n_{2 r_k}-RIS average from Y (k odd) or Z (k even).

    r_1 is the least integer above both n_{2j+1} and 2j+2; later indices come
    from the registry, 2 r_k = sigma(y_1*, ..., y_{k-1}*).
    """
    if j < 2:
        raise ValueError("dependent sequences are defined for j >= 2")
    J = len(params)
    if 2 * j + 1 > J:
        raise ParameterExhaustion(2 * j + 1, J)
    length = params.n(2 * j + 1)
    r = max(params.n(2 * j + 1), 2 * j + 2) + 1
    evp = even_only(params)
    vectors, duals, rs, thetas, riss, warnings = [], [], [], [], [], []
    pos = 0
    for k in range(1, length + 1):
        if k > 1:
            code = registry.next(duals)
            r = code // 2
        fam = 2 * r
        if fam > J:
            raise ParameterExhaustion(fam, J)
        src = Y if k % 2 == 1 else Z
        blocks = _take_blocks(src, pos, pool)
        ris = build_ris(blocks, fam, params, bound=None)
        y = ris.average()
        parts = []
        for x in ris.vectors:
            v, c = mt_norm(x, evp)
            if v < Fraction(1, 2):
                warnings.append(f"k={k}: an RIS member has L-norming value {v} < 1/2")
            parts.append(c)
        dual = CertNode(fam, params.thetas[fam - 1], tuple(parts))
        value = cert_evaluate(dual, y)
        m = params.m(fam)
        if not Fraction(1, 2 * m) <= value <= Fraction(4, m):
            warnings.append(f"k={k}: y*(y~) = {value} outside [1/(2m), 4/m]")
        theta = 1 / (m * value)
        vectors.append(y)
        duals.append(dual)
        rs.append(r)
        thetas.append(theta)
        riss.append(ris)
        pos = y.range().hi
    seq = DependentSeq(vectors, duals, rs, thetas, j, params, riss, warnings)
    rep = seq.theta_report()
    if not rep["derived_ok"]:
        warnings.append("theta_k outside [1/4, 2]")
    return seq


# -- the verification report --------------------------------------------------------------

def _report(claim: str, ref: str, status: str, lhs, rhs, witness) -> dict:
    return {"claim": claim, "paper_ref": ref, "status": status,
            "lhs": None if lhs is None else fraction_to_json(as_fraction(lhs)),
            "rhs": None if rhs is None else fraction_to_json(as_fraction(rhs)),
            "witness": witness}


def verify_dependent_estimates(seq: DependentSeq) -> list[dict]:
    """(a) exact lower bound via the explicit special functional; (b) bracketed, never assumed."""
    p = seq.params
    j = seq.j
    m = p.m(2 * j + 1)
    special = CertNode(2 * j + 1, p.thetas[2 * j], tuple(seq.duals))
    plus = seq.plus()
    val = cert_evaluate(special, plus)
    a = _report("plus-signed dependent average has norm >= 1/m_(2j+1)",
                "dependent-sequence lower estimate (a)",
                "holds" if val >= Fraction(1, m) else "fails", val, Fraction(1, m),
                {"functional": special.to_json()})
    alt = seq.alternating()
    upper, ucert = mt_norm(alt, p)  # ||.||_K >= ||.||_L
    lower_L, lcert = mt_norm(alt, even_only(p))  # a functional in L
    bound = Fraction(2, m ** 3)
    witness = {"K_upper": fraction_to_json(upper), "L_lower": fraction_to_json(lower_L),
               "growth_flags": p.growth_flags}
    if not p.growth_ok:
        status = "not-applicable"
    elif upper <= bound:
        status = "holds"
    elif lower_L > bound:
        status = "fails"
    else:
        status = "budget-exceeded"
    b = _report("alternating dependent average has norm <= 2/m_(2j+1)^3",
                "dependent-sequence upper estimate (b)", status, upper, bound, witness)
    return [a, b]


def toy_dependent_params(j: int = 2, n_odd: int = 2, families: int | None = None) -> MTParams:
    """n_1 = 1 (so family 1 is inert), n_(2j+1) = n_odd, every other n_i = 2; m_i = 2^(i // 2)."""
    J = families if families is not None else 2 * (max(n_odd, 2 * j + 2) + 1) + 2 * n_odd + 2
    ms = [max(2, 2 ** (i // 2)) for i in range(1, J + 1)]
    ns = [1 if i == 1 else (n_odd if i == 2 * j + 1 else 2) for i in range(1, J + 1)]
    return MTParams([SizeFamily(n) for n in ns], [Fraction(1, m) for m in ms])


def block_source(start: int = 1, width: Callable[[int], int] | None = None,
                 values: Callable[[int], Sequence] | None = None) -> Iterator[FinVec]:
    """Successive blocks: width(k) coordinates carrying values(k)."""
    pos = start
    k = 0
    while True:
        k += 1
        w = width(k) if width else 1
        vals = values(k) if values else [1] * w
        yield FinVec({pos + i: as_fraction(v) for i, v in enumerate(vals)})
        pos += w
