"""Exact mixed-Tsirelson / d-product norm with an optimal norming functional.

The value is computed on the leaf magnitudes v_1, ..., v_L of the support
s_1 < ... < s_L (|x(s)| for the scalar ground, the ground norm of the block
otherwise).  With G(a, b) the best value of a functional whose support starts
at s_a and stays inside [s_a, s_b]:

    G(a, b) = max(v_a, max_k theta_k * P_k(a, b))
    N(a, b) = max_{a' >= a} G(a', b)

where P_k(a, b) is the best sum over at least two consecutive runs starting
at a whose minima are admissible for family k.  A single child never helps
(theta <= 1), so every run in P_k is a proper sub-run and the recursion is
well founded.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..families import fam_start, fam_step
from ..ground import ScalarGround
from ..kernel import FinVec, as_fraction, fraction_to_json, pair, vec_from_json, vec_to_json
from .params import MTParams


# -- certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class CertLeaf:
    """A ground functional on coordinate ``index``: sign*e_index* or a block functional."""

    index: int
    sign: int = 1
    ground: FinVec | None = None

    depth = 0

    @property
    def lo(self) -> int:
        return self.index

    @property
    def hi(self) -> int:
        return self.index

    def leaves(self) -> list:
        return [self]

    def to_json(self) -> dict:
        out = {"leaf": self.index}
        if self.ground is None:
            out["sign"] = self.sign
        else:
            out["ground"] = vec_to_json(self.ground)
        return out


@dataclass(frozen=True)
class CertNode:
    """theta_k * (sum of children); ``family`` is the 1-based family index k."""

    family: int
    theta: Fraction
    children: tuple

    @property
    def depth(self) -> int:
        return 1 + max(c.depth for c in self.children)

    @property
    def lo(self) -> int:
        return self.children[0].lo

    @property
    def hi(self) -> int:
        return self.children[-1].hi

    @property
    def weight(self) -> Fraction:
        return self.theta

    def leaves(self) -> list:
        return [leaf for c in self.children for leaf in c.leaves()]

    def to_json(self) -> dict:
        return {"family": self.family, "theta": fraction_to_json(self.theta),
                "children": [c.to_json() for c in self.children]}


NormCert = Union[CertLeaf, CertNode]


def cert_from_json(raw) -> NormCert:
    if "leaf" in raw:
        g = raw.get("ground")
        return CertLeaf(int(raw["leaf"]), int(raw.get("sign", 1)),
                        None if g is None else vec_from_json(g))
    return CertNode(int(raw["family"]), Fraction(raw["theta"]),
                    tuple(cert_from_json(c) for c in raw["children"]))


def cert_coefficients(cert: NormCert) -> dict:
    """Coordinate -> (multiplier, leaf) for every leaf."""
    out = {}

    def walk(c, mult):
        if isinstance(c, CertLeaf):
            out[c.index] = (mult, c)
        else:
            for ch in c.children:
                walk(ch, mult * c.theta)

    walk(cert, Fraction(1))
    return out


def cert_functional(cert: NormCert | None):
    """The functional as a FinVec (scalar leaves) or a dict coordinate -> FinVec (block leaves)."""
    if cert is None:
        return FinVec()
    coeffs = cert_coefficients(cert)
    if all(leaf.ground is None for _, leaf in coeffs.values()):
        return FinVec({i: mult * leaf.sign for i, (mult, leaf) in coeffs.items()})
    return {i: leaf.ground * mult for i, (mult, leaf) in coeffs.items()}


def cert_evaluate(cert: NormCert | None, x) -> Fraction:
    if cert is None:
        return Fraction(0)
    f = cert_functional(cert)
    if isinstance(f, FinVec):
        if hasattr(x, "blocks"):
            return sum((v * as_fraction(x.blocks[i]) for i, v in f.items() if i in x.blocks), Fraction(0))
        return pair(f, x)
    blocks = x.blocks if hasattr(x, "blocks") else x
    return sum((pair(g, blocks[i]) for i, g in f.items() if i in blocks), Fraction(0))


def cert_violations(cert: NormCert, params: MTParams) -> list[str]:
    """Structural check: successive children, admissible minima, theta matches family."""
    from ..families import admissible

    bad = []

    def walk(c):
        if isinstance(c, CertLeaf):
            return
        if not 1 <= c.family <= len(params):
            bad.append(f"family index {c.family} out of range")
            return
        if c.theta != params.thetas[c.family - 1]:
            bad.append(f"theta {c.theta} does not match family {c.family}")
        spans = [range(ch.lo, ch.hi + 1) for ch in c.children]
        res = admissible(spans, params.families[c.family - 1])
        if not res:
            bad.append(f"node over [{c.lo},{c.hi}]: {res.reason}")
        for ch in c.children:
            walk(ch)

    walk(cert)
    return bad


# -- the DP ---------------------------------------------------------------------

def leaf_data(x, params: MTParams) -> list[tuple]:
    """Sorted (coordinate, magnitude, leaf) triples."""
    if hasattr(x, "blocks"):
        out = []
        for n in sorted(x.blocks):
            block = x.blocks[n]
            if isinstance(params.ground, ScalarGround):
                t = as_fraction(block)
                if t:
                    out.append((n, abs(t), CertLeaf(n, 1 if t > 0 else -1)))
                continue
            v, g = params.ground.norm(n, block)
            if v:
                out.append((n, v, CertLeaf(n, 1, g)))
        return out
    if not isinstance(params.ground, ScalarGround):
        raise TypeError("a non-scalar ground needs a block vector")
    out = []
    for i, v in x.items():
        if not isinstance(i, int) or i < 1:
            raise ValueError(f"mixed-Tsirelson vectors are indexed by positive integers, got {i!r}")
        out.append((i, abs(v), CertLeaf(i, 1 if v > 0 else -1)))
    return out


class _Solver:
    def __init__(self, leaves: list, params: MTParams):
        self.idx = [t[0] for t in leaves]
        self.val = [t[1] for t in leaves]
        self.leaf = [t[2] for t in leaves]
        self.params = params
        self.fams = params.families
        self.thetas = params.thetas
        self.G = {}
        self.R = {}

    # entries are (value, depth, choice)
    def g(self, a: int, b: int):
        key = (a, b)
        hit = self.G.get(key)
        if hit is not None:
            return hit
        best = (self.val[a], 0, None)
        if b > a:
            for k in range(len(self.fams)):
                cand = self._parts(k, a, b)
                if cand is None:
                    continue
                v = self.thetas[k] * cand[0]
                if _better(v, cand[1] + 1, best):
                    best = (v, cand[1] + 1, (k, cand[2]))
        self.G[key] = best
        return best

    def _parts(self, k: int, a: int, b: int):
        fam = self.fams[k]
        st0 = fam_start(fam, self.idx[a])
        best = None
        for e in range(b - 1, a - 1, -1):
            st = fam_step(fam, st0, self.idx[e + 1])
            if st is None:
                continue
            first = self.g(a, e)
            rest = self.r(k, e + 1, b, st)
            v = first[0] + rest[0]
            d = max(first[1], rest[1])
            if best is None or _better(v, d, best):
                best = (v, d, (e, st))
        return best

    def r(self, k: int, c: int, b: int, st):
        key = (k, c, b, st)
        hit = self.R.get(key)
        if hit is not None:
            return hit
        whole = self.g(c, b)
        best = (whole[0], whole[1], None)
        fam = self.fams[k]
        for e in range(b - 1, c - 1, -1):
            nst = fam_step(fam, st, self.idx[e + 1])
            if nst is None:
                continue
            first = self.g(c, e)
            rest = self.r(k, e + 1, b, nst)
            v = first[0] + rest[0]
            d = max(first[1], rest[1])
            if _better(v, d, best):
                best = (v, d, (e, nst))
        self.R[key] = best
        return best

    def n(self, a: int, b: int):
        """(value, start a') for N(a, b)."""
        best, arg = None, a
        for a2 in range(a, b + 1):
            cand = self.g(a2, b)
            if best is None or _better(cand[0], cand[1], best):
                best, arg = cand, a2
        return best, arg

    # certificate reconstruction
    def cert_g(self, a: int, b: int) -> NormCert:
        _, _, choice = self.g(a, b)
        if choice is None:
            return self.leaf[a]
        k, (e, st) = choice
        children = [self.cert_g(a, e)]
        children += self._cert_r(k, e + 1, b, st)
        return CertNode(k + 1, self.thetas[k], tuple(children))

    def _cert_r(self, k, c, b, st) -> list:
        _, _, choice = self.r(k, c, b, st)
        if choice is None:
            return [self.cert_g(c, b)]
        e, nst = choice
        return [self.cert_g(c, e)] + self._cert_r(k, e + 1, b, nst)


def _better(v, d, best) -> bool:
    # larger value wins; ties go to the shallower certificate; remaining ties
    # keep the earlier candidate: leftmost start, then the longest leading part
    return v > best[0] or (v == best[0] and d < best[1])


def mt_norm(x, params: MTParams) -> tuple[Fraction, NormCert | None]:
    """Exact norm and an optimal certificate (None for the zero vector)."""
    leaves = leaf_data(x, params)
    if not leaves:
        return Fraction(0), None
    sol = _Solver(leaves, params)
    (value, _, _), a = sol.n(0, len(leaves) - 1)
    return value, sol.cert_g(a, len(leaves) - 1)


def norm_value(x, params: MTParams) -> Fraction:
    return mt_norm(x, params)[0]


@dataclass
class NormTable:
    """||E x|| for every interval E, from a single DP over the support."""

    support: list
    values: dict

    def interval_norm(self, lo: int, hi: int) -> Fraction:
        a = next((i for i, s in enumerate(self.support) if s >= lo), None)
        b = next((i for i in range(len(self.support) - 1, -1, -1) if self.support[i] <= hi), None)
        if a is None or b is None or a > b:
            return Fraction(0)
        return self.values[(a, b)]


def norm_table(x, params: MTParams) -> NormTable:
    leaves = leaf_data(x, params)
    sol = _Solver(leaves, params)
    L = len(leaves)
    values = {}
    for b in range(L):
        run = None
        for a in range(b, -1, -1):
            g = sol.g(a, b)[0]
            run = g if run is None or g > run else run
            values[(a, b)] = run
    return NormTable([t[0] for t in leaves], values)
