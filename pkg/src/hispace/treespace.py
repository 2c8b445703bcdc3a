"""Tree spaces X_A: vectors on a lazily materialized tree under a level-collapsed norm.

A node is a tuple of child indices (the root is ``()``).  The norm of a
vector collapses each level to its l^1 mass and applies a norm on the level
sequence.  Two trees are provided:

* ``coefficient``: the node (k_1, ..., k_n) carries a_delta = k_n / b_n with
  b_n = base**n and children indexed 0..b_n; branch vectors are the sums of
  these coefficients along a branch.
* ``dyadic``: two children per node and x_s = sum of e_delta over an initial
  segment s, including the root.

Nothing is ever materialized beyond the nodes named by vectors, segments or
certificates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .kernel import FinVec, as_fraction, pair
from .lp import linprog
from .lpcompare import lp_power_sum

Node = tuple

LEVEL_NORMS = ("c0", "linf", "l1", "lp", "polyhedral")


class ExactnessUnavailable(ValueError):
    """The requested quantity is irrational in general; use the bounds mode."""


class ToleranceUnreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class TreeParams:
    depth: int
    kind: str = "coefficient"
    base: int = 81
    level_norm: str = "c0"
    p: Fraction | None = None
    functionals: tuple = ()  # polyhedral: nonnegative weights on level masses 0..depth

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth cap must be >= 1")
        if self.kind not in ("coefficient", "dyadic"):
            raise ValueError(f"unknown tree kind {self.kind!r}")
        if self.level_norm not in LEVEL_NORMS:
            raise ValueError(f"unknown level norm {self.level_norm!r}")
        if self.level_norm == "lp":
            if self.p is None or as_fraction(self.p) < 1:
                raise ValueError("l_p level norm needs p >= 1")
            object.__setattr__(self, "p", as_fraction(self.p))
        if self.level_norm == "polyhedral":
            fs = tuple(tuple(as_fraction(v) for v in f) for f in self.functionals)
            if not fs or any(len(f) != self.depth + 1 or min(f) < 0 for f in fs):
                raise ValueError("polyhedral level norm needs nonnegative weight rows of length depth+1")
            object.__setattr__(self, "functionals", fs)
        if self.kind == "coefficient":
            if self.base < 2:
                raise ValueError("base must be >= 2")
            if not self.margin_ok:
                raise ValueError(f"branching base {self.base} violates 1/2 - sum 1/b_k > 1/4 "
                                 f"(margin {self.margin})")

    def branching(self, n: int) -> int:
        """Largest child index at height n (children are 0..b_n)."""
        if n < 1:
            raise ValueError("heights of non-root nodes start at 1")
        return self.base ** n if self.kind == "coefficient" else 1

    @property
    def margin(self) -> Fraction:
        """1/2 - sum_{k>=1} 1/b_k, the whole infinite tail (= 1/(base-1))."""
        return Fraction(1, 2) - Fraction(1, self.base - 1)

    @property
    def margin_ok(self) -> bool:
        return self.margin > Fraction(1, 4)

    @property
    def polyhedral(self) -> bool:
        return self.level_norm != "lp"

    def to_json(self) -> dict:
        out = {"depth": self.depth, "kind": self.kind, "level_norm": self.level_norm}
        if self.kind == "coefficient":
            out["base"] = self.base
        if self.p is not None:
            out["p"] = f"{self.p.numerator}/{self.p.denominator}"
        if self.functionals:
            out["functionals"] = [[f"{v.numerator}/{v.denominator}" for v in f] for f in self.functionals]
        return out

    @classmethod
    def from_json(cls, raw: dict) -> "TreeParams":
        return cls(int(raw["depth"]), raw.get("kind", "coefficient"), int(raw.get("base", 81)),
                   raw.get("level_norm", "c0"), raw.get("p"),
                   tuple(tuple(Fraction(v) for v in f) for f in raw.get("functionals", ())))


def check_node(node: Node, params: TreeParams) -> None:
    if len(node) > params.depth:
        raise ValueError(f"node {node} below the depth cap {params.depth}")
    for n, k in enumerate(node, start=1):
        if not 0 <= k <= params.branching(n):
            raise ValueError(f"child index {k} at height {n} outside 0..{params.branching(n)}")


def coefficient(node: Node, params: TreeParams) -> Fraction:
    """a_delta: k_n / b_n on the coefficient tree (0 at the root), 1 on the dyadic tree."""
    if params.kind == "dyadic":
        return Fraction(1)
    if not node:
        return Fraction(0)
    return Fraction(node[-1], params.branching(len(node)))


def is_prefix(a: Node, b: Node) -> bool:
    return len(a) <= len(b) and b[:len(a)] == a


# -- norms ----------------------------------------------------------------------

def level_masses(f: FinVec, depth: int) -> list[Fraction]:
    masses = [Fraction(0)] * (depth + 1)
    for node, v in f.items():
        if len(node) > depth:
            raise ValueError(f"node {node} below the depth cap {depth}")
        masses[len(node)] += abs(v)
    return masses


def _polyhedral_level_norm(masses: Sequence[Fraction], params: TreeParams) -> Fraction:
    ln = params.level_norm
    if ln in ("c0", "linf"):
        return max(masses)
    if ln == "l1":
        return sum(masses, Fraction(0))
    return max(sum((w * m for w, m in zip(f, masses)), Fraction(0)) for f in params.functionals)


def xa_norm(f: FinVec, params: TreeParams, exact: bool = True, tol: Fraction = Fraction(1, 10 ** 9)):
    """||f|| = || (sum_{|delta|=n} |lambda_delta|)_n ||_A.

    Exact for polyhedral level norms.  For l_p, ``exact=False`` returns
    certified rational bounds (lower, upper) with upper - lower <= tol.
    """
    masses = level_masses(f, params.depth)
    if params.polyhedral:
        return _polyhedral_level_norm(masses, params)
    if exact:
        raise ExactnessUnavailable("l_p level norms are irrational in general; pass exact=False")
    return lp_bounds(masses, params.p, tol)


def lp_bounds(masses: Sequence[Fraction], p: Fraction, tol: Fraction) -> tuple[Fraction, Fraction]:
    oracle = lp_power_sum(FinVec({i + 1: m for i, m in enumerate(masses) if m}), p)
    lo = max(masses, default=Fraction(0))
    hi = sum(masses, Fraction(0))
    if oracle.compare(lo) == 0:
        return lo, lo
    while hi - lo > tol:
        mid = (lo + hi) / 2
        c = oracle.compare(mid)
        if c == 0:
            return mid, mid
        if c < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def dual_norm(xstar: FinVec, params: TreeParams) -> Fraction:
    """Norm of a functional on X_A: the A*-norm of its per-level sup vector."""
    u = [Fraction(0)] * (params.depth + 1)
    for node, v in xstar.items():
        if len(node) > params.depth:
            raise ValueError(f"node {node} below the depth cap")
        u[len(node)] = max(u[len(node)], abs(v))
    ln = params.level_norm
    if ln in ("c0", "linf"):
        return sum(u, Fraction(0))
    if ln == "l1":
        return max(u)
    if ln == "lp":
        raise ExactnessUnavailable("dual of an l_p level norm is irrational in general")
    # max u.m subject to f_j . m <= 1, m >= 0
    res = linprog([-v for v in u], A_ub=[list(f) for f in params.functionals],
                  b_ub=[1] * len(params.functionals))
    if res.status != "optimal":
        raise ValueError("polyhedral level norm is degenerate (unbounded dual)")
    return -res.value


# -- segments and vectors ---------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """[lo, hi] = nodes delta with lo <= delta <= hi in the tree order."""

    lo: Node
    hi: Node

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(self.lo))
        object.__setattr__(self, "hi", tuple(self.hi))
        if not is_prefix(self.lo, self.hi):
            raise ValueError(f"{self.lo} is not an initial segment of {self.hi}")

    def nodes(self) -> list[Node]:
        return [self.hi[:k] for k in range(len(self.lo), len(self.hi) + 1)]

    def ext(self) -> "Segment":
        return Segment((), self.hi)

    def band(self, m: int, M: int) -> "Segment | None":
        """Intersection with the levels m..M, or None when empty."""
        a, b = max(len(self.lo), m), min(len(self.hi), M)
        if a > b:
            return None
        return Segment(self.hi[:a], self.hi[:b])


def segment_vector(d: Segment, params: TreeParams) -> FinVec:
    """x_d = sum_{delta in d} a_delta e_delta."""
    check_node(d.hi, params)
    return FinVec({n: coefficient(n, params) for n in d.nodes()})


def branch_vector(gamma: Sequence[int], params: TreeParams) -> FinVec:
    """x_gamma for the finite branch gamma = (k_1, ..., k_N)."""
    node = tuple(gamma)
    check_node(node, params)
    return segment_vector(Segment((), node), params)


def initial_segments(params: TreeParams) -> list[Segment]:
    """All initial segments [root, delta] of the dyadic tree up to the depth cap."""
    if params.kind != "dyadic":
        raise ValueError("initial segments are enumerated on the dyadic tree only")
    out = [Segment((), ())]
    frontier = [()]
    for _ in range(params.depth):
        frontier = [n + (e,) for n in frontier for e in (0, 1)]
        out.extend(Segment((), n) for n in frontier)
    return out


@dataclass(frozen=True)
class W0Element:
    """w = sum lambda_d x_d with sum |lambda_d| <= 1 and ||x_ext(d)|| <= 1 for each term."""

    terms: tuple  # (lambda, Segment) pairs; the sign lives in lambda
    params: TreeParams

    def __post_init__(self):
        terms = tuple((as_fraction(lam), d) for lam, d in self.terms)
        object.__setattr__(self, "terms", terms)
        if sum((abs(lam) for lam, _ in terms), Fraction(0)) > 1:
            raise ValueError("sum |lambda_d| exceeds 1")
        for _, d in terms:
            if not isinstance(d, Segment):
                raise TypeError("W0 elements are given by segment decompositions")
            ext = segment_vector(d.ext(), self.params)
            nrm = xa_norm(ext, self.params, exact=self.params.polyhedral)
            if (nrm if self.params.polyhedral else nrm[0]) > 1:
                raise ValueError(f"||x_ext(d)|| > 1 for the segment ending at {d.hi}")

    def vector(self) -> FinVec:
        out = FinVec()
        for lam, d in self.terms:
            out = out + segment_vector(d, self.params) * lam
        return out

    def band(self, m: int, M: int) -> list[tuple[Fraction, Segment]]:
        """The induced decomposition of E w for the band E = levels m..M."""
        out = []
        for lam, d in self.terms:
            e = d.band(m, M)
            if e is not None and lam:
                out.append((lam, e))
        return out


def restrict_nodes(x: FinVec, keep: Callable[[Node], bool]) -> FinVec:
    return FinVec({n: v for n, v in x.items() if keep(n)})


# -- the norming certificate --------------------------------------------------------

@dataclass
class NormingCertificate:
    branch: tuple
    sign: int
    value: Fraction  # |y*(sign * x_gamma)|
    norm: Fraction  # ||y*||
    margin: Fraction | None  # 1/2 - sum 1/b_k (coefficient tree)
    witness: list  # mu_k (coefficient tree) or the chosen epsilons (dyadic)

    @property
    def holds(self) -> bool:
        return self.value > self.norm / 4


def functional_norm(lams: dict, params: TreeParams) -> tuple[Fraction, list[Fraction]]:
    """||sum lambda_k y_k*|| and a norming witness z = (mu_k) with ||z||_A <= 1."""
    N = params.depth
    lam = [as_fraction(lams.get(k, 0)) for k in range(N + 1)]
    if params.kind == "dyadic":
        return sum((abs(v) for v in lam), Fraction(0)), []
    ln = params.level_norm
    sgn = [(1 if v > 0 else -1 if v < 0 else 0) for v in lam]
    if ln in ("c0", "linf"):
        return sum((abs(v) for v in lam), Fraction(0)), [Fraction(s) for s in sgn]
    if ln == "l1":
        k = max(range(N + 1), key=lambda i: (abs(lam[i]), -i))
        return abs(lam[k]), [Fraction(sgn[k]) if i == k else Fraction(0) for i in range(N + 1)]
    if ln == "lp":
        raise ExactnessUnavailable("no exact norming witness for an l_p level norm")
    # max lam.z subject to f_j . |z| <= 1: split z = z+ - z-
    W = N + 1
    rows = [list(f) + list(f) for f in params.functionals]
    res = linprog([-v for v in lam] + list(lam), A_ub=rows, b_ub=[1] * len(rows))
    if res.status != "optimal":
        raise ValueError("polyhedral level norm is degenerate")
    z = [res.x[i] - res.x[W + i] for i in range(W)]
    return -res.value, z


def y_functional(lams: dict, params: TreeParams, nodes: Iterable[Node]) -> FinVec:
    """y* = sum lambda_k y_k* restricted to ``nodes`` (the functional is not finitely supported)."""
    out = {}
    for n in nodes:
        k = len(n)
        if k == 0:
            continue
        lam = as_fraction(lams.get(k, 0))
        if params.kind == "dyadic" and n[-1] != 1:
            continue
        if lam:
            out[n] = lam
    return FinVec(out)


def apply_y(lams: dict, x: FinVec, params: TreeParams) -> Fraction:
    return pair(y_functional(lams, params, x.support()), x)


def norming_certificate(lams: dict, params: TreeParams) -> NormingCertificate:
    """A branch gamma with ||x_gamma|| <= 1 and |y*(x_gamma)| > ||y*|| / 4.

    Coefficient tree: take a norming z for the level functional, keep the
    sign class carrying at least half of y*(z), and round mu_k down to the
    grid n_k / b_k.  Dyadic tree: follow epsilon_k = 1 exactly on the levels
    where lambda_k has the chosen sign.
    """
    lams = {int(k): as_fraction(v) for k, v in lams.items() if as_fraction(v)}
    if not lams:
        raise ValueError("zero functional")
    N = params.depth
    if min(lams) < 1 or max(lams) > N:
        raise ValueError(f"levels must lie in 1..{N}")
    nrm, z = functional_norm(lams, params)
    if params.kind == "dyadic":
        pos = sum((v for v in lams.values() if v > 0), Fraction(0))
        neg = -sum((v for v in lams.values() if v < 0), Fraction(0))
        sign = 1 if pos >= neg else -1
        eps = tuple(1 if sign * lams.get(k, 0) > 0 else 0 for k in range(1, N + 1))
        x = branch_vector(eps, params)
        value = abs(apply_y(lams, x, params))
        return NormingCertificate(eps, sign, value, nrm, None, list(eps))
    lam = [lams.get(k, Fraction(0)) for k in range(N + 1)]
    plus = sum((lam[k] * z[k] for k in range(1, N + 1) if z[k] > 0), Fraction(0))
    minus = sum((lam[k] * z[k] for k in range(1, N + 1) if z[k] < 0), Fraction(0))
    if abs(plus) >= abs(minus):
        mu = list(z)
    else:
        mu = [-v for v in z]
    ks = []
    for k in range(1, N + 1):
        b = params.branching(k)
        ks.append(int(mu[k] * b) if mu[k] > 0 else 0)  # floor for mu > 0
    x = branch_vector(ks, params)
    if xa_norm(x, params) > 1:
        raise AssertionError("rounded branch left the unit ball")
    v = apply_y(lams, x, params)
    sign = 1 if v >= 0 else -1
    margin = Fraction(1, 2) - sum((Fraction(1, params.branching(k)) for k in range(1, N + 1)), Fraction(0))
    return NormingCertificate(tuple(ks), sign, abs(v), nrm, margin, mu[1:])


# -- the band splitter -----------------------------------------------------------------

@dataclass
class BandSplit:
    band: tuple  # (m, M)
    E1: frozenset  # E'
    E2: frozenset  # E''
    eps: Fraction


def _phi(phi) -> Callable[[FinVec], Fraction]:
    if isinstance(phi, FinVec):
        return lambda x: pair(phi, x)
    return phi


def split_band(band: tuple, phi, eps, params: TreeParams, nodes: Iterable[Node]) -> BandSplit:
    """E'' = {delta in E : ||x_ext(delta)|| <= 1 and phi(x_ext_E(delta)) >= eps}, E' = E minus E''.

    Only the supplied (materialized) nodes are classified.
    """
    m, M = band
    if not 0 <= m <= M <= params.depth:
        raise ValueError(f"band [{m},{M}] outside 0..{params.depth}")
    eps = as_fraction(eps)
    f = _phi(phi)
    E1, E2 = set(), set()
    for n in set(nodes):
        if not m <= len(n) <= M:
            continue
        check_node(n, params)
        ext = segment_vector(Segment((), n), params)
        extE = segment_vector(Segment(n[:m], n), params)
        nrm = xa_norm(ext, params, exact=params.polyhedral)
        small = nrm <= 1 if params.polyhedral else nrm[1] <= 1
        if small and f(extE) >= eps:
            E2.add(n)
        else:
            E1.add(n)
    return BandSplit((m, M), frozenset(E1), frozenset(E2), eps)


def split_property_one(split: BandSplit, phi, w: W0Element) -> tuple[Fraction, bool]:
    """|phi(E' w)| against eps for a W0 element."""
    v = _phi(phi)(restrict_nodes(w.vector(), lambda n: n in split.E1))
    return abs(v), abs(v) < split.eps


def split_property_two(split: BandSplit, phi, d: Segment, params: TreeParams) -> tuple[Fraction, bool] | None:
    """For a segment crossing the band and meeting E'': |phi(E x_d)| >= eps.  None if not applicable."""
    m, M = split.band
    if not (len(d.lo) <= m and len(d.hi) >= M):
        return None
    if not any(n in split.E2 for n in d.nodes()):
        return None
    xd = restrict_nodes(segment_vector(d, params), lambda n: m <= len(n) <= M)
    v = abs(_phi(phi)(xd))
    return v, v >= split.eps


# -- the incomparable partition --------------------------------------------------------

@dataclass
class Partition:
    classes: list  # lists of 1-based band indices
    F: list  # frozensets of nodes, one per band
    E2: list
    eps: Fraction
    conditions: dict

    @property
    def N(self) -> int:
        return len(self.classes)

    @property
    def ok(self) -> bool:
        return all(self.conditions[k]["holds"] for k in ("incomparable", "small_rest", "count"))


def _ancestors(n: Node) -> list[Node]:
    return [n[:k] for k in range(len(n) + 1)]


def incomparable_partition(bands: Sequence[tuple], ws: Sequence[W0Element], xstar: FinVec,
                           eps, params: TreeParams) -> Partition:
    """Greedy partition D_1, ..., D_N of the bands with pairwise incomparable F_i in each class."""
    eps = as_fraction(eps)
    n = len(bands)
    if len(ws) != n:
        raise ValueError("one W0 element per band")
    for w in ws:
        if not isinstance(w, W0Element):
            raise TypeError("each w_i must be a W0Element (segment decomposition)")
    for (m1, M1), (m2, M2) in zip(bands, bands[1:]):
        if not M1 < m2:
            raise ValueError("bands must be successive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if any(v < 0 for _, v in xstar.items()):
        raise ValueError("x* must be nonnegative")
    if params.polyhedral and dual_norm(xstar, params) > 1:
        raise ValueError("x* must lie in the unit ball of the dual")
    L = [w.band(m, M) for w, (m, M) in zip(ws, bands)]
    nodes = set()
    for terms in L:
        for _, d in terms:
            nodes.update(d.ext().nodes())
    half = eps / 2
    E2 = [split_band(b, xstar, half, params, nodes).E2 for b in bands]

    def mu(i: int, S: Iterable[int]) -> Fraction:
        marks = set().union(*(E2[s] for s in S if s != i))
        return sum((abs(lam) for lam, d in L[i] if any(a in marks for a in _ancestors(d.hi))), Fraction(0))

    classes: list = []
    F: list = [frozenset()] * n
    J = list(range(n))
    while J:
        D = [J[0]]
        for i in J[1:]:
            if mu(i, D) < half:
                D.append(i)
        for j in D:
            earlier = set().union(*(E2[s] for s in D if s < j))
            F[j] = frozenset(d for d in E2[j] if not any(a in earlier for a in _ancestors(d)))
        classes.append(D)
        J = [i for i in J if i not in D]
    conditions = _check_partition(classes, F, bands, ws, xstar, eps)
    return Partition([[i + 1 for i in D] for D in classes], F, E2, eps, conditions)


def _check_partition(classes, F, bands, ws, xstar, eps) -> dict:
    bad_pairs = []
    for D in classes:
        for a in D:
            for b in D:
                if a < b and any(x in F[a] for d in F[b] for x in _ancestors(d)):
                    bad_pairs.append((a + 1, b + 1))
    rest = []
    for i, ((m, M), w) in enumerate(zip(bands, ws)):
        v = pair(xstar, restrict_nodes(w.vector(), lambda n: m <= len(n) <= M and n not in F[i]))
        rest.append(v)
    N = len(classes)
    return {
        "incomparable": {"holds": not bad_pairs, "violations": bad_pairs},
        "small_rest": {"holds": all(v < eps for v in rest), "values": rest},
        "count": {"holds": N < 5 / eps ** 2, "N": N, "bound": 5 / eps ** 2},
    }


# -- gauges of 2^n W + a_n B -------------------------------------------------------------

@dataclass
class Gauge:
    value: Fraction | None  # exact (polyhedral mode)
    lower: Fraction
    upper: Fraction
    coefficients: list  # c_g with x = 2^n sum c_g g + a_n u
    residual: FinVec
    functional: FinVec  # dual solution: a norming functional of the gauge norm
    exact: bool = True

    def to_json(self) -> dict:
        from .kernel import fraction_to_json, vec_to_json
        return {"value": None if self.value is None else fraction_to_json(self.value),
                "lower": fraction_to_json(self.lower), "upper": fraction_to_json(self.upper),
                "coefficients": [fraction_to_json(c) for c in self.coefficients],
                "residual": vec_to_json(self.residual), "exact": self.exact}


def _ball_rows(nodes: list, params: TreeParams, mode: str) -> list[list[Fraction]]:
    """Rows r with r . |u| <= t describing the A-ball on level masses of u."""
    levels = [len(n) for n in nodes]
    if mode in ("c0", "linf"):
        return [[Fraction(1) if l == k else Fraction(0) for l in levels] for k in sorted(set(levels))]
    if mode == "l1":
        return [[Fraction(1)] * len(nodes)]
    if mode == "polyhedral":
        return [[f[l] for l in levels] for f in params.functionals]
    raise ValueError(mode)


def _gauge_lp(x: FinVec, gens: Sequence[FinVec], scale: Fraction, a: Fraction, params: TreeParams, mode: str):
    nodes = sorted(set(x.support()).union(*(g.support() for g in gens)), key=lambda n: (len(n), n))
    pos = {nd: i for i, nd in enumerate(nodes)}
    G, U = len(gens), len(nodes)
    nvar = 2 * G + 2 * U + 1  # alpha, beta, u+, u-, t
    tcol = nvar - 1
    A_eq, b_eq = [], []
    for nd in nodes:
        row = [Fraction(0)] * nvar
        for gi, g in enumerate(gens):
            c = g[nd]
            if c:
                row[gi] = scale * c
                row[G + gi] = -scale * c
        row[2 * G + pos[nd]] = a
        row[2 * G + U + pos[nd]] = -a
        A_eq.append(row)
        b_eq.append(x[nd])
    A_ub, b_ub = [], []
    if G:
        row = [Fraction(1)] * (2 * G) + [Fraction(0)] * (2 * U) + [Fraction(-1)]
        A_ub.append(row)
        b_ub.append(0)
    for r in _ball_rows(nodes, params, mode):
        row = [Fraction(0)] * (2 * G) + list(r) + list(r) + [Fraction(-1)]
        A_ub.append(row)
        b_ub.append(0)
    c = [Fraction(0)] * (nvar - 1) + [Fraction(1)]
    res = linprog(c, A_ub, b_ub, A_eq, b_eq)
    if res.status != "optimal":
        raise ValueError(f"gauge LP {res.status}")
    coeffs = [res.x[i] - res.x[G + i] for i in range(G)]
    u = FinVec({nd: res.x[2 * G + i] - res.x[2 * G + U + i] for i, nd in enumerate(nodes)})
    functional = FinVec({nd: res.dual_eq[i] for i, nd in enumerate(nodes)})
    return res.x[tcol], coeffs, u, functional


def gauge(x: FinVec, gens: Sequence[FinVec], n: int, a_n, params: TreeParams,
          tol: Fraction | None = None) -> Gauge:
    """inf{t > 0 : x in t(2^n W + a_n B)} with W = co{+-g : g in gens}.

    Exact by linear programming when the level norm is polyhedral.  For l_p
    level norms the ball is sandwiched between the l^1 ball (inside) and the
    l^inf ball (outside), which gives certified bounds; ``tol`` demands a gap
    no larger than the given value.
    """
    a = as_fraction(a_n)
    if a <= 0:
        raise ValueError("a_n must be positive")
    if not x:
        return Gauge(Fraction(0), Fraction(0), Fraction(0), [Fraction(0)] * len(gens), FinVec(), FinVec())
    scale = Fraction(2) ** n
    if params.polyhedral:
        t, coeffs, u, fun = _gauge_lp(x, gens, scale, a, params, params.level_norm)
        return Gauge(t, t, t, coeffs, u, fun)
    lo, _, _, fun = _gauge_lp(x, gens, scale, a, params, "linf")
    hi, coeffs, u, _ = _gauge_lp(x, gens, scale, a, params, "l1")
    if tol is not None and hi - lo > as_fraction(tol):
        raise ToleranceUnreachable(f"gap {hi - lo} exceeds tolerance {tol}")
    return Gauge(None, lo, hi, coeffs, u, fun, exact=False)


def gauge_violations(x: FinVec, gens: Sequence[FinVec], n: int, a_n, params: TreeParams, g: Gauge) -> list[str]:
    """Re-verify a gauge report from its decomposition and dual functional."""
    bad = []
    a = as_fraction(a_n)
    t = g.upper
    recon = g.residual * a
    for c, w in zip(g.coefficients, gens):
        recon = recon + w * (Fraction(2) ** n * c)
    if recon != x:
        bad.append("decomposition does not reproduce x")
    if sum((abs(c) for c in g.coefficients), Fraction(0)) > t:
        bad.append("generator coefficients exceed t")
    if params.polyhedral:
        if xa_norm(g.residual, params) > t:
            bad.append("ball residual exceeds t")
        # the dual functional certifies the lower bound: f(x) = t and f is <= 1 on 2^n W + a_n B
        if pair(g.functional, x) != g.lower:
            bad.append("dual functional does not attain the value")
        if any(Fraction(2) ** n * abs(pair(g.functional, w)) > 1 for w in gens):
            bad.append("dual functional exceeds 1 on 2^n W")
        if a * dual_norm(g.functional, params) > 1:
            bad.append("dual functional exceeds 1 on a_n B")
    return bad


def w_gauge(x: FinVec, gens: Sequence[FinVec]) -> Fraction | None:
    """inf{t : x in t W}, None when x is outside the span of the generators."""
    if not x:
        return Fraction(0)
    nodes = sorted(set(x.support()).union(*(g.support() for g in gens)), key=lambda n: (len(n), n))
    G = len(gens)
    A_eq = [[g[nd] for g in gens] + [-g[nd] for g in gens] for nd in nodes]
    res = linprog([1] * (2 * G), A_eq=A_eq, b_eq=[x[nd] for nd in nodes])
    if res.status == "infeasible":
        return None
    return res.value
