"""Reproducible verification suites.

Every claim is reported as {claim, paper_ref, status, lhs, rhs, witness} with
status one of holds, fails, not-applicable, budget-exceeded.  ``paper_ref``
names the estimate being exercised in words.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .families import (AverageTooLarge, MTooShort, Ordinal, Schreier, SizeFamily, admissible,
                       family_member, ra_violations, repeated_averages, stability_reindex)
from .interpolation import (SigmaRegistry, block_source, build_dependent_sequence,
                            diagonal_norm_bounds, sigma_violations, toy_dependent_params,
                            verify_dependent_estimates)
from .kernel import FinVec, fraction_to_json
from .treespace import (TreeParams, W0Element, Segment, gauge, incomparable_partition,
                        initial_segments, norming_certificate, segment_vector)
from .tsirelson import (CertLeaf, CertNode, MTParams, build_average, build_ris, check_interval_splits,
                        check_ris_action, check_upper_p, iteration_bound, mt_norm)

SUITES = ("families", "tsirelson", "tree", "interpolation")


def claim(text: str, ref: str, status: str, lhs=None, rhs=None, witness=None) -> dict:
    def enc(v):
        return fraction_to_json(v) if isinstance(v, Fraction) else v
    return {"claim": text, "paper_ref": ref, "status": status, "lhs": enc(lhs), "rhs": enc(rhs),
            "witness": witness}


def _holds(ok: bool) -> str:
    return "holds" if ok else "fails"


# -- families --------------------------------------------------------------------------

def infinite_set_model(seed: int, length: int) -> list[int]:
    """A prefix of a seeded infinite subset of N (random gaps 1..3)."""
    rng = random.Random(seed)
    out, pos = [], rng.randint(1, 3)
    while len(out) < length:
        out.append(pos)
        pos += rng.randint(1, 3)
    return out


def ra_case(xi, M, n: int, budget: int) -> dict:
    """Properties 1-3 on xi_1..xi_n and stability under every reindexing of 1..n."""
    label = f"xi={xi}, n={n}, M starts {M[:3]}"
    try:
        avgs = repeated_averages(xi, M, n, budget=budget)
    except AverageTooLarge as e:
        return claim(f"repeated averages {label}", "repeated-averages properties",
                     "budget-exceeded", witness=str(e))
    except MTooShort as e:
        return claim(f"repeated averages {label}", "repeated-averages properties",
                     "budget-exceeded", witness=str(e))
    bad = ra_violations(avgs)
    reidx_bad = []
    for mask in range(1, 2 ** n):
        nks = [k + 1 for k in range(n) if mask >> k & 1]
        if not stability_reindex(xi, M, nks, budget=budget):
            reidx_bad.append(nks)
    ok = not bad and not reidx_bad
    return claim(f"repeated averages {label}", "repeated-averages properties", _holds(ok),
                 witness={"violations": bad, "reindex_failures": reidx_bad,
                          "support_sizes": [len(a.vector) for a in avgs]})


def suite_families(seed: int = 0, budget: int = 200_000) -> list[dict]:
    out = []
    out.append(claim("{5} in S_0", "Schreier base family", _holds(family_member({5}, Schreier(Ordinal(0, 0))))))
    out.append(claim("{2,3} in S_1 and {1,2} not", "Schreier successor step",
                     _holds(family_member({2, 3}, "S1") and not family_member({1, 2}, "S1"))))
    adm = admissible([{2}, {3}], "S1")
    out.append(claim("({2},{3}) is S_1-admissible with witness {2,3}", "admissible sequences",
                     _holds(adm.ok and adm.witness == (2, 3))))
    # adequacy and spreading on a window
    window = range(1, 11)
    fams = [SizeFamily(2), SizeFamily(3), Schreier(Ordinal(0, 1)), Schreier(Ordinal(0, 2))]
    bad = []
    for fam in fams:
        for mask in range(1, 2 ** len(window)):
            F = [i for i in window if mask >> (i - 1) & 1]
            if not family_member(F, fam):
                continue
            for drop in F:
                if not family_member([i for i in F if i != drop], fam):
                    bad.append((str(fam), F, "adequacy"))
            shifted = [i + 1 for i in F]
            if not family_member(shifted, fam):
                bad.append((str(fam), F, "spreading"))
    out.append(claim("families are hereditary and spreading on [1,10]", "compact adequate families",
                     _holds(not bad), witness=bad[:5]))
    rng = random.Random(seed)
    for xi in ("0", "1", "2", "w"):
        for model in range(3):
            M = infinite_set_model(rng.randint(0, 10 ** 6), 4096)
            n = 5 if xi in ("0", "1") else 2
            out.append(ra_case(xi, M, n, budget))
    return out


# -- tsirelson --------------------------------------------------------------------------

def random_blocks(rng: random.Random, count: int, start: int = 1) -> list[FinVec]:
    out, pos = [], start
    for _ in range(count):
        w = rng.randint(1, 3)
        out.append(FinVec({pos + i: Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 3]))
                           for i in range(w)}))
        pos += w + rng.randint(0, 1)
    return out


def random_vector(rng: random.Random, support: int, window: int = 30) -> FinVec:
    idx = rng.sample(range(1, window + 1), support)
    return FinVec({i: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 6)) for i in idx})


def suite_tsirelson(seed: int = 0, budget: int = 100) -> list[dict]:
    out = []
    rng = random.Random(seed)
    x = FinVec.from_list([1, 1, 1])
    v, _ = mt_norm(x, MTParams(["A3"], ["1/2"]))
    out.append(claim("||e1+e2+e3|| = 3/2 for (A_3,1/2)", "implicit norm equation", _holds(v == Fraction(3, 2)),
                     v, Fraction(3, 2)))
    v, _ = mt_norm(x, MTParams(["A2"], ["2/3"]))
    out.append(claim("||e1+e2+e3|| = 14/9 for (A_2,2/3)", "implicit norm equation", _holds(v == Fraction(14, 9)),
                     v, Fraction(14, 9)))
    p = MTParams(["A3", "A9"], ["1/2", "1/3"])
    fails = []
    for _ in range(budget):
        y = random_vector(rng, rng.randint(1, 12))
        rep = check_upper_p(y, p)
        if not rep.holds:
            fails.append(y)
    out.append(claim(f"|x|_j <= ||x||_p on {budget} random vectors", "upper l_p estimate",
                     _holds(not fails), witness={"p": str(rep.p), "failures": len(fails)}))
    toy = MTParams.from_scheme([2, 2], [3, 9])
    worst = Fraction(0)
    for _ in range(20):
        res = build_average(random_blocks(rng, 12), 2, toy)
        for n in range(1, toy.n(1) + 1):
            worst = max(worst, check_interval_splits(res.vector, n, toy).max_sum)
    out.append(claim("sum ||E_i x|| <= 2 over n <= n_(j-1) splits", "interval splits of averages",
                     _holds(worst <= 2), worst, Fraction(2)))
    for label, sch in (("large scheme j=1", ([2, 32], [3, 3 ** 16], [16])), ("toy j=1", ([4, 3], [2, 8], [3]))):
        q = MTParams.from_scheme(*sch)
        bound = iteration_bound(1, q)
        ok, levels = True, []
        for _ in range(20):
            res = build_average(random_blocks(rng, 40), 1, q)
            levels.append(res.level)
            ok = ok and res.norm >= Fraction(1, 2) and res.level <= bound
        out.append(claim(f"averaging terminates within the bound ({label})", "seminormalized averages",
                         _holds(ok), max(levels), bound, {"levels": levels}))
    q = MTParams.from_scheme([2, 2, 2, 4], [2, 2, 2, 2])
    ris = build_ris([FinVec.basis(i) for i in range(1, 30)], 2, q, bound=None)
    avg = ris.average()
    reps = []
    for fam in range(1, len(q) + 1):
        leaves = tuple(CertLeaf(i) for i in avg.support()[: q.n(fam)])
        reps.append(check_ris_action(ris, CertNode(fam, q.thetas[fam - 1], leaves)))
    ok = all(r.holds for r in reps)
    statuses = {r.case: r.status for r in reps}
    out.append(claim("RIS action bounds on a toy RIS", "action of weighted functionals on RIS averages",
                     _holds(ok) if q.growth_ok or ok else "not-applicable",
                     witness={"cases": statuses, "norm_check": {k: str(v) for k, v in reps[-1].norm_check.items()}}))
    return out


# -- tree -----------------------------------------------------------------------------

def random_lambdas(rng: random.Random, depth: int) -> dict:
    lams = {}
    while not lams:
        lams = {k: Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for k in range(1, depth + 1)
                if rng.random() < 0.7}
        lams = {k: v for k, v in lams.items() if v}
    return lams


def suite_tree(seed: int = 0, budget: int = 50) -> list[dict]:
    out = []
    rng = random.Random(seed)
    trees = [TreeParams(4, "coefficient", base=b, level_norm=ln) for b in (8, 16, 81) for ln in ("c0", "l1")]
    trees.append(TreeParams(4, "dyadic"))
    worst = None
    for _ in range(budget):
        for tp in trees:
            c = norming_certificate(random_lambdas(rng, tp.depth), tp)
            if not c.holds:
                worst = c
    margins = [tp.margin for tp in trees if tp.kind == "coefficient"]
    out.append(claim("|y*(x_gamma)| > ||y*||/4", "quarter-norming tree functionals", _holds(worst is None)))
    out.append(claim("1/2 - sum 1/b_k > 1/4 for every configured branching", "rounding margin",
                     _holds(all(m > Fraction(1, 4) for m in margins)), min(margins), Fraction(1, 4)))
    bad = []
    for s in range(30):
        inst = partition_instance(rng.randint(0, 10 ** 6), adversarial=s % 2 == 1)
        P = incomparable_partition(*inst)
        if not P.ok:
            bad.append(s)
    out.append(claim("incomparable partition satisfies (1)(2)(3)", "finite incomparability",
                     _holds(not bad), witness=bad))
    tp = TreeParams(3, "dyadic")
    gens = [segment_vector(s, tp) for s in initial_segments(tp)]
    worst_ratio = Fraction(0)
    for n in range(1, 9):
        for w in gens:
            g = gauge(w, gens, n, Fraction(1, 2 ** n), tp)
            worst_ratio = max(worst_ratio, g.value * 2 ** n)
    out.append(claim("gauge_n(w) <= 2^-n for every generator, n <= 8", "gauges of 2^n W + a_n B",
                     _holds(worst_ratio <= 1), worst_ratio, Fraction(1)))
    return out


def partition_instance(seed: int, adversarial: bool = False, depth: int = 12):
    rng = random.Random(seed)
    tp = TreeParams(depth, "dyadic")
    bands, lvl = [], 0
    for _ in range(rng.randint(1, 5)):
        w = rng.randint(0, 1)
        if lvl + w > depth:
            break
        bands.append((lvl, lvl + w))
        lvl += w + 1 + rng.randint(0, 1)
    trunk = tuple(rng.randint(0, 1) for _ in range(depth))
    ws = []
    for m, M in bands:
        terms, left = [], Fraction(1)
        for _ in range(rng.randint(1, 3)):
            hi = trunk[:M] if adversarial else tuple(rng.randint(0, 1) for _ in range(M))
            lam = Fraction(rng.randint(1, 4), rng.randint(4, 8)) * rng.choice([1, -1])
            if abs(lam) > left:
                break
            left -= abs(lam)
            terms.append((lam, Segment(hi[:rng.randint(0, m)], hi)))
        ws.append(W0Element(tuple(terms), tp))
    nodes = [trunk[:k] for k in range(depth + 1)]
    raw = [Fraction(rng.randint(0, 3)) for _ in nodes]
    tot = sum(raw) or 1
    xstar = FinVec({n: v / tot for n, v in zip(nodes, raw) if v})
    eps = Fraction(1, rng.choice([2, 3, 4, 5]))
    return bands, ws, xstar, eps, tp


# -- interpolation ------------------------------------------------------------------------

def random_history_functionals(rng: random.Random, pool: int = 40) -> list:
    return [(f"f{i}", rng.randint(0, 30)) for i in range(pool)]


def sigma_property_run(seed: int, allocations: int) -> tuple[list[str], int]:
    rng = random.Random(seed)
    reg = SigmaRegistry()
    funcs = random_history_functionals(rng)
    weights = {k: j for k, j in funcs}
    for _ in range(allocations):
        hist = [rng.choice(funcs) for _ in range(rng.randint(1, 4))]
        reg.next(hist)
    return sigma_violations(reg, weights), len(reg)


def suite_interpolation(seed: int = 0, budget: int = 10_000) -> list[dict]:
    out = []
    bad, size = sigma_property_run(seed, budget)
    out.append(claim(f"sigma injective, above j, prefix-monotone ({budget} allocations)", "sigma coding",
                     _holds(not bad), witness={"violations": bad[:5], "codes": size}))
    rng = random.Random(seed)
    for j, n_odd in ((2, 1), (2, 2), (2, 3), (3, 2), (3, 3)):
        p = toy_dependent_params(j, n_odd)
        reg = SigmaRegistry()
        r = random.Random(rng.randint(0, 10 ** 6))
        seq = build_dependent_sequence(block_source(1, width=lambda k: r.randint(1, 2)), block_source(1),
                                       j, p, reg)
        v = seq.violations(reg)
        if v:
            out.append(claim(f"dependent sequence j={j}, n={n_odd}", "dependent sequences", "fails", witness=v))
        out.extend(verify_dependent_estimates(seq))
    tp = TreeParams(3, "dyadic")
    gens = [segment_vector(s, tp) for s in initial_segments(tp)]
    worst = Fraction(0)
    for w in gens:
        d = diagonal_norm_bounds(w, gens, lambda n: Fraction(1, 2 ** n), MTParams(["A2"], ["1/2"]), tp, 3)
        worst = max(worst, d.upper)
    out.append(claim("diagonal norm of a generator <= 1", "diagonal embedding of W", _holds(worst <= 1),
                     worst, Fraction(1)))
    return out


def run_suite(name: str, seed: int = 0, budget: int | None = None) -> list[dict]:
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, seed, budget)]
    fn = {"families": suite_families, "tsirelson": suite_tsirelson, "tree": suite_tree,
          "interpolation": suite_interpolation}.get(name)
    if fn is None:
        raise ValueError(f"unknown suite {name!r}")
    return fn(seed) if budget is None else fn(seed, budget)
