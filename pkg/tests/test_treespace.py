import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hispace.kernel import FinVec
from hispace.treespace import (ExactnessUnavailable, Segment, TreeParams, ToleranceUnreachable, W0Element,
                               branch_vector, coefficient, dual_norm, gauge, gauge_violations,
                               incomparable_partition, initial_segments, norming_certificate, segment_vector,
                               split_band, split_property_one, split_property_two, w_gauge, xa_norm)
from hispace.verify import partition_instance, random_lambdas

DY = TreeParams(3, "dyadic")


def test_margin_validation():
    assert TreeParams(3, base=8).margin == Fraction(5, 14)
    with pytest.raises(ValueError):
        TreeParams(3, base=5)  # 1/2 - 1/4 is not > 1/4


def test_coefficients():
    tp = TreeParams(3, base=8)
    assert coefficient((), tp) == 0
    assert coefficient((3, 64), tp) == 1
    with pytest.raises(ValueError):
        branch_vector((9,), tp)


def test_initial_segment_count():
    assert len(initial_segments(DY)) == 15


@given(st.lists(st.tuples(st.integers(0, 3), st.fractions(-3, 3, max_denominator=5)), max_size=6))
def test_level_norms_ordered(entries):
    f = FinVec({(1,) * k: v for k, v in entries})
    c0 = xa_norm(f, TreeParams(3, "dyadic", level_norm="c0"))
    l1 = xa_norm(f, TreeParams(3, "dyadic", level_norm="l1"))
    lo, hi = xa_norm(f, TreeParams(3, "dyadic", level_norm="lp", p=2), exact=False, tol=Fraction(1, 10 ** 6))
    assert c0 <= lo <= hi <= l1
    assert hi - lo <= Fraction(1, 10 ** 6)


def test_lp_exact_mode_refused():
    with pytest.raises(ExactnessUnavailable):
        xa_norm(FinVec({(0,): 1}), TreeParams(2, "dyadic", level_norm="lp", p=2))


def test_polyhedral_matches_max_of_rows():
    tp = TreeParams(2, "dyadic", level_norm="polyhedral", functionals=((1, 1, 0), (0, 1, 2)))
    f = FinVec({(): 1, (0,): 2, (0, 1): -1})
    assert xa_norm(f, tp) == 4
    assert dual_norm(FinVec({(): Fraction(1, 2)}), tp) == Fraction(1, 2)


def test_w0_validation():
    with pytest.raises(ValueError):
        W0Element(((Fraction(2, 3), Segment((), (0,))), (Fraction(1, 2), Segment((), (1,)))), DY)
    with pytest.raises(TypeError):
        W0Element(((Fraction(1, 2), FinVec({(): 1})),), DY)


@pytest.mark.parametrize("tp", [TreeParams(4, base=8), TreeParams(4, base=81, level_norm="l1"),
                                TreeParams(5, "dyadic"),
                                TreeParams(3, base=8, level_norm="polyhedral",
                                           functionals=((1, 1, 0, 0), (0, 1, 1, 1)))])
def test_norming_certificates(tp):
    rng = random.Random(3)
    for _ in range(40):
        c = norming_certificate(random_lambdas(rng, tp.depth), tp)
        assert c.holds
        assert xa_norm(branch_vector(c.branch, tp), tp) <= 1


def test_split_properties():
    rng = random.Random(8)
    tp = TreeParams(5, "dyadic")
    for _ in range(30):
        phi = FinVec({tuple(rng.randint(0, 1) for _ in range(k)): Fraction(rng.randint(0, 3), 4) for k in range(6)})
        hi = tuple(rng.randint(0, 1) for _ in range(5))
        w = W0Element(((Fraction(1, 2), Segment((), hi)), (Fraction(-1, 3), Segment(hi[:1], hi[:4]))), tp)
        nodes = set(phi.support()) | set(Segment((), hi).nodes())
        s = split_band((1, 3), phi, Fraction(1, 4), tp, nodes)
        assert s.E1.isdisjoint(s.E2)
        d = Segment((), hi)
        prop = split_property_two(s, phi, d, tp)
        if prop is not None:
            assert prop[1]
        split_property_one(s, phi, w)


def test_partition_examples():
    tp = TreeParams(6, "dyadic")
    w = W0Element(((Fraction(1, 2), Segment((), (0, 1))),), tp)
    xstar = FinVec({(0,): Fraction(1, 2)})
    P = incomparable_partition([(0, 1)], [w], xstar, Fraction(1, 2), tp)
    assert P.N == 1 and P.ok
    with pytest.raises(ValueError):
        incomparable_partition([(0, 2), (2, 3)], [w, w], xstar, Fraction(1, 2), tp)


@pytest.mark.parametrize("seed", range(20))
def test_partition_random(seed):
    P = incomparable_partition(*partition_instance(seed, adversarial=seed % 3 == 0))
    assert P.ok


def test_gauge_decomposition_and_dual():
    gens = [segment_vector(s, DY) for s in initial_segments(DY)]
    x = FinVec({(): 1, (0,): Fraction(1, 2), (1, 1): -1})
    for n in range(1, 4):
        g = gauge(x, gens, n, Fraction(1, 2 ** n), DY)
        assert not gauge_violations(x, gens, n, Fraction(1, 2 ** n), DY, g)
    assert w_gauge(gens[3], gens) == 1
    assert w_gauge(FinVec({(): 1, (1,): 3}), [segment_vector(Segment((), ()), DY)]) is None


def test_gauge_lp_level_bounds():
    tp = TreeParams(3, "dyadic", level_norm="lp", p=2)
    gens = [segment_vector(s, tp) for s in initial_segments(tp)]
    x = FinVec({(0,): 1, (1,): 1})
    g = gauge(x, gens, 1, Fraction(1, 2), tp)
    assert not g.exact and g.lower <= g.upper
    with pytest.raises(ToleranceUnreachable):
        gauge(x, gens, 1, Fraction(1, 2), tp, tol=Fraction(0))
