from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hispace.kernel import (FinVec, Interval, as_fraction, index_from_json, index_to_json, pair, restrict,
                            vec_from_json, vec_to_dict, vec_to_json)
from hispace.lpcompare import LogExponent, compare_exponents, lp_power_sum, min_exponent, mixed_tsirelson_exponent

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nat_vecs = st.dictionaries(st.integers(1, 30), fractions, max_size=10).map(FinVec)
nodes = st.lists(st.integers(0, 3), max_size=4).map(tuple)
tree_vecs = st.dictionaries(nodes, fractions, max_size=8).map(FinVec)


def test_zero_entries_dropped():
    x = FinVec({1: 0, 2: Fraction(1, 2)})
    assert x.support() == [2]
    assert not FinVec({3: 0})


def test_floats_rejected():
    with pytest.raises((TypeError, ValueError)):
        as_fraction(0.5)


@given(nat_vecs, nat_vecs)
def test_pairing_is_bilinear(x, y):
    assert pair(x + y, y) == pair(x, y) + pair(y, y)
    assert pair(x * 3, y) == 3 * pair(x, y)


@given(nat_vecs)
def test_elementary_norms(x):
    assert x.linf() <= x.l1() <= len(x) * x.linf()


@given(nat_vecs, st.integers(1, 30), st.integers(1, 30))
def test_restrict_interval_partitions(x, a, b):
    lo, hi = min(a, b), max(a, b)
    inside = restrict(x, Interval(lo, hi))
    outside = restrict(x, lambda i: not lo <= i <= hi)
    assert inside + outside == x


@given(nat_vecs)
def test_json_round_trip_naturals(x):
    assert vec_from_json(vec_to_json(x)) == x
    assert vec_from_json(vec_to_dict(x)) == x


@given(tree_vecs)
def test_json_round_trip_tree(x):
    assert vec_from_json(vec_to_json(x)) == x


@given(nodes)
def test_node_addresses(n):
    assert index_from_json(index_to_json(n)) == n


def test_root_address_is_empty_string():
    assert index_to_json(()) == ""
    assert index_from_json("3.0.7") == (3, 0, 7)


def test_interval_successive():
    assert Interval(1, 3) < Interval(4, 4)
    assert not Interval(1, 3) < Interval(3, 5)
    assert Interval.EMPTY < Interval(1, 1)


def test_exponents():
    assert mixed_tsirelson_exponent(3, 9) == 2
    assert isinstance(mixed_tsirelson_exponent(2, 3), LogExponent)
    assert compare_exponents(mixed_tsirelson_exponent(2, 3), Fraction(2)) > 0
    assert min_exponent([mixed_tsirelson_exponent(2, 3), Fraction(2)]) == 2


@given(nat_vecs, st.fractions(min_value=0, max_value=50, max_denominator=7))
def test_lp_comparison_matches_direct_square(x, r):
    # ||x||_2 >= r  iff  sum x_i^2 >= r^2
    assert lp_power_sum(x, Fraction(2)).ge(r) == (sum(v * v for _, v in x.items()) >= r * r)
