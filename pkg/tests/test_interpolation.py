from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hispace.interpolation import (ParameterExhaustion, SigmaRegistry, athin_probe, block_source,
                                   build_dependent_sequence, diagonal_norm_bounds, even_only, in_L_even,
                                   sigma_violations, toy_dependent_params, verify_dependent_estimates)
from hispace.kernel import FinVec
from hispace.treespace import TreeParams, initial_segments, segment_vector
from hispace.tsirelson import CertLeaf, CertNode, MTParams

DY = TreeParams(3, "dyadic")
GENS = [segment_vector(s, DY) for s in initial_segments(DY)]

histories = st.lists(st.lists(st.tuples(st.sampled_from("abcdef"), st.integers(0, 12)), min_size=1, max_size=4),
                     min_size=1, max_size=60)


@given(histories)
@settings(max_examples=60, deadline=None)
def test_sigma_properties(hs):
    reg = SigmaRegistry()
    weights = {}
    for h in hs:
        h = [(f"{name}{j}", j) for name, j in h]
        weights.update(dict(h))
        reg.next(h)
    assert not sigma_violations(reg, weights)


def test_sigma_snapshot_replay():
    reg = SigmaRegistry()
    a = reg.next([("f", 3)])
    b = reg.next([("f", 3), ("g", 1)])
    again = SigmaRegistry.from_snapshot(reg.snapshot())
    assert again.code([("f", 3)]) == a and again.code([("f", 3), ("g", 1)]) == b
    assert a == 4 and b == 6


def test_even_only_certificates():
    p = toy_dependent_params(2, 2)
    e = even_only(p)
    assert len(e) == len(p)
    assert in_L_even(CertNode(2, Fraction(1, 2), (CertLeaf(1), CertLeaf(2))))
    assert not in_L_even(CertNode(3, Fraction(1, 2), (CertLeaf(1), CertLeaf(2))))


def test_dependent_needs_j_at_least_two():
    with pytest.raises(ValueError):
        build_dependent_sequence(block_source(), block_source(), 1, toy_dependent_params(2), SigmaRegistry())


def test_dependent_parameter_exhaustion():
    p = toy_dependent_params(2, 2, families=6)
    with pytest.raises(ParameterExhaustion):
        build_dependent_sequence(block_source(), block_source(), 2, p, SigmaRegistry())


def test_dependent_sequence_report():
    p = toy_dependent_params(2, 2)
    reg = SigmaRegistry()
    seq = build_dependent_sequence(block_source(), block_source(), 2, p, reg)
    assert not seq.violations(reg)
    rep = seq.theta_report()
    assert rep["derived_ok"]
    a, b = verify_dependent_estimates(seq)
    assert a["status"] == "holds"
    assert b["status"] == "not-applicable"
    assert set(b["witness"]) >= {"K_upper", "L_lower", "growth_flags"}


def test_diagonal_bounds_contain_truncation():
    x = GENS[5]
    d = diagonal_norm_bounds(x, GENS, lambda n: Fraction(1, 2 ** n), MTParams(["A2"], ["1/2"]), DY, 3)
    assert d.lower <= d.upper and d.tail == d.rho_W / 8
    assert max(d.per_coordinate) <= d.lower


def test_athin_probe_trends():
    rows = athin_probe([GENS[1], FinVec({(): 1, (1,): -1})], GENS, lambda n: Fraction(1, 2 ** n), DY, 4)
    assert rows[0]["trend"] == "decreasing"
    assert all(len(r["values"]) == 4 for r in rows)
