"""Finite module layer: constructors, Cartan tensor action, exact-sequence checks."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extforge import milnor, modules


def test_trivial_module():
    triv = modules.trivial(milnor.A2)
    assert triv.dimension == 1
    assert triv.degrees() == (0,)
    triv.check_valid()


def test_bo1_basis_degrees():
    # weight <= 4 part of A//A(1)*: 1, xi1^4, xi2^2, xi3
    bo1 = modules.bo(1)
    assert {d: bo1.dimension_in(d) for d in bo1.degrees()} == {0: 1, 4: 1, 6: 1, 7: 1}
    bo1.check_valid()
    bo1.verify_action()


def test_bo_weight_filtration_nested():
    # bo_i is the weight <= 4i stage; each stage contains the previous one
    prev: dict[int, int] = {}
    for i in (1, 2, 3):
        cur = modules.bo(i).poincare().as_dict()
        for d, n in prev.items():
            assert cur.get(d, 0) >= n
        prev = cur


def test_tmf_bg_smallest():
    t1 = modules.tmf_bg(1)
    assert t1.dimension == 5
    t1.check_valid()


def test_quotient_hopf_module_dimension():
    q = modules.quotient_hopf_module(milnor.A2, milnor.A1)
    assert q.dimension == milnor.A2.dimension() // milnor.A1.dimension()
    q.check_valid()
    q.verify_action()


def test_abar_truncation_low_degrees():
    # positive-degree part of A//A(2)*: first generators at 8, 12, 14, 15
    ab = modules.abar_truncation(15)
    assert {d: ab.dimension_in(d) for d in ab.degrees()} == {8: 1, 12: 1, 14: 1, 15: 1}


def test_suspend_shifts_degrees():
    bo1 = modules.bo(1)
    up = modules.suspend(bo1, 8)
    assert sorted(up.degrees()) == [d + 8 for d in sorted(bo1.degrees())]
    assert up.dimension == bo1.dimension
    up.verify_action()


def test_direct_sum_poincare_adds():
    a, b = modules.bo(1), modules.tmf_bg(1)
    s = modules.direct_sum(a, b)
    pa, pb, ps = (m.poincare().as_dict() for m in (a, b, s))
    for d in set(pa) | set(pb):
        assert ps.get(d, 0) == pa.get(d, 0) + pb.get(d, 0)
    s.verify_action()


def test_tensor_poincare_multiplies():
    a, b = modules.bo(1), modules.bo(1)
    t = modules.tensor(a, b)
    pa, pb, pt = (m.poincare().as_dict() for m in (a, b, t))
    for d in pt:
        conv = sum(pa.get(i, 0) * pb.get(d - i, 0) for i in pa)
        assert pt[d] == conv
    # Cartan coassociativity of the action is what verify_action certifies
    t.verify_action()


def test_tensor_action_is_cartan():
    # Sq acts on a (x) b through the coproduct; spot-check bottom classes
    bo1 = modules.bo(1)
    t = modules.tensor(bo1, bo1)
    t.check_valid()
    # degree-8 piece of bo1 (x) bo1 is spanned by x4 (x) x4: Sq(4)-image of x4 (x) x0 + x0 (x) x4
    m = t.monomial_action_matrix((4,), 4)
    assert m.rows == t.dimension_in(0) and m.cols == t.dimension_in(4)


def test_dualize_mirrors_dimensions():
    bo1 = modules.bo(1)
    d = modules.dualize(bo1)
    top = bo1.top_degree()
    for deg in bo1.degrees():
        assert d.dimension_in(top - deg) == bo1.dimension_in(deg)
    d.verify_action()
    dd = modules.dualize(d)
    assert dd.poincare().as_dict() == bo1.poincare().as_dict()


def test_splitting_through_48():
    report = modules.verify_splitting(48)
    assert report.ok, report


def test_bo_sequences():
    for j in (1, 2, 3):
        report = modules.verify_bo_sequence(j)
        assert report.ok, report


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 6))
def test_bo_dimension_matches_weight_count(i):
    """bo_i dimension equals the count of A//A(1)* monomials of weight <= 4i.

    Independent count: monomials xi1^(4a) xi2^(2b) xi3^c xi4^d ... with
    wt(xi_k) = 2^(k-1); the weight cap alone bounds the enumeration.
    """
    from itertools import product as iproduct

    cap = 4 * i
    ranges = []
    for k in range(1, cap.bit_length() + 2):
        step = 4 if k == 1 else 2 if k == 2 else 1
        unit_weight = milnor.xi_weight(k)
        hi = cap // (step * unit_weight) * step if step * unit_weight <= cap else 0
        ranges.append(range(0, hi + 1, step))
    count = sum(
        1
        for exps in iproduct(*ranges)
        if sum(e * milnor.xi_weight(k + 1) for k, e in enumerate(exps)) <= cap
    )
    assert modules.bo(i).dimension == count


def test_module_json_roundtrip():
    bo2 = modules.bo(2)
    doc = bo2.to_json_dict()
    back = modules.FiniteModule.from_json_dict(doc)
    assert back.poincare().as_dict() == bo2.poincare().as_dict()
    assert back.name == bo2.name
    back.verify_action()


def test_action_matrix_lowers_degree():
    """Action matrices map degree d to degree d - |a| (homology grading)."""
    bo1 = modules.bo(1)
    m = bo1.monomial_action_matrix((1,), 7)  # Sq(1) on the degree-7 line
    assert m.cols == bo1.dimension_in(7)
    assert m.rows == bo1.dimension_in(6)
