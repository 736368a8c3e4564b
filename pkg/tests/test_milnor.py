"""Milnor-basis arithmetic: profiles, bases, and the product."""

from hypothesis import given, settings
from hypothesis import strategies as st

from extforge import milnor
from extforge.milnor import MilnorElement, Profile


def test_profile_dimensions():
    assert milnor.A1.dimension() == 8
    assert milnor.A2.dimension() == 64
    assert milnor.A3.dimension() == 2 ** (4 + 3 + 2 + 1)
    assert milnor.A1.top_degree() == 6
    assert milnor.A2.top_degree() == 23
    assert milnor.FULL.is_full


def test_profile_containment_chain():
    assert milnor.A2.contains(milnor.A1)
    assert milnor.A3.contains(milnor.A2)
    assert milnor.FULL.contains(milnor.A3)
    assert not milnor.A1.contains(milnor.A2)


def test_profile_exponents():
    # A(n) has profile (n+1, n, ..., 1): xi_i truncated at height 2^(n+2-i)
    assert milnor.A2.exponents == (3, 2, 1)
    assert milnor.A2.r_bound(1) == 8
    assert milnor.A2.r_bound(2) == 4
    assert milnor.A2.r_bound(3) == 2
    assert milnor.A2.r_bound(4) == 1
    assert milnor.FULL.exponent(1) is None
    assert milnor.A2.admits((7, 3, 1)) and not milnor.A2.admits((8,))


def test_basis_counts_by_degree():
    total = sum(len(milnor.basis_in_degree(milnor.A2, n)) for n in range(24))
    assert total == 64
    assert milnor.basis_in_degree(milnor.A2, 0) == ((),)
    assert milnor.basis_in_degree(milnor.A2, 1) == ((1,),)
    # degree 3: Sq(3) and Sq(0,1)
    assert set(milnor.basis_in_degree(milnor.A2, 3)) == {(3,), (0, 1)}


def test_known_small_products():
    A = milnor.FULL
    sq = lambda *e: MilnorElement.sq(A, *e)
    # Sq(1)Sq(1) = 0, Sq(1)Sq(2) = Sq(3), Sq(2)Sq(2) = Sq(1,1)
    assert milnor.milnor_product(sq(1), sq(1)).is_zero
    assert milnor.milnor_product(sq(1), sq(2)).sorted_terms() == ((3,),)
    assert milnor.milnor_product(sq(2), sq(2)).sorted_terms() == ((1, 1),)
    # Sq(2)Sq(1) = Sq(3) + Sq(0,1)
    assert set(milnor.milnor_product(sq(2), sq(1)).sorted_terms()) == {(3,), (0, 1)}


def test_product_respects_profile_truncation():
    # in A(1) the product Sq(3) * Sq(3) truncates away the xi_1^6 part
    full = milnor.milnor_product(
        MilnorElement.sq(milnor.FULL, 3), MilnorElement.sq(milnor.FULL, 3)
    )
    small = milnor.milnor_product(
        MilnorElement.sq(milnor.A1, 3), MilnorElement.sq(milnor.A1, 3)
    )
    assert set(small.sorted_terms()) <= set(full.sorted_terms())
    for mono in small.sorted_terms():
        assert milnor.A1.admits(mono)


@st.composite
def homogeneous_elements(draw, algebra: Profile, max_degree: int):
    """A single-degree mod-2 sum of basis monomials, possibly zero."""
    degree = draw(st.integers(0, max_degree))
    monos = milnor.basis_in_degree(algebra, degree)
    if not monos:
        return MilnorElement.zero(algebra)
    picked = draw(st.sets(st.sampled_from(monos), min_size=0, max_size=3))
    return MilnorElement.from_monomials(algebra, picked)


@settings(max_examples=60, deadline=None)
@given(homogeneous_elements(milnor.A2, 8), homogeneous_elements(milnor.A2, 8))
def test_product_is_degree_additive(a, b):
    prod = milnor.milnor_product(a, b)
    if not prod.is_zero:
        assert prod.degree == a.degree + b.degree


@settings(max_examples=40, deadline=None)
@given(
    homogeneous_elements(milnor.A2, 6),
    homogeneous_elements(milnor.A2, 6),
    homogeneous_elements(milnor.A2, 6),
)
def test_product_associative(a, b, c):
    left = milnor.milnor_product(milnor.milnor_product(a, b), c)
    right = milnor.milnor_product(a, milnor.milnor_product(b, c))
    assert left.sorted_terms() == right.sorted_terms()


@settings(max_examples=60, deadline=None)
@given(homogeneous_elements(milnor.A2, 10))
def test_unit_laws(a):
    one = MilnorElement.unit(milnor.A2)
    assert milnor.milnor_product(one, a).sorted_terms() == a.sorted_terms()
    assert milnor.milnor_product(a, one).sorted_terms() == a.sorted_terms()


def test_monomial_degree_and_weight():
    # xi_i has degree 2^i - 1 and weight 2^(i-1)
    assert milnor.xi_degree(1) == 1 and milnor.xi_degree(3) == 7
    assert milnor.xi_weight(1) == 1 and milnor.xi_weight(3) == 4
    assert milnor.monomial_degree((2, 1)) == 2 * 1 + 3
    assert milnor.monomial_weight((2, 1)) == 2 * 1 + 2


def test_normalize_strips_trailing_zeros():
    assert milnor.normalize_monomial([1, 0, 2, 0, 0]) == (1, 0, 2)
    assert milnor.normalize_monomial([0, 0]) == ()


def test_mixed_degree_sums_rejected():
    try:
        MilnorElement.from_monomials(milnor.A1, [(), (1,)])
    except ValueError:
        pass
    else:
        raise AssertionError("mixed-degree element must be rejected")


def test_augmentation_counts_unit():
    assert MilnorElement.unit(milnor.A1).augmentation() == 1
    assert MilnorElement.sq(milnor.A1, 1).augmentation() == 0
    assert MilnorElement.zero(milnor.A1).augmentation() == 0
