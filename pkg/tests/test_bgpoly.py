"""Weight polynomials f_i: recursion, the dyadic lemma, and the vanishing filter."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from extforge import bgpoly
from extforge.bgpoly import BGPolynomial, f, f_multi


def test_first_polynomials_verbatim():
    assert str(f(0)) == "1"
    assert str(f(1)) == "x"
    assert str(f(2)) == "t x + s t^2"
    assert str(f(3)) == "t x^2"
    assert str(f_multi([1, 1])) == "x^2"


def test_next_polynomials():
    # f_4 = t^2 f_2 + s t^3 f_1, f_5 = t^2 x f_2
    assert f(4) == BGPolynomial.variable(l=2) * f(2) + BGPolynomial.variable(k=1, l=3) * f(1)
    assert f(5) == BGPolynomial.variable(l=2, m=1) * f(2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200))
def test_recursion_identities(j):
    even = BGPolynomial.variable(l=j) * f(j) + BGPolynomial.variable(k=1, l=j + 1) * f(j - 1)
    assert f(2 * j) == even
    assert f(2 * j + 1) == BGPolynomial.variable(l=j, m=1) * f(j)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 256))
def test_lemma_items(i):
    report = bgpoly.check_lemma(i)
    assert report.ok, report


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 128))
def test_weight_homogeneity(i):
    # every monomial s^k t^l x^m of f_i has l + m = i
    for (k, l, m), c in f(i).coefficients:
        assert l + m == i and c > 0


def test_polynomial_arithmetic():
    x = BGPolynomial.variable(m=1)
    t = BGPolynomial.variable(l=1)
    assert (x + x).coefficient(0, 0, 1) == 2
    assert (x * t).coefficient(0, 1, 1) == 1
    assert BGPolynomial.zero() + x == x
    assert str(BGPolynomial.zero()) == "0"
    assert (x + x).evaluate_at_one() == 2


def test_negative_coefficients_rejected():
    try:
        BGPolynomial.from_dict({(0, 0, 0): -1})
    except ValueError:
        pass
    else:
        raise AssertionError("negative coefficients must be rejected")


def test_vanishing_filter_examples():
    assert bgpoly.a1_vanishing_filter(112, 26)
    # boundary at stem 112: edge s = 112/7 + 51/7 = 163/7, so 23 is out, 24 in
    assert Fraction(112, 7) + Fraction(51, 7) == Fraction(163, 7)
    assert not bgpoly.a1_vanishing_filter(112, 23)
    assert bgpoly.a1_vanishing_filter(112, 24)
    # the exact boundary point is NOT above the line
    assert not bgpoly.a1_vanishing_filter(19, 10)  # 19/7 + 51/7 = 10 exactly


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 300), st.integers(0, 80))
def test_vanishing_filter_monotone_in_s(stem, s):
    if bgpoly.a1_vanishing_filter(stem, s):
        assert bgpoly.a1_vanishing_filter(stem, s + 1)


def test_e1_window_enumerates_low_lines():
    window = ((0, 12), (0, 60))
    lines = bgpoly.e1_window(1, window)
    indices = [I for I, _ in lines]
    assert indices == [(1,), (2,), (3,), (4,), (5,), (6,), (7,)]
    # strictness: 8 * i must be strictly below the window's top stem
    window_tight = ((0, 12), (0, 20))
    assert [I for I, _ in bgpoly.e1_window(1, window_tight)] == [(1,), (2,)]


def test_summand_bottom_bidegrees():
    # f_2 = t x + s t^2: summands S^8 bo_1 and S^17 F2 with shift 1
    window = ((0, 20), (0, 80))
    enum = bgpoly.enumerate_summands((2,), window)
    bottoms = sorted(d.bottom_bidegree for d in enum.bo_terms)
    assert (0, 8) in bottoms and (1, 18) in bottoms
