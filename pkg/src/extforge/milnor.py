"""The mod-2 Steenrod algebra and its finite sub-Hopf algebras, Milnor basis.

A profile (h_1, ..., h_k) bounds the dual generators: the dual of the
subalgebra cut out by it is F_2[xi_1, ..., xi_k] / (xi_i^{2^{h_i}}), where
xi_i denotes the degree 2^i - 1 polynomial generator of the dual Steenrod
algebra (conjugate convention).  A(n) has profile (n+1, n, ..., 1); the full
algebra is the unbounded profile.

Milnor monomials Sq(r_1, ..., r_k) are dual to the monomials
xi_1^{r_1} ... xi_k^{r_k}.  Products use the Milnor matrix formula with
multinomial coefficients evaluated mod 2 by the no-carry criterion; the
coproduct is the componentwise-split form dual to multiplying monomials in
the polynomial dual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Optional


@dataclass(frozen=True)
class Profile:
    """Exponent profile of a sub-Hopf algebra; ``None`` means the full algebra."""

    exponents: Optional[tuple[int, ...]]

    def __post_init__(self):
        if self.exponents is not None:
            if any(h <= 0 for h in self.exponents):
                raise ValueError("profile exponents must be positive")
            object.__setattr__(self, "exponents", tuple(self.exponents))

    @staticmethod
    def full() -> "Profile":
        return Profile(None)

    @staticmethod
    def subalgebra(n: int) -> "Profile":
        """A(n), with profile (n+1, n, ..., 1)."""
        if n < 0:
            raise ValueError("n must be non-negative")
        return Profile(tuple(range(n + 1, 0, -1)))

    @property
    def is_full(self) -> bool:
        return self.exponents is None

    def exponent(self, i: int) -> Optional[int]:
        """h_i for the i-th dual generator (1-indexed); None if unbounded."""
        if self.exponents is None:
            return None
        if i <= len(self.exponents):
            return self.exponents[i - 1]
        return 0

    def r_bound(self, i: int) -> Optional[int]:
        """Exclusive bound on the i-th Milnor entry; None if unbounded."""
        h = self.exponent(i)
        return None if h is None else 1 << h

    def admits(self, mono: tuple[int, ...]) -> bool:
        if self.exponents is None:
            return True
        return all(r < (1 << self.exponent(i + 1)) for i, r in enumerate(mono))

    def dimension(self) -> int:
        if self.exponents is None:
            raise ValueError("the full algebra is infinite-dimensional")
        return 1 << sum(self.exponents)

    def top_degree(self) -> int:
        if self.exponents is None:
            raise ValueError("the full algebra is unbounded")
        return sum(((1 << h) - 1) * ((1 << (i + 1)) - 1) for i, h in enumerate(self.exponents))

    def contains(self, other: "Profile") -> bool:
        """Whether ``other`` is a sub-profile (pointwise smaller exponents)."""
        if self.exponents is None:
            return True
        if other.exponents is None:
            return False
        length = max(len(self.exponents), len(other.exponents))
        return all(other.exponent(i) <= self.exponent(i) for i in range(1, length + 1))

    def describe(self) -> str:
        return "A" if self.exponents is None else "A" + repr(list(self.exponents))


A0 = Profile.subalgebra(0)
A1 = Profile.subalgebra(1)
A2 = Profile.subalgebra(2)
A3 = Profile.subalgebra(3)
FULL = Profile.full()


def xi_degree(i: int) -> int:
    """Degree of the i-th dual generator, 2^i - 1."""
    return (1 << i) - 1


def xi_weight(i: int) -> int:
    """Weight of the i-th dual generator, 2^{i-1}."""
    return 1 << (i - 1)


def monomial_degree(mono: tuple[int, ...]) -> int:
    return sum(r * xi_degree(i + 1) for i, r in enumerate(mono))


def monomial_weight(mono: tuple[int, ...]) -> int:
    return sum(r * xi_weight(i + 1) for i, r in enumerate(mono))


def normalize_monomial(mono: Iterable[int]) -> tuple[int, ...]:
    t = tuple(mono)
    while t and t[-1] == 0:
        t = t[:-1]
    if any(r < 0 for r in t):
        raise ValueError(f"negative Milnor entry in {t}")
    return t


def monomial_sort_key(mono: tuple[int, ...]):
    """Canonical order: length, then lexicographic."""
    return (len(mono), mono)


@dataclass(frozen=True)
class MilnorElement:
    """A mod-2 sum of Milnor monomials, all of one degree, over one algebra."""

    algebra: Profile
    terms: frozenset[tuple[int, ...]]

    def __post_init__(self):
        degs = {monomial_degree(m) for m in self.terms}
        if len(degs) > 1:
            raise ValueError(f"mixed degrees {sorted(degs)}")
        for m in self.terms:
            if m != normalize_monomial(m):
                raise ValueError(f"unnormalized monomial {m}")
            if not self.algebra.admits(m):
                raise ValueError(f"{m} violates profile {self.algebra.describe()}")

    @staticmethod
    def zero(algebra: Profile) -> "MilnorElement":
        return MilnorElement(algebra, frozenset())

    @staticmethod
    def unit(algebra: Profile) -> "MilnorElement":
        return MilnorElement(algebra, frozenset([()]))

    @staticmethod
    def sq(algebra: Profile, *entries: int) -> "MilnorElement":
        return MilnorElement(algebra, frozenset([normalize_monomial(entries)]))

    @staticmethod
    def from_monomials(algebra: Profile, monos: Iterable[tuple[int, ...]]) -> "MilnorElement":
        acc: set[tuple[int, ...]] = set()
        for m in monos:
            m = normalize_monomial(m)
            if m in acc:
                acc.discard(m)
            else:
                acc.add(m)
        return MilnorElement(algebra, frozenset(acc))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> Optional[int]:
        for m in self.terms:
            return monomial_degree(m)
        return None

    def sorted_terms(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(self.terms, key=monomial_sort_key))

    def augmentation(self) -> int:
        """Coefficient of the unit monomial Sq()."""
        return 1 if () in self.terms else 0

    def __add__(self, other: "MilnorElement") -> "MilnorElement":
        if self.algebra != other.algebra:
            raise ValueError("algebra mismatch")
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("cannot add elements of different degrees")
        return MilnorElement(self.algebra, self.terms ^ other.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("Sq(" + ",".join(map(str, m)) + ")" for m in self.sorted_terms())


@lru_cache(maxsize=None)
def basis_in_degree(algebra: Profile, n: int) -> tuple[tuple[int, ...], ...]:
    """All Milnor monomials of degree n over the profile, canonical order."""
    if n < 0:
        return ()
    if n == 0:
        return ((),)
    top = 1
    while xi_degree(top + 1) <= n:
        top += 1
    out: list[tuple[int, ...]] = []

    def rec(i: int, remaining: int, acc: list[int]):
        if i == 0:
            if remaining == 0:
                mono = normalize_monomial(tuple(reversed(acc)))
                if algebra.admits(mono):
                    out.append(mono)
            return
        d = xi_degree(i)
        r_max = remaining // d
        bound = algebra.r_bound(i)
        if bound is not None:
            r_max = min(r_max, bound - 1)
        for r in range(r_max + 1):
            acc.append(r)
            rec(i - 1, remaining - r * d, acc)
            acc.pop()

    rec(top, n, [])
    return tuple(sorted(out, key=monomial_sort_key))


def _multinomial_odd(parts: tuple[int, ...]) -> bool:
    """Whether (sum parts)! / prod(parts!) is odd: digits add with no carry."""
    total = sum(parts)
    return total == reduce(lambda a, b: a | b, parts, 0)


@lru_cache(maxsize=None)
def _product_monomials(algebra: Profile, r: tuple[int, ...], s: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    """Milnor matrix product of two basis monomials, as a set of monomials."""
    R, S = len(r), len(s)
    if R == 0:
        return frozenset([s])
    if S == 0:
        return frozenset([r])
    result: set[tuple[int, ...]] = set()
    # submatrix entries x[i][j] for i in 1..R, j in 1..S;
    # x_{i0} and x_{0j} are the row/column remainders
    col_used = [0] * (S + 1)

    def finish(x: list[list[int]]):
        x0 = [0] + [s[j - 1] - col_used[j] for j in range(1, S + 1)]
        if any(v < 0 for v in x0[1:]):
            return
        length = R + S
        t = [0] * (length + 1)
        coeff_ok = True
        for n in range(1, length + 1):
            parts = []
            for i in range(0, n + 1):
                j = n - i
                if i == 0:
                    if 1 <= j <= S:
                        parts.append(x0[j])
                elif 1 <= i <= R and 0 <= j <= S:
                    parts.append(x[i][j])
            parts_t = tuple(p for p in parts if p)
            if not _multinomial_odd(parts_t):
                coeff_ok = False
                break
            t[n] = sum(parts)
        if not coeff_ok:
            return
        mono = normalize_monomial(tuple(t[1:]))
        if not algebra.admits(mono):
            raise ValueError(
                f"product escapes profile {algebra.describe()}: {mono}; profile is not sub-Hopf"
            )
        if mono in result:
            result.discard(mono)
        else:
            result.add(mono)

    x = [[0] * (S + 1) for _ in range(R + 1)]

    def rec_row(i: int):
        if i > R:
            finish(x)
            return

        def rec_col(j: int, remaining: int):
            if j > S:
                x[i][0] = remaining
                rec_row(i + 1)
                return
            step = 1 << j
            max_here = remaining // step
            for v in range(max_here + 1):
                if col_used[j] + v > s[j - 1]:
                    break
                x[i][j] = v
                col_used[j] += v
                rec_col(j + 1, remaining - v * step)
                col_used[j] -= v
            x[i][j] = 0

        rec_col(1, r[i - 1])

    rec_row(1)
    return frozenset(result)


def milnor_product(a: MilnorElement, b: MilnorElement) -> MilnorElement:
    """Bilinear, associative, unital product in the Milnor basis."""
    if a.algebra != b.algebra:
        raise ValueError("algebra mismatch")
    acc: set[tuple[int, ...]] = set()
    for r in a.terms:
        for s in b.terms:
            for mono in _product_monomials(a.algebra, r, s):
                if mono in acc:
                    acc.discard(mono)
                else:
                    acc.add(mono)
    return MilnorElement(a.algebra, frozenset(acc))


@lru_cache(maxsize=None)
def coproduct(algebra: Profile, mono: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """All componentwise splits (a, b) with a + b = mono, canonical order.

    This is the coproduct dual to multiplication of dual monomials; for a
    sub-Hopf profile both tensor factors are automatically within bounds.
    """
    splits = []
    ranges = [range(r + 1) for r in mono]
    for a in itertools.product(*ranges):
        left = normalize_monomial(a)
        right = normalize_monomial(tuple(r - v for r, v in zip(mono, a)))
        if algebra.admits(left) and algebra.admits(right):
            splits.append((left, right))
    splits.sort(key=lambda p: (monomial_sort_key(p[0]), monomial_sort_key(p[1])))
    return tuple(splits)


def dual_pairing(mono: tuple[int, ...], dual_mono: tuple[int, ...]) -> int:
    """Kronecker pairing: Sq(r_1,...) hits exactly xi_1^{r_1} xi_2^{r_2} ..."""
    return 1 if normalize_monomial(mono) == normalize_monomial(dual_mono) else 0


@dataclass(frozen=True)
class DualElement:
    """A mod-2 sum of monomials in the dual generators, exponent-vector form."""

    terms: frozenset[tuple[int, ...]]

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        for m in self.terms:
            return monomial_degree(m)
        return None

    def weight(self) -> Optional[int]:
        for m in self.terms:
            return monomial_weight(m)
        return None


def poincare_series(algebra: Profile) -> dict[int, int]:
    """Graded dimensions of a finite profile algebra."""
    if algebra.exponents is None:
        raise ValueError("full algebra has no finite Poincare series")
    coeffs = {0: 1}
    for i, h in enumerate(algebra.exponents, start=1):
        new: dict[int, int] = {}
        for e in range(1 << h):
            d = e * xi_degree(i)
            for deg, c in coeffs.items():
                new[deg + d] = new.get(deg + d, 0) + c
        coeffs = new
    return coeffs


def indecomposable_degrees(algebra: Profile, max_degree: int) -> tuple[int, ...]:
    """Degrees with indecomposables, computed from A+ . A+ per degree.

    For a profile algebra the answer is the degrees 2^i of the generators
    Sq(2^i); this computes it honestly as a cross-check hook.
    """
    degs = []
    for n in range(1, max_degree + 1):
        basis_n = basis_in_degree(algebra, n)
        if not basis_n:
            continue
        index = {m: k for k, m in enumerate(basis_n)}
        decomposable: set[frozenset] = set()
        span_rows = []
        for a in range(1, n):
            for ma in basis_in_degree(algebra, a):
                for mb in basis_in_degree(algebra, n - a):
                    prod = _product_monomials(algebra, ma, mb)
                    if prod:
                        span_rows.append(frozenset(index[m] for m in prod))
        from . import gf2

        if span_rows:
            mat = gf2.BitMatrix.from_support(len(span_rows), len(basis_n), [sorted(r) for r in span_rows])
            rk = gf2.rank(mat)
        else:
            rk = 0
        if rk < len(basis_n):
            degs.append(n)
    return tuple(degs)
