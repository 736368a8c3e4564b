"""Finite graded modules over a profile algebra, given by dual coaction tables.

Every coefficient object here is a finite subspace of (a quotient of) the
polynomial dual algebra, spanned by monomials in the dual generators.  The
stored structure is the coaction rho(m) = sum m' (x) gamma with m' a basis
element and gamma a dual monomial of the profile algebra; the left action of
a Milnor monomial Sq(alpha) is then read off as the sum of the m' whose
gamma equals alpha.  That action lowers module degree, matching the Hom
complex grading used by the resolution engine (a class represented on a
generator of internal degree t_g by a module element of degree d sits in
internal degree t_g + d).

Constructors cover the coefficient systems needed for the chart
computations: weight-truncated Brown-Gitler pieces of A//A(1)* and
A//A(2)*, quotient duals like A(2)//A(1)*, degree truncations of the
positive part of A//A(2)*, tensor products, and duals.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import gf2
from .milnor import (
    FULL,
    A1,
    A2,
    MilnorElement,
    Profile,
    basis_in_degree,
    milnor_product,
    monomial_degree,
    monomial_sort_key,
    monomial_weight,
    normalize_monomial,
)

FORMAT_VERSION = 1


class ComoduleError(ValueError):
    pass


def _add_exponents(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    n = max(len(a), len(b))
    return normalize_monomial(
        tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))
    )


def _in_profile(profile: Profile, mono: tuple[int, ...]) -> bool:
    return profile.admits(mono)


@lru_cache(maxsize=None)
def _psi_generator_power(i: int, k: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """Coproduct of the (2^k)-th power of the i-th dual generator.

    psi(xi_i) = sum_j xi_{i-j}^{2^j} (x) xi_j, raised to the 2^k Frobenius.
    """
    out = []
    for j in range(i + 1):
        left = [0] * i
        if i - j > 0:
            left[i - j - 1] = 1 << (j + k)
        right = [0] * i
        if j > 0:
            right[j - 1] = 1 << k
        out.append((normalize_monomial(left), normalize_monomial(right)))
    return tuple(out)


@lru_cache(maxsize=None)
def psi_dual_monomial(mono: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """Full coproduct of a dual monomial in the free polynomial dual.

    Returns the mod-2 collected list of (left, right) exponent vectors.
    """
    mono = normalize_monomial(mono)
    terms: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {(): 1} if not mono else {}
    acc: set[tuple[tuple[int, ...], tuple[int, ...]]] = {((), ())}
    for i, e in enumerate(mono, start=1):
        k = 0
        while e:
            if e & 1:
                factor = _psi_generator_power(i, k)
                new: set = set()
                for l0, r0 in acc:
                    for l1, r1 in factor:
                        key = (_add_exponents(l0, l1), _add_exponents(r0, r1))
                        if key in new:
                            new.discard(key)
                        else:
                            new.add(key)
                acc = new
            e >>= 1
            k += 1
    return tuple(sorted(acc, key=lambda p: (monomial_sort_key(p[0]), monomial_sort_key(p[1]))))


@lru_cache(maxsize=None)
def conjugate_dual_generator(n: int) -> frozenset[tuple[int, ...]]:
    """Antipode of the n-th dual generator as a polynomial in the generators.

    Uses the recursion c_0 = 1, c_n = sum_{j=1..n} c_{n-j}^{2^j} xi_j, which
    rewrites the antipode axiom for the coproduct convention above.
    """
    if n == 0:
        return frozenset([()])
    acc: set[tuple[int, ...]] = set()
    for j in range(1, n + 1):
        xi_j = normalize_monomial([0] * (j - 1) + [1])
        for m in conjugate_dual_generator(n - j):
            term = _add_exponents(tuple(e << j for e in m), xi_j)
            if term in acc:
                acc.discard(term)
            else:
                acc.add(term)
    return frozenset(acc)


def conjugate_dual_monomial(profile: Profile, mono: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    """Antipode of a dual monomial, reduced in the profile quotient."""
    result: set[tuple[int, ...]] = {()}
    for i, e in enumerate(normalize_monomial(mono), start=1):
        k = 0
        while e:
            if e & 1:
                factor = [tuple(x << k for x in m) for m in conjugate_dual_generator(i)]
                new: set = set()
                for base in result:
                    for f in factor:
                        term = _add_exponents(base, normalize_monomial(f))
                        if not _in_profile(profile, term):
                            continue
                        if term in new:
                            new.discard(term)
                        else:
                            new.add(term)
                result = new
            e >>= 1
            k += 1
    return frozenset(result)


@dataclass(frozen=True)
class BasisElement:
    label: str
    degree: int
    weight: Optional[int] = None
    key: object = None


@dataclass(frozen=True)
class PoincareSeries:
    """Finitely supported degree -> count map."""

    coefficients: tuple[tuple[int, int], ...]

    @staticmethod
    def from_dict(d: dict[int, int]) -> "PoincareSeries":
        return PoincareSeries(tuple(sorted((k, v) for k, v in d.items() if v)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.coefficients)

    def coefficient(self, degree: int) -> int:
        return self.as_dict().get(degree, 0)

    def shift(self, k: int) -> "PoincareSeries":
        return PoincareSeries(tuple((d + k, c) for d, c in self.coefficients))

    def __add__(self, other: "PoincareSeries") -> "PoincareSeries":
        d = self.as_dict()
        for k, v in other.coefficients:
            d[k] = d.get(k, 0) + v
        return PoincareSeries.from_dict(d)

    def __mul__(self, other: "PoincareSeries") -> "PoincareSeries":
        d: dict[int, int] = {}
        for k1, v1 in self.coefficients:
            for k2, v2 in other.coefficients:
                d[k1 + k2] = d.get(k1 + k2, 0) + v1 * v2
        return PoincareSeries.from_dict(d)

    def top_degree(self) -> int:
        return max((d for d, _ in self.coefficients), default=0)


CoactionTerm = tuple[int, tuple[int, ...]]


class FiniteModule:
    """A finite comodule over the profile dual, i.e. a module over the algebra.

    ``coaction[i]`` lists (target index, dual monomial) pairs for basis
    element i; the pair (i, ()) is the counit term and is always present.
    """

    def __init__(
        self,
        algebra: Profile,
        basis: Sequence[BasisElement],
        coaction: Sequence[Sequence[CoactionTerm]],
        name: str = "",
        meta: Optional[dict] = None,
        validate: bool = True,
    ):
        if algebra.is_full:
            raise ComoduleError("finite modules require a finite profile algebra")
        order = sorted(range(len(basis)), key=lambda i: (basis[i].degree, basis[i].label))
        rank_of = {old: new for new, old in enumerate(order)}
        self.algebra = algebra
        self.basis: tuple[BasisElement, ...] = tuple(basis[i] for i in order)
        reordered: list[tuple[CoactionTerm, ...]] = []
        for i in order:
            terms = {}
            for tgt, mono in coaction[i]:
                key = (rank_of[tgt], normalize_monomial(mono))
                terms[key] = terms.get(key, 0) ^ 1
            reordered.append(tuple(sorted(k for k, v in terms.items() if v)))
        self.coaction: tuple[tuple[CoactionTerm, ...], ...] = tuple(reordered)
        self.name = name
        self.meta = dict(meta or {})
        self._by_degree: dict[int, tuple[int, ...]] = {}
        for idx, b in enumerate(self.basis):
            self._by_degree.setdefault(b.degree, ())
            self._by_degree[b.degree] += (idx,)
        self._act_cache: dict[tuple[tuple[int, ...], int], gf2.BitMatrix] = {}
        if validate:
            self.check_valid()

    # ----- structure -----

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_degree))

    def basis_in_degree(self, d: int) -> tuple[int, ...]:
        return self._by_degree.get(d, ())

    def dimension_in(self, d: int) -> int:
        return len(self.basis_in_degree(d))

    def poincare(self) -> PoincareSeries:
        return PoincareSeries.from_dict({d: len(v) for d, v in self._by_degree.items()})

    def top_degree(self) -> int:
        return max(self.degrees(), default=0)

    def bottom_degree(self) -> int:
        return min(self.degrees(), default=0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteModule)
            and self.algebra == other.algebra
            and [(b.label, b.degree, b.weight) for b in self.basis]
            == [(b.label, b.degree, b.weight) for b in other.basis]
            and self.coaction == other.coaction
        )

    def __repr__(self) -> str:
        return f"FiniteModule({self.name or 'unnamed'}, dim={self.dimension}, {self.algebra.describe()})"

    # ----- validity -----

    def check_valid(self) -> None:
        """Grading, counit, and coassociativity of the stored coaction."""
        for i, terms in enumerate(self.coaction):
            deg_i = self.basis[i].degree
            counit_hits = 0
            for tgt, mono in terms:
                if not _in_profile(self.algebra, mono):
                    raise ComoduleError(f"coaction of {self.basis[i].label} leaves the profile")
                if self.basis[tgt].degree + monomial_degree(mono) != deg_i:
                    raise ComoduleError(f"graded coaction violated at {self.basis[i].label}")
                if mono == ():
                    counit_hits += 1
                    if tgt != i:
                        raise ComoduleError(f"counit term of {self.basis[i].label} is off-diagonal")
            if counit_hits != 1:
                raise ComoduleError(f"counit axiom fails at {self.basis[i].label}")
        for i in range(len(self.basis)):
            lhs: set = set()
            for j, gamma in self.coaction[i]:
                for k, delta in self.coaction[j]:
                    key = (k, delta, gamma)
                    lhs.symmetric_difference_update({key})
            rhs: set = set()
            for k, mu in self.coaction[i]:
                for left, right in psi_dual_monomial(mu):
                    if _in_profile(self.algebra, left) and _in_profile(self.algebra, right):
                        key = (k, left, right)
                        rhs.symmetric_difference_update({key})
            if lhs != rhs:
                raise ComoduleError(f"coassociativity fails at {self.basis[i].label}")

    def verify_action(self, sample: Optional[int] = None, seed: int = 0) -> None:
        """Associativity of the derived action against the Milnor product.

        Checks a (x) (b (x) m) = (ab) (x) m for pairs of algebra basis
        monomials; all pairs when ``sample`` is None, else a deterministic
        sample of that size.
        """
        monos = [m for n in range(self.algebra.top_degree() + 1) for m in basis_in_degree(self.algebra, n)]
        pairs = list(itertools.product(monos, monos))
        if sample is not None and sample < len(pairs):
            rng = np.random.default_rng(seed)
            idx = rng.choice(len(pairs), size=sample, replace=False)
            pairs = [pairs[int(t)] for t in idx]
        for a_mono, b_mono in pairs:
            a = MilnorElement(self.algebra, frozenset([a_mono]))
            b = MilnorElement(self.algebra, frozenset([b_mono]))
            ab = milnor_product(a, b)
            for i in range(self.dimension):
                via_ab = self._act_element_on_index(ab, i)
                via_b = self._act_element_on_index(b, i)
                acc: set[int] = set()
                for j in via_b:
                    acc.symmetric_difference_update(self._act_element_on_index(a, j))
                if acc != via_ab:
                    raise ComoduleError(
                        f"action associativity fails: {a} * ({b} * {self.basis[i].label})"
                    )

    # ----- action -----

    def _act_monomial_on_index(self, mono: tuple[int, ...], i: int) -> set[int]:
        return {tgt for tgt, gamma in self.coaction[i] if gamma == mono}

    def _act_element_on_index(self, a: MilnorElement, i: int) -> set[int]:
        acc: set[int] = set()
        for mono in a.terms:
            acc.symmetric_difference_update(self._act_monomial_on_index(mono, i))
        return acc

    def action_matrix(self, a: MilnorElement, source_degree: int) -> gf2.BitMatrix:
        """Matrix of the action of ``a`` from degree d to degree d - |a|.

        Shape (dim in target degree) x (dim in source degree); columns are
        indexed by the canonical basis of the source degree.
        """
        if a.is_zero:
            return gf2.BitMatrix.zeros(0, len(self.basis_in_degree(source_degree)))
        target_degree = source_degree - (a.degree or 0)
        src = self.basis_in_degree(source_degree)
        tgt = self.basis_in_degree(target_degree)
        tgt_pos = {g: p for p, g in enumerate(tgt)}
        dense = np.zeros((len(tgt), len(src)), dtype=np.uint8)
        for col, i in enumerate(src):
            for j in self._act_element_on_index(a, i):
                dense[tgt_pos[j], col] ^= 1
        return gf2.BitMatrix.from_dense(dense)

    def monomial_action_matrix(self, mono: tuple[int, ...], source_degree: int) -> gf2.BitMatrix:
        key = (mono, source_degree)
        cached = self._act_cache.get(key)
        if cached is None:
            cached = self.action_matrix(
                MilnorElement(self.algebra, frozenset([mono])), source_degree
            )
            self._act_cache[key] = cached
        return cached

    def generator_action_matrix(self, k: int) -> gf2.BitMatrix:
        """Whole-module matrix for Sq(2^k): entry (i, j) set when basis j
        appears in Sq(2^k) acting on basis i."""
        dense = np.zeros((self.dimension, self.dimension), dtype=np.uint8)
        mono = normalize_monomial((1 << k,))
        for i in range(self.dimension):
            for j in self._act_monomial_on_index(mono, i):
                dense[i, j] ^= 1
        return gf2.BitMatrix.from_dense(dense)

    # ----- serialization -----

    def to_json_dict(self) -> dict:
        gens = {}
        if not self.algebra.is_full:
            for k in range(len(self.algebra.exponents or ())):
                mat = self.generator_action_matrix(k)
                gens[f"Sq{1 << k}"] = [list(mat.row_support(r)) for r in range(mat.rows)]
        return {
            "format_version": FORMAT_VERSION,
            "algebra": list(self.algebra.exponents or []),
            "name": self.name,
            "basis": [[b.label, b.degree, b.weight] for b in self.basis],
            "actions": gens,
            "coaction": [
                [[tgt, list(mono)] for tgt, mono in terms] for terms in self.coaction
            ],
        }

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=0, sort_keys=True)

    @staticmethod
    def from_json_dict(doc: dict, validate: bool = True) -> "FiniteModule":
        if doc.get("format_version") != FORMAT_VERSION:
            raise ComoduleError(f"unsupported module format {doc.get('format_version')}")
        algebra = Profile(tuple(doc["algebra"]))
        basis = [BasisElement(lbl, deg, wt) for lbl, deg, wt in doc["basis"]]
        if "coaction" in doc:
            coaction = [
                [(tgt, tuple(mono)) for tgt, mono in terms] for terms in doc["coaction"]
            ]
        else:
            coaction = _coaction_from_generator_actions(algebra, basis, doc["actions"])
        return FiniteModule(algebra, basis, coaction, name=doc.get("name", ""), validate=validate)

    @staticmethod
    def load_json(path, validate: bool = True) -> "FiniteModule":
        with open(path) as fh:
            return FiniteModule.from_json_dict(json.load(fh), validate=validate)


def _coaction_from_generator_actions(
    algebra: Profile, basis: Sequence[BasisElement], actions: dict
) -> list[list[CoactionTerm]]:
    """Rebuild the full coaction from generator action matrices alone.

    Every positive-degree basis monomial of the algebra is a sum of products
    generator * (lower monomial); the decomposition is solved degree by
    degree over GF(2), and the action of each monomial follows by composing
    the generator matrices.  The coaction then pairs each monomial action
    against the dual basis.
    """
    dim = len(basis)
    n_gens = len(algebra.exponents or ())
    gen_mats = []
    for k in range(n_gens):
        rows = actions.get(f"Sq{1 << k}", [])
        if len(rows) != dim:
            raise ComoduleError(f"generator Sq{1 << k} matrix has wrong row count")
        gen_mats.append(gf2.BitMatrix.from_support(dim, dim, rows))

    # action matrices (row-per-source convention) per algebra monomial
    act: dict[tuple[int, ...], gf2.BitMatrix] = {(): gf2.BitMatrix.identity(dim)}
    for degree in range(1, algebra.top_degree() + 1):
        monos = basis_in_degree(algebra, degree)
        if not monos:
            continue
        index = {m: p for p, m in enumerate(monos)}
        candidates: list[tuple[int, tuple[int, ...]]] = []
        rows = []
        for k in range(n_gens):
            g = 1 << k
            if g > degree:
                continue
            for m_low in basis_in_degree(algebra, degree - g):
                prod = milnor_product(
                    MilnorElement.sq(algebra, g), MilnorElement(algebra, frozenset([m_low]))
                )
                candidates.append((k, m_low))
                rows.append(sorted(index[t] for t in prod.terms))
        span = gf2.BitMatrix.from_support(len(rows), len(monos), rows)
        for m in monos:
            target = np.zeros(len(monos), dtype=np.uint8)
            target[index[m]] = 1
            combo = gf2.solve(span.transpose(), target)
            if combo is None:
                raise ComoduleError(f"monomial {m} is not decomposable; bad profile data")
            mat = gf2.BitMatrix.zeros(dim, dim)
            for pos in np.nonzero(combo)[0]:
                k, m_low = candidates[int(pos)]
                # row convention composes source-side first
                mat = mat.xor(gf2.multiply(act[m_low], gen_mats[k]))
            act[m] = mat
    coaction: list[list[CoactionTerm]] = [[] for _ in range(dim)]
    for mono, mat in act.items():
        for i in range(dim):
            for j in mat.row_support(i):
                coaction[i].append((j, mono))
    return coaction


# ----- constructors -----


def _label_for(mono: tuple[int, ...]) -> str:
    if not mono:
        return "1"
    return "".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(mono, 1) if e)


def dual_comodule_from_monomials(
    algebra: Profile,
    monomials: Iterable[tuple[int, ...]],
    name: str,
    left_kill: Optional[Profile] = None,
    meta: Optional[dict] = None,
) -> FiniteModule:
    """Span of dual monomials with the coproduct-induced coaction.

    Left tensor factors live in the module span (checked); right factors are
    projected to the profile dual.  ``left_kill`` additionally reduces left
    factors in a quotient dual (used for quotients like A(2)//A(1)*).
    """
    monos = sorted({normalize_monomial(m) for m in monomials}, key=monomial_sort_key)
    index = {m: i for i, m in enumerate(monos)}
    basis = [
        BasisElement(_label_for(m), monomial_degree(m), monomial_weight(m), key=m) for m in monos
    ]
    coaction: list[list[CoactionTerm]] = []
    for m in monos:
        terms: list[CoactionTerm] = []
        for left, right in psi_dual_monomial(m):
            if left_kill is not None and not _in_profile(left_kill, left):
                continue
            if not _in_profile(algebra, right):
                continue
            if left not in index:
                if right == () and left == m:
                    raise ComoduleError("span misses its own element")
                raise ComoduleError(
                    f"{name}: span is not a subcomodule; psi({m}) needs {left}"
                )
            terms.append((index[left], right))
        coaction.append(terms)
    return FiniteModule(algebra, basis, coaction, name=name, meta=meta)


def trivial(algebra: Profile = A2) -> FiniteModule:
    return dual_comodule_from_monomials(algebra, [()], name="trivial")


def suspend(M: FiniteModule, k: int) -> FiniteModule:
    basis = [BasisElement(b.label, b.degree + k, b.weight, b.key) for b in M.basis]
    return FiniteModule(
        M.algebra,
        basis,
        M.coaction,
        name=f"S^{k}({M.name})" if M.name else f"S^{k}",
        meta={**M.meta, "suspension": M.meta.get("suspension", 0) + k},
        validate=False,
    )


def direct_sum(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    if M.algebra != N.algebra:
        raise ComoduleError("algebra mismatch")
    basis = [BasisElement(f"L.{b.label}", b.degree, b.weight, b.key) for b in M.basis] + [
        BasisElement(f"R.{b.label}", b.degree, b.weight, b.key) for b in N.basis
    ]
    off = M.dimension
    coaction = [list(terms) for terms in M.coaction] + [
        [(tgt + off, mono) for tgt, mono in terms] for terms in N.coaction
    ]
    return FiniteModule(
        M.algebra, basis, coaction, name=f"{M.name}+{N.name}", validate=False
    )


def tensor(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    """Tensor product with the coproduct (Cartan) coaction."""
    if M.algebra != N.algebra:
        raise ComoduleError("algebra mismatch")
    pairs = list(itertools.product(range(M.dimension), range(N.dimension)))
    index = {p: i for i, p in enumerate(pairs)}
    basis = []
    for i, j in pairs:
        bi, bj = M.basis[i], N.basis[j]
        wt = None if bi.weight is None or bj.weight is None else bi.weight + bj.weight
        basis.append(
            BasisElement(f"{bi.label}|{bj.label}", bi.degree + bj.degree, wt, key=(bi.key, bj.key))
        )
    coaction: list[list[CoactionTerm]] = []
    for i, j in pairs:
        terms: dict[CoactionTerm, int] = {}
        for ti, gi in M.coaction[i]:
            for tj, gj in N.coaction[j]:
                prod = _add_exponents(gi, gj)
                if not _in_profile(M.algebra, prod):
                    continue
                key = (index[(ti, tj)], prod)
                terms[key] = terms.get(key, 0) ^ 1
        coaction.append([k for k, v in terms.items() if v])
    return FiniteModule(
        M.algebra, basis, coaction, name=f"{M.name}(x){N.name}", validate=False
    )


def dualize(M: FiniteModule) -> FiniteModule:
    """Linear dual, renormalized to start in degree 0.

    The dual coaction twists by the antipode; the recorded shift is the top
    degree of M, so dualizing twice restores the original degrees.
    """
    top = M.top_degree()
    basis = [
        BasisElement(f"d.{b.label}", top - b.degree, b.weight, key=("dual", b.key))
        for b in M.basis
    ]
    coaction: list[list[CoactionTerm]] = [[] for _ in range(M.dimension)]
    for i, terms in enumerate(M.coaction):
        for j, gamma in terms:
            for chi in conjugate_dual_monomial(M.algebra, gamma):
                coaction[j].append((i, chi))
    return FiniteModule(
        M.algebra,
        basis,
        coaction,
        name=f"dual({M.name})",
        meta={"dual_shift": top},
    )


def _filtered_monomials(
    steps: Callable[[int], int],
    weight_cap: Optional[int],
    degree_cap: Optional[int],
) -> list[tuple[int, ...]]:
    """Monomials with index-i exponents multiples of steps(i), bounded by the
    weight and/or degree caps (at least one cap required)."""
    if weight_cap is None and degree_cap is None:
        raise ValueError("need a weight or degree cap")
    max_i = 0
    while True:
        cand = max_i + 1
        step = steps(cand)
        w = step * (1 << (cand - 1))
        d = step * ((1 << cand) - 1)
        if weight_cap is not None and w > weight_cap:
            break
        if degree_cap is not None and d > degree_cap:
            break
        max_i = cand
        if max_i > 64:
            raise ValueError("runaway enumeration")
    out: list[tuple[int, ...]] = []

    def rec(i: int, acc: list[int], wt: int, deg: int):
        if i == 0:
            out.append(normalize_monomial(tuple(reversed(acc))))
            return
        step = steps(i)
        gen_w = step * (1 << (i - 1))
        gen_d = step * ((1 << i) - 1)
        e = 0
        while True:
            if weight_cap is not None and wt + e * gen_w > weight_cap:
                break
            if degree_cap is not None and deg + e * gen_d > degree_cap:
                break
            acc.append(e * step)
            rec(i - 1, acc, wt + e * gen_w, deg + e * gen_d)
            acc.pop()
            e += 1

    rec(max_i, [], 0, 0)
    return out


def bo(i: int, algebra: Profile = A2) -> FiniteModule:
    """Weight <= 4i monomials of the polynomial algebra on x1^4, x2^2, x3, ..."""
    if i < 0:
        raise ValueError("index must be non-negative")
    steps = lambda m: 4 if m == 1 else (2 if m == 2 else 1)
    monos = _filtered_monomials(steps, 4 * i, None)
    return dual_comodule_from_monomials(algebra, monos, name=f"bo{i}", meta={"weight_cap": 4 * i})


def tmf_bg(j: int, algebra: Profile = A2) -> FiniteModule:
    """Weight <= 8j monomials of the polynomial algebra on x1^8, x2^4, x3^2, x4, ..."""
    if j < 0:
        raise ValueError("index must be non-negative")
    steps = lambda m: {1: 8, 2: 4, 3: 2}.get(m, 1)
    monos = _filtered_monomials(steps, 8 * j, None)
    return dual_comodule_from_monomials(algebra, monos, name=f"tmf{j}", meta={"weight_cap": 8 * j})


def quotient_hopf_module(big: Profile, small: Profile) -> FiniteModule:
    """The dual of big//small as a module over big."""
    if big.is_full or small.is_full:
        raise ComoduleError("profiles must be finite")
    if not big.contains(small):
        raise ComoduleError("small must be a sub-profile of big")
    k = len(big.exponents or ())
    ranges = []
    for i in range(1, k + 1):
        step = 1 << small.exponent(i)
        bound = 1 << big.exponent(i)
        ranges.append(range(0, bound, step))
    monos = [normalize_monomial(t) for t in itertools.product(*ranges)]
    name = f"{big.describe()}//{small.describe()}*"
    return dual_comodule_from_monomials(big, monos, name=name, left_kill=big)


def abar_truncation(max_degree: int, algebra: Profile = A2) -> FiniteModule:
    """Positive-weight monomials of A//A(2)* in degrees <= max_degree.

    A finite stand-in for the positive part of A//A(2)*; charts computed
    against it are valid only for internal degrees below the cutoff.
    """
    if max_degree < 8:
        raise ValueError("cutoff below the first positive degree")
    steps = lambda m: {1: 8, 2: 4, 3: 2}.get(m, 1)
    monos = [m for m in _filtered_monomials(steps, None, max_degree) if m != ()]
    return dual_comodule_from_monomials(
        algebra,
        monos,
        name=f"abar<={max_degree}",
        meta={"truncation_degree": max_degree},
    )


# ----- verification reports -----


@dataclass(frozen=True)
class SplittingReport:
    max_degree: int
    ok: bool
    first_discrepancy: Optional[int]
    lhs: tuple[tuple[int, int], ...]
    rhs: tuple[tuple[int, int], ...]


def verify_splitting(max_degree: int) -> SplittingReport:
    """Compare the graded dimensions of the truncated positive part of
    A//A(2)* with the direct sum of 8i-suspended bo(i)."""
    target = abar_truncation(max_degree).poincare().as_dict()
    total: dict[int, int] = {}
    i = 1
    while 8 * i <= max_degree:
        p = bo(i).poincare().shift(8 * i)
        for d, c in p.coefficients:
            if d <= max_degree:
                total[d] = total.get(d, 0) + c
        i += 1
    bad = None
    for d in range(max_degree + 1):
        if total.get(d, 0) != target.get(d, 0):
            bad = d
            break
    return SplittingReport(
        max_degree,
        bad is None,
        bad,
        tuple(sorted(total.items())),
        tuple(sorted(target.items())),
    )


@dataclass(frozen=True)
class BoSequenceReport:
    j: int
    even_ok: bool
    odd_ok: bool
    even_defect: tuple[tuple[int, int], ...]
    odd_defect: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return self.even_ok and self.odd_ok


def verify_bo_sequence(j: int) -> BoSequenceReport:
    """Euler-characteristic identities of the two exact sequences relating
    bo(2j) and bo(2j+1) to bo(j), bo(j-1) and tmf-Brown-Gitler pieces."""
    if j < 1:
        raise ValueError("j must be positive")
    a2qa1 = quotient_hopf_module(A2, A1)
    mid = tensor(a2qa1, tmf_bg(j - 1))
    # even: 0 -> S^{8j} bo_j -> bo_{2j} -> mid -> S^{8j+9} bo_{j-1} -> 0
    even = (
        bo(j).poincare().shift(8 * j)
        + mid.poincare()
        + bo(2 * j).poincare() * PoincareSeries.from_dict({0: -1})
        + bo(j - 1).poincare().shift(8 * j + 9) * PoincareSeries.from_dict({0: -1})
    )
    # odd: 0 -> S^{8j} bo_j (x) bo_1 -> bo_{2j+1} -> mid -> 0
    odd = (
        tensor(bo(j), bo(1)).poincare().shift(8 * j)
        + mid.poincare()
        + bo(2 * j + 1).poincare() * PoincareSeries.from_dict({0: -1})
    )
    return BoSequenceReport(j, not even.coefficients, not odd.coefficients, even.coefficients, odd.coefficients)
