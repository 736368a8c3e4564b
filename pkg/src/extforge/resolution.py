"""Minimal free resolutions, Ext charts, chain maps, and mapping cones.

Grading conventions used throughout:

- A free complex stores, per homological level s, a list of generators with
  internal degrees t; differentials lower s by one and preserve t.
- The minimal resolution of the trivial module has Ext dimensions equal to
  generator counts; for other coefficients, Ext^{s,t} is the cohomology of
  the Hom complex whose (s,t)-cochains assign to a level-s generator g an
  element of the coefficient module in degree t - t_g, with differential
  (delta phi)(g') = sum a_{h,g'} * phi(h) through the degree-lowering module
  action.
- A cone over a class theta at (s0, t0) doubles the complex: level s becomes
  block1 (the base) plus block2 (the base from level s - (s0-1), internal
  degrees raised by t0), with differential d(x, y) = (dx, phi(x) + dy) for a
  chain map phi lifting theta.  Each base cell (stem, filt) reappears in
  block2 at (stem + t0 - s0 + 1, filt + s0 - 1).
- Charts are indexed by (s, t); renderers translate to (stem, filtration) =
  (t - s, s).

Class provenance on cone charts uses the cell filtration of the Hom complex
(the differential never lowers the cell index, so cochains vanishing above a
cell form a subcomplex): a class is carried by the lowest cell j such that
some representative vanishes on all generators of higher cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import gf2
from .milnor import MilnorElement, Profile, basis_in_degree, milnor_product
from .modules import FiniteModule

RESOLUTION_FORMAT_VERSION = 1


class ResolutionError(ValueError):
    pass


class LiftError(RuntimeError):
    pass


# ----- multiplication matrices on the algebra -----

_mul_cache: dict[tuple, np.ndarray] = {}


def _mono_positions(algebra: Profile, d: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(basis_in_degree(algebra, d))}


def _mono_degree(mono: tuple[int, ...]) -> int:
    return sum(e * ((1 << i) - 1) for i, e in enumerate(mono, 1))


def _rmul_dense(algebra: Profile, mono: tuple[int, ...], d: int) -> np.ndarray:
    """Matrix of x -> x * mono from degree d, columns over the degree-d basis."""
    key = ("r", algebra.exponents, mono, d)
    out = _mul_cache.get(key)
    if out is None:
        src = basis_in_degree(algebra, d)
        tgt_pos = _mono_positions(algebra, d + _mono_degree(mono))
        out = np.zeros((len(tgt_pos), len(src)), dtype=np.uint8)
        b = MilnorElement(algebra, frozenset([mono]))
        for j, m in enumerate(src):
            prod = milnor_product(MilnorElement(algebra, frozenset([m])), b)
            for term in prod.terms:
                out[tgt_pos[term], j] ^= 1
        out.setflags(write=False)
        _mul_cache[key] = out
    return out


def _lmul_dense(algebra: Profile, mono: tuple[int, ...], d: int) -> np.ndarray:
    """Matrix of x -> mono * x from degree d."""
    key = ("l", algebra.exponents, mono, d)
    out = _mul_cache.get(key)
    if out is None:
        src = basis_in_degree(algebra, d)
        tgt_pos = _mono_positions(algebra, d + _mono_degree(mono))
        out = np.zeros((len(tgt_pos), len(src)), dtype=np.uint8)
        a = MilnorElement(algebra, frozenset([mono]))
        for j, m in enumerate(src):
            prod = milnor_product(a, MilnorElement(algebra, frozenset([m])))
            for term in prod.terms:
                out[tgt_pos[term], j] ^= 1
        out.setflags(write=False)
        _mul_cache[key] = out
    return out


# ----- free complexes -----


@dataclass(frozen=True)
class Cell:
    label: str
    stem: int
    filt: int


@dataclass(frozen=True)
class Gen:
    t: int
    cell: int


DiffRow = tuple[tuple[int, MilnorElement], ...]


@dataclass(frozen=True)
class AttachingRecord:
    s0: int
    t0: int
    class_coords: tuple[int, ...]
    chart_dim: int


class FreeComplex:
    """A bounded free complex with cell bookkeeping.

    ``gens[s]`` lists the level-s generators; ``diff[s][i]`` gives the rows
    of d(gens[s][i]) as (target index at level s-1, MilnorElement) pairs.
    """

    def __init__(
        self,
        algebra: Profile,
        max_s: int,
        max_t: int,
        cells: Sequence[Cell],
        gens: Sequence[Sequence[Gen]],
        diff: Sequence[Sequence[DiffRow]],
        attachings: Sequence[AttachingRecord] = (),
    ):
        self.algebra = algebra
        self.max_s = max_s
        self.max_t = max_t
        self.cells = tuple(cells)
        self.gens = [list(level) for level in gens]
        self.diff = [list(level) for level in diff]
        self.attachings = tuple(attachings)
        self._coords_cache: dict[tuple[int, int], tuple[tuple[int, ...], int]] = {}
        self._matrix_cache: dict[tuple[int, int], gf2.BitMatrix] = {}
        self._solver_cache: dict[tuple[int, int], gf2.Solver] = {}

    # --- free module coordinates at (s, t): per-generator blocks ---

    def level_gens(self, s: int) -> tuple[Gen, ...]:
        return tuple(self.gens[s]) if 0 <= s < len(self.gens) else ()

    def block_layout(self, s: int, t: int) -> tuple[tuple[int, ...], int]:
        """Offsets of each generator's coordinate block and the total size."""
        key = (s, t)
        got = self._coords_cache.get(key)
        if got is None:
            offsets = []
            total = 0
            for g in self.level_gens(s):
                offsets.append(total)
                d = t - g.t
                if d >= 0:
                    total += len(basis_in_degree(self.algebra, d))
            got = (tuple(offsets), total)
            self._coords_cache[key] = got
        return got

    def free_dim(self, s: int, t: int) -> int:
        return self.block_layout(s, t)[1]

    def vector_to_rows(self, s: int, t: int, vec: np.ndarray) -> DiffRow:
        """Read a coordinate vector back as (generator, element) pairs."""
        offsets, _ = self.block_layout(s, t)
        row: list[tuple[int, MilnorElement]] = []
        for h, g in enumerate(self.level_gens(s)):
            d = t - g.t
            if d < 0:
                continue
            monos = basis_in_degree(self.algebra, d)
            seg = vec[offsets[h] : offsets[h] + len(monos)]
            terms = frozenset(monos[int(j)] for j in np.nonzero(seg)[0])
            if terms:
                row.append((h, MilnorElement(self.algebra, terms)))
        return tuple(row)

    def diff_dense(self, s: int, t: int) -> np.ndarray:
        """Dense matrix of d: level s -> level s-1 in internal degree t."""
        rows_off, rows_total = self.block_layout(s - 1, t)
        cols_off, cols_total = self.block_layout(s, t)
        dense = np.zeros((rows_total, cols_total), dtype=np.uint8)
        for i, g in enumerate(self.level_gens(s)):
            d_src = t - g.t
            if d_src < 0:
                continue
            for h, a in self.diff[s][i]:
                for mono in a.terms:
                    block = _rmul_dense(self.algebra, mono, d_src)
                    r0 = rows_off[h]
                    c0 = cols_off[i]
                    dense[r0 : r0 + block.shape[0], c0 : c0 + block.shape[1]] ^= block
        return dense

    def diff_matrix(self, s: int, t: int) -> gf2.BitMatrix:
        key = (s, t)
        got = self._matrix_cache.get(key)
        if got is None:
            got = gf2.BitMatrix.from_dense(self.diff_dense(s, t))
            self._matrix_cache[key] = got
        return got

    def diff_solver(self, s: int, t: int) -> gf2.Solver:
        key = (s, t)
        got = self._solver_cache.get(key)
        if got is None:
            got = gf2.Solver(self.diff_matrix(s, t))
            self._solver_cache[key] = got
        return got

    def apply_element(self, a: MilnorElement, s: int, t: int, vec: np.ndarray) -> np.ndarray:
        """Left-multiply a degree-t coordinate vector of level s by a."""
        t_out = t + (a.degree or 0)
        out = np.zeros(self.free_dim(s, t_out), dtype=np.uint8)
        if a.is_zero:
            return out
        offs_in, _ = self.block_layout(s, t)
        offs_out, _ = self.block_layout(s, t_out)
        for i, g in enumerate(self.level_gens(s)):
            d = t - g.t
            if d < 0:
                continue
            width = len(basis_in_degree(self.algebra, d))
            if width == 0:
                continue
            seg = vec[offs_in[i] : offs_in[i] + width]
            if not seg.any():
                continue
            for mono in a.terms:
                block = _lmul_dense(self.algebra, mono, d)
                out[offs_out[i] : offs_out[i] + block.shape[0]] ^= (block @ seg) % 2
        return out

    def verify_d_squared(self, t_limit: Optional[int] = None) -> None:
        limit = self.max_t if t_limit is None else t_limit
        for s in range(2, len(self.gens)):
            for t in range(limit + 1):
                if self.free_dim(s, t) == 0:
                    continue
                prod = gf2.multiply(self.diff_matrix(s - 1, t), self.diff_matrix(s, t))
                if not prod.is_zero():
                    raise ResolutionError(f"d^2 != 0 at level {s}, degree {t}")

    def to_json_dict(self) -> dict:
        return {
            "format_version": RESOLUTION_FORMAT_VERSION,
            "algebra": list(self.algebra.exponents) if self.algebra.exponents is not None else None,
            "max_s": self.max_s,
            "max_t": self.max_t,
            "cells": [[c.label, c.stem, c.filt] for c in self.cells],
            "gens": [[[g.t, g.cell] for g in level] for level in self.gens],
            "diff": [
                [
                    [[h, [list(m) for m in sorted(a.terms)]] for h, a in row]
                    for row in level
                ]
                for level in self.diff
            ],
            "attachings": [
                [r.s0, r.t0, list(r.class_coords), r.chart_dim] for r in self.attachings
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FreeComplex":
        if doc.get("format_version") != RESOLUTION_FORMAT_VERSION:
            raise ResolutionError(f"unsupported resolution format {doc.get('format_version')}")
        algebra = Profile(tuple(doc["algebra"]) if doc["algebra"] is not None else None)
        gens = [[Gen(t, c) for t, c in level] for level in doc["gens"]]
        diff = [
            [
                tuple(
                    (h, MilnorElement(algebra, frozenset(tuple(m) for m in monos)))
                    for h, monos in row
                )
                for row in level
            ]
            for level in doc["diff"]
        ]
        cells = [Cell(lbl, stem, filt) for lbl, stem, filt in doc["cells"]]
        attach = [AttachingRecord(s0, t0, tuple(cc), cd) for s0, t0, cc, cd in doc["attachings"]]
        klass: type = FreeResolution if len(cells) == 1 and not attach else CellObject
        return klass(algebra, doc["max_s"], doc["max_t"], cells, gens, diff, attach)


class FreeResolution(FreeComplex):
    """Minimal resolution of the trivial module (single 0-cell)."""

    def generator_degrees(self, s: int) -> tuple[int, ...]:
        return tuple(g.t for g in self.level_gens(s))

    def verify_minimal(self) -> None:
        for s in range(1, len(self.gens)):
            for i, g in enumerate(self.gens[s]):
                for h, a in self.diff[s][i]:
                    if not a.is_zero and self.gens[s - 1][h].t == g.t:
                        raise ResolutionError(
                            f"unit coefficient from level-{s} generator t={g.t}"
                        )


class CellObject(FreeComplex):
    """Iterated mapping cone realized as an honest free complex."""


def minimal_resolution(algebra: Profile, max_s: int, max_t: int) -> FreeResolution:
    """Minimal free resolution of the trivial module through (max_s, max_t).

    Generators are created in ascending internal degree, then ascending
    level; within one (s, t), new generators are the canonical kernel basis
    vectors not already reached by the differential, in kernel-basis order.
    """
    if max_s <= 0 or max_t < 0:
        raise ResolutionError("bounds must be positive")
    gens: list[list[Gen]] = [[Gen(0, 0)]] + [[] for _ in range(max_s)]
    diff: list[list[DiffRow]] = [[()]] + [[] for _ in range(max_s)]
    res = FreeResolution(algebra, max_s, max_t, [Cell("0", 0, 0)], gens, diff)

    for t in range(1, max_t + 1):
        # dense differential matrices per level at this degree, extended in
        # place when generators appear
        dense_at: dict[int, np.ndarray] = {}
        for s in range(1, max_s + 1):
            if s == 1:
                kernel_rows = np.eye(res.free_dim(0, t), dtype=np.uint8)
            else:
                mat = dense_at.get(s - 1)
                if mat is None:
                    mat = res.diff_dense(s - 1, t)
                kernel_rows = gf2.kernel_basis(gf2.BitMatrix.from_dense(mat)).to_dense()
            image = res.diff_dense(s, t)
            if kernel_rows.shape[0] == 0:
                dense_at[s] = image
                continue
            span = gf2.IncrementalSpan(kernel_rows.shape[1])
            for col in range(image.shape[1]):
                span.add(image[:, col])
            new_cols: list[np.ndarray] = []
            for v in kernel_rows:
                if not span.add(v):
                    continue
                res.gens[s].append(Gen(t, 0))
                res.diff[s].append(res.vector_to_rows(s - 1, t, v))
                new_cols.append(v)
            if new_cols:
                res._coords_cache.clear()
                res._matrix_cache.clear()
                res._solver_cache.clear()
                image = np.concatenate([image, np.stack(new_cols, axis=1)], axis=1)
            dense_at[s] = image
    return res


# ----- Ext charts -----


@dataclass
class ExtChart:
    algebra: str
    coefficients: str
    max_s: int
    max_t: int
    dims: dict[tuple[int, int], int] = field(default_factory=dict)
    labels: dict[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)
    provenance: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    cells: tuple[Cell, ...] = ()
    products: dict[str, dict[tuple[int, int], gf2.BitMatrix]] = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    # runtime-only handles for product installation and class arithmetic
    source: Optional[FreeComplex] = field(default=None, repr=False, compare=False)
    module: Optional[FiniteModule] = field(default=None, repr=False, compare=False)
    reps: dict[tuple[int, int], "CohomologyLocal"] = field(
        default_factory=dict, repr=False, compare=False
    )

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def nonzero(self) -> list[tuple[int, int]]:
        return sorted(self.dims)

    def product_shift(self, name: str) -> tuple[int, int]:
        return NAMED_CLASS_BIDEGREES[name]

    def to_json_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "coefficients": self.coefficients,
            "max_s": self.max_s,
            "max_t": self.max_t,
            "dims": [[s, t, d] for (s, t), d in sorted(self.dims.items())],
            "labels": [[s, t, list(v)] for (s, t), v in sorted(self.labels.items())],
            "provenance": [[s, t, list(v)] for (s, t), v in sorted(self.provenance.items())],
            "cells": [[c.label, c.stem, c.filt] for c in self.cells],
            "products": {
                name: [
                    [s, t, [sorted(m.row_support(r)) for r in range(m.rows)], m.cols]
                    for (s, t), m in sorted(mats.items())
                ]
                for name, mats in self.products.items()
            },
            "notes": self.notes,
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "ExtChart":
        chart = ExtChart(
            algebra=doc["algebra"],
            coefficients=doc["coefficients"],
            max_s=doc["max_s"],
            max_t=doc["max_t"],
        )
        chart.dims = {(s, t): d for s, t, d in doc["dims"]}
        chart.labels = {(s, t): tuple(v) for s, t, v in doc["labels"]}
        chart.provenance = {(s, t): tuple(v) for s, t, v in doc["provenance"]}
        chart.cells = tuple(Cell(lbl, stem, filt) for lbl, stem, filt in doc["cells"])
        chart.products = {
            name: {
                (s, t): gf2.BitMatrix.from_support(len(rows), cols, rows)
                for s, t, rows, cols in entries
            }
            for name, entries in doc["products"].items()
        }
        chart.notes = dict(doc["notes"])
        return chart


@dataclass
class CohomologyLocal:
    """Cocycles, coboundaries, and canonical class representatives at (s,t)."""

    cocycles: np.ndarray
    boundary_span: gf2.IncrementalSpan
    rep_vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.rep_vectors.shape[0]

    def class_coords(self, vec: np.ndarray) -> np.ndarray:
        """Coordinates of a cocycle's class in the representative basis."""
        if self.dim == 0:
            if self.boundary_span.rank and not self.boundary_span.contains(vec):
                raise ResolutionError("vector is not a coboundary at a zero spot")
            return np.zeros(0, dtype=np.uint8)
        nb = self.boundary_span.rank
        parts = []
        if nb:
            parts.append(np.stack(self.boundary_span.rows, axis=0))
        parts.append(self.rep_vectors)
        stacked = np.concatenate(parts, axis=0)
        sol = gf2.solve(gf2.BitMatrix.from_dense(stacked).transpose(), vec % 2)
        if sol is None:
            raise ResolutionError("vector is not a cocycle class in range")
        return sol[nb:]


def _hom_layout(cplx: FreeComplex, M: FiniteModule, s: int, t: int):
    """Coordinate offsets of Hom^{s,t}: per-generator blocks of M at t - t_g."""
    offsets = []
    total = 0
    for g in cplx.level_gens(s):
        offsets.append(total)
        total += M.dimension_in(t - g.t)
    return offsets, total


def _hom_delta_dense(
    cplx: FreeComplex, M: FiniteModule, s: int, t: int, dense_cache: Optional[dict] = None
) -> np.ndarray:
    """Matrix of delta: Hom^{s,t} -> Hom^{s+1,t}."""
    src_off, src_total = _hom_layout(cplx, M, s, t)
    tgt_off, tgt_total = _hom_layout(cplx, M, s + 1, t)
    dense = np.zeros((tgt_total, src_total), dtype=np.uint8)
    if s + 1 >= len(cplx.gens):
        return dense
    for gp in range(len(cplx.gens[s + 1])):
        if M.dimension_in(t - cplx.gens[s + 1][gp].t) == 0:
            continue
        for h, a in cplx.diff[s + 1][gp]:
            d_src = t - cplx.gens[s][h].t
            if M.dimension_in(d_src) == 0:
                continue
            for mono in a.terms:
                # keyed by module identity too: callers may share one cache
                # across charts with different coefficients
                key = (id(M), mono, d_src)
                bd = None if dense_cache is None else dense_cache.get(key)
                if bd is None:
                    bd = M.monomial_action_matrix(mono, d_src).to_dense()
                    if dense_cache is not None:
                        dense_cache[key] = bd
                if bd.shape[0] == 0:
                    continue
                r0 = tgt_off[gp]
                c0 = src_off[h]
                dense[r0 : r0 + bd.shape[0], c0 : c0 + bd.shape[1]] ^= bd
    return dense


def _canonical_reps(
    delta_cur: gf2.BitMatrix, prev_image_cols: Optional[np.ndarray]
) -> CohomologyLocal:
    """Cohomology data from the outgoing delta and the incoming image."""
    kernel = gf2.kernel_basis(delta_cur).to_dense()
    boundary = gf2.IncrementalSpan(delta_cur.cols)
    if prev_image_cols is not None:
        for col in range(prev_image_cols.shape[1]):
            boundary.add(prev_image_cols[:, col])
    span = gf2.IncrementalSpan(delta_cur.cols)
    for row in boundary.rows:
        span.add(row)
    reps = [v for v in kernel if span.add(v)]
    rep_arr = np.stack(reps, axis=0) if reps else np.zeros((0, delta_cur.cols), dtype=np.uint8)
    return CohomologyLocal(kernel, boundary, rep_arr)


def _provenance_of_class(
    cplx: FreeComplex,
    M: FiniteModule,
    s: int,
    t: int,
    delta_cur: gf2.BitMatrix,
    local: CohomologyLocal,
) -> tuple[int, ...]:
    """Lowest carrying cell per representative, via the cell filtration."""
    n_cells = len(cplx.cells)
    if n_cells == 1:
        return tuple(0 for _ in range(local.dim))
    offsets, total = _hom_layout(cplx, M, s, t)
    col_cell = np.zeros(total, dtype=np.int64)
    for i, g in enumerate(cplx.level_gens(s)):
        width = M.dimension_in(t - g.t)
        col_cell[offsets[i] : offsets[i] + width] = g.cell
    out = [n_cells - 1] * local.dim
    pending = set(range(local.dim))
    dense_cur = delta_cur.to_dense()
    for j in range(n_cells - 1):
        if not pending:
            break
        keep = np.nonzero(col_cell <= j)[0]
        if keep.size == 0:
            continue
        sub_kernel = gf2.kernel_basis(gf2.BitMatrix.from_dense(dense_cur[:, keep])).to_dense()
        span = gf2.IncrementalSpan(total)
        for row in local.boundary_span.rows:
            span.add(row)
        for v in sub_kernel:
            emb = np.zeros(total, dtype=np.uint8)
            emb[keep] = v
            span.add(emb)
        for idx in sorted(pending):
            if span.contains(local.rep_vectors[idx]):
                out[idx] = j
                pending.discard(idx)
    return tuple(out)


def ext_over_complex(
    cplx: FreeComplex,
    M: FiniteModule,
    coefficients: str,
    max_s: Optional[int] = None,
    max_t: Optional[int] = None,
    with_reps: bool = True,
) -> ExtChart:
    """Cohomology of Hom(cplx, M), with labels and cell provenance."""
    if M.algebra != cplx.algebra:
        raise ResolutionError("algebra mismatch between complex and coefficients")
    s_hi = min(cplx.max_s - 1, max_s if max_s is not None else cplx.max_s - 1)
    t_hi = min(cplx.max_t, max_t if max_t is not None else cplx.max_t)
    chart = ExtChart(
        algebra=cplx.algebra.describe(),
        coefficients=coefficients,
        max_s=s_hi,
        max_t=t_hi,
        cells=cplx.cells,
        source=cplx,
        module=M,
    )
    multi_cell = len(cplx.cells) > 1
    dense_cache: dict = {}
    for t in range(t_hi + 1):
        prev_image: Optional[np.ndarray] = None
        prev_rank = 0
        for s in range(s_hi + 1):
            _, cur_total = _hom_layout(cplx, M, s, t)
            if cur_total == 0:
                prev_image, prev_rank = None, 0
                continue
            delta_dense = _hom_delta_dense(cplx, M, s, t, dense_cache)
            delta = gf2.BitMatrix.from_dense(delta_dense)
            rank_cur = gf2.rank(delta)
            dim = (cur_total - rank_cur) - prev_rank
            if dim:
                chart.dims[(s, t)] = dim
                stem = t - s
                if with_reps:
                    local = _canonical_reps(delta, prev_image)
                    chart.reps[(s, t)] = local
                    prov = _provenance_of_class(cplx, M, s, t, delta, local)
                    chart.provenance[(s, t)] = prov
                    chart.labels[(s, t)] = tuple(
                        f"x_{{{stem},{s}}}({i + 1})"
                        + (f"[{cplx.cells[c].label}]" if multi_cell else "")
                        for i, c in enumerate(prov)
                    )
                else:
                    chart.labels[(s, t)] = tuple(
                        f"x_{{{stem},{s}}}({i + 1})" for i in range(dim)
                    )
            prev_image = delta_dense
            prev_rank = rank_cur
    return chart


def ext_module(
    res: FreeResolution,
    M: FiniteModule,
    coefficients: Optional[str] = None,
    max_s: Optional[int] = None,
    max_t: Optional[int] = None,
    with_reps: bool = True,
) -> ExtChart:
    """Ext of a module coefficient over the minimal resolution."""
    name = coefficients if coefficients is not None else (M.name or "module")
    return ext_over_complex(res, M, name, max_s=max_s, max_t=max_t, with_reps=with_reps)


def ext_cell(
    res: Optional[FreeResolution],
    X: FreeComplex,
    M: FiniteModule,
    coefficients: Optional[str] = None,
    max_s: Optional[int] = None,
    max_t: Optional[int] = None,
    with_reps: bool = True,
) -> ExtChart:
    """Ext of a cell object with module coefficients, with cell provenance."""
    if res is not None and res.algebra != X.algebra:
        raise ResolutionError("cell object and resolution live over different algebras")
    name = coefficients if coefficients is not None else (M.name or "module")
    return ext_over_complex(X, M, name, max_s=max_s, max_t=max_t, with_reps=with_reps)


def ext_dim_at(
    cplx: FreeComplex,
    M: FiniteModule,
    s: int,
    t: int,
    dense_cache: Optional[dict] = None,
) -> int:
    """Dimension of a single Hom-cohomology spot via two boundary ranks.

    Much cheaper than a full chart when only a handful of bidegrees are
    needed; the optional cache shares dense action blocks across calls.
    """
    if M.algebra != cplx.algebra:
        raise ResolutionError("algebra mismatch between complex and coefficients")
    if s < 0 or s + 1 > cplx.max_s or t > cplx.max_t:
        raise ResolutionError(f"spot ({s},{t}) outside the resolved range")
    _, cur_total = _hom_layout(cplx, M, s, t)
    if cur_total == 0:
        return 0
    delta_out = gf2.BitMatrix.from_dense(_hom_delta_dense(cplx, M, s, t, dense_cache))
    rank_out = gf2.rank(delta_out)
    rank_in = 0
    if s > 0:
        delta_in = gf2.BitMatrix.from_dense(_hom_delta_dense(cplx, M, s - 1, t, dense_cache))
        rank_in = gf2.rank(delta_in)
    return (cur_total - rank_out) - rank_in


def ext_f2(res: FreeResolution, install_products: Iterable[str] = ("h0", "h1", "h2")) -> ExtChart:
    """Chart of the trivial module: dimensions are generator counts."""
    if not isinstance(res, FreeResolution):
        raise ResolutionError("generator counting needs a minimal resolution")
    chart = ExtChart(
        algebra=res.algebra.describe(),
        coefficients="F2",
        max_s=res.max_s,
        max_t=res.max_t,
        cells=res.cells,
        source=res,
        module=None,
    )
    for s in range(len(res.gens)):
        counter: dict[int, int] = {}
        for g in res.gens[s]:
            counter[g.t] = counter.get(g.t, 0) + 1
        for t in sorted(counter):
            d = counter[t]
            chart.dims[(s, t)] = d
            chart.labels[(s, t)] = tuple(f"x_{{{t - s},{s}}}({i + 1})" for i in range(d))
            chart.provenance[(s, t)] = tuple(0 for _ in range(d))
    for name in install_products:
        install_named_product(chart, name)
    return chart


# named classes on the chart of the trivial module: (s, t) bidegrees
NAMED_CLASS_BIDEGREES = {
    "h0": (1, 1),
    "h1": (1, 2),
    "h2": (1, 4),
    "h3": (1, 8),
    "h4": (1, 16),
    "g": (4, 24),
    "v14": (4, 12),
    "v18": (8, 24),
    "v28": (8, 56),
}


def sphere_class_seed(res: FreeResolution, name: str) -> tuple[int, int, dict[int, int]]:
    """Seed cocycle of a named class; requires a 1-dimensional spot."""
    s0, t0 = NAMED_CLASS_BIDEGREES[name]
    idx = [i for i, g in enumerate(res.level_gens(s0)) if g.t == t0]
    if len(idx) != 1:
        raise ResolutionError(
            f"class {name} needs dim 1 at ({s0},{t0}); found {len(idx)}"
        )
    return s0, t0, {idx[0]: 1}


def install_named_product(chart: ExtChart, name: str) -> bool:
    """Install multiplication matrices for a named class on a chart over the
    minimal resolution.  Returns False (with a note) when the class's
    bidegree is not 1-dimensional in this resolution."""
    res = chart.source
    if not isinstance(res, FreeResolution):
        raise ResolutionError("named products install on resolution charts")
    try:
        s0, t0, seed = sphere_class_seed(res, name)
    except ResolutionError as exc:
        chart.notes[f"product_{name}"] = f"not installed: {exc}"
        return False
    lifted = lift_cocycle(res, s0, t0, seed)
    chart.products[name] = {
        spot: _product_matrix_at(chart, lifted, spot)
        for spot in sorted(chart.dims)
        if spot[0] + s0 <= chart.max_s and spot[1] + t0 <= chart.max_t
    }
    return True


def install_cell_product(chart: ExtChart, name: str, sphere_res: FreeResolution) -> bool:
    """Install a named class action on a cell-object chart.

    The acting chain self-map lifts the pullback of the sphere cocycle along
    the bottom-cell projection.  Lift classes with vanishing bottom
    restriction could act differently; each such class is lifted too and the
    induced matrices compared, so ambiguity is detected and noted rather
    than silently resolved.
    """
    X = chart.source
    if X is None or chart.module is None:
        raise ResolutionError("cell products need a chart with runtime handles")
    try:
        s0, t0, _ = sphere_class_seed(sphere_res, name)
    except ResolutionError as exc:
        chart.notes[f"product_{name}"] = f"not installed: {exc}"
        return False
    bottom = min(range(len(X.cells)), key=lambda i: (X.cells[i].stem, X.cells[i].filt))
    seed = {
        i: 1
        for i, g in enumerate(X.level_gens(s0))
        if g.t == t0 and g.cell == bottom
    }
    try:
        lifted = lift_cocycle(X, s0, t0, seed)
    except LiftError as exc:
        chart.notes[f"product_{name}"] = f"not installed: {exc}"
        return False
    mats = {
        spot: _product_matrix_at(chart, lifted, spot)
        for spot in sorted(chart.dims)
        if spot[0] + s0 <= chart.max_s and spot[1] + t0 <= chart.max_t
    }
    # ambiguity group: lift classes restricting to zero on the bottom cell
    local = _local_cohomology(X, s0, t0)
    spot_gens = _trivial_layout(X, s0, t0)
    ambiguous_spots: set[tuple[int, int]] = set()
    unresolved = False
    for rep in local.rep_vectors:
        if any(rep[p] for p, i in enumerate(spot_gens) if X.gens[s0][i].cell == bottom):
            continue
        k_seed = {i: int(rep[p]) for p, i in enumerate(spot_gens)}
        if not any(k_seed.values()):
            continue
        try:
            k_lift = lift_cocycle(X, s0, t0, k_seed)
        except LiftError:
            unresolved = True
            continue
        for spot in mats:
            if not _product_matrix_at(chart, k_lift, spot).is_zero():
                ambiguous_spots.add(spot)
    if unresolved:
        chart.notes[f"product_{name}"] = (
            "ambiguity unresolved: a bottom-vanishing lift class did not lift"
        )
    elif ambiguous_spots:
        chart.notes[f"product_{name}"] = (
            "action ambiguous at " + ", ".join(map(str, sorted(ambiguous_spots)))
        )
    chart.products[name] = mats
    return True


def _product_matrix_at(
    chart: ExtChart, lifted: "ChainMap", spot: tuple[int, int]
) -> gf2.BitMatrix:
    """Multiplication matrix chart^{spot} -> chart^{spot + (s0,t0)}."""
    cplx = chart.source
    M = chart.module
    s, t = spot
    s0, t0 = lifted.s0, lifted.t0
    dim = chart.dim(s, t)
    tdim = chart.dim(s + s0, t + t0)
    if M is None:
        # trivial coefficients over a minimal resolution: unit coefficients
        # of the lifted chain map
        tgt_idx = [i for i, g in enumerate(cplx.level_gens(s + s0)) if g.t == t + t0]
        src_idx = [i for i, g in enumerate(cplx.level_gens(s)) if g.t == t]
        offsets, _ = cplx.block_layout(s, t)
        dense = np.zeros((len(tgt_idx), len(src_idx)), dtype=np.uint8)
        for r, gi in enumerate(tgt_idx):
            vec = lifted.rows.get((s + s0, gi))
            if vec is None or vec.shape[0] == 0:
                continue
            for c, hi in enumerate(src_idx):
                dense[r, c] = vec[offsets[hi]]
        return gf2.BitMatrix.from_dense(dense)
    local = chart.reps.get((s, t))
    tgt_local = chart.reps.get((s + s0, t + t0))
    if local is None:
        raise ResolutionError("products need charts computed with representatives")
    if tdim == 0 or tgt_local is None:
        return gf2.BitMatrix.from_dense(np.zeros((0, dim), dtype=np.uint8))
    cols = [
        tgt_local.class_coords(_precompose(cplx, M, lifted, s, t, rep))
        for rep in local.rep_vectors
    ]
    return gf2.BitMatrix.from_dense(np.stack(cols, axis=1))


def _precompose(
    cplx: FreeComplex, M: FiniteModule, lifted: "ChainMap", s: int, t: int, cochain: np.ndarray
) -> np.ndarray:
    """Pull a Hom^{s,t} cochain back along a chain map of bidegree (s0,t0)."""
    s0, t0 = lifted.s0, lifted.t0
    src_off, _ = _hom_layout(cplx, M, s, t)
    tgt_off, tgt_total = _hom_layout(cplx, M, s + s0, t + t0)
    out = np.zeros(tgt_total, dtype=np.uint8)
    for gi, g in enumerate(cplx.level_gens(s + s0)):
        width_out = M.dimension_in(t + t0 - g.t)
        if width_out == 0:
            continue
        vec = lifted.rows.get((s + s0, gi))
        if vec is None or not vec.any():
            continue
        d_here = g.t - t0
        offs, _ = cplx.block_layout(s, d_here)
        acc = np.zeros(width_out, dtype=np.uint8)
        for hi, h in enumerate(cplx.level_gens(s)):
            d = d_here - h.t
            if d < 0:
                continue
            monos = basis_in_degree(cplx.algebra, d)
            if not monos:
                continue
            seg = vec[offs[hi] : offs[hi] + len(monos)]
            if not seg.any():
                continue
            src_d = t - h.t
            width_in = M.dimension_in(src_d)
            if width_in == 0:
                continue
            phi_h = cochain[src_off[hi] : src_off[hi] + width_in]
            if not phi_h.any():
                continue
            for j in np.nonzero(seg)[0]:
                act = M.monomial_action_matrix(monos[int(j)], src_d)
                if act.rows:
                    acc ^= (act.to_dense() @ phi_h) % 2
        out[tgt_off[gi] : tgt_off[gi] + width_out] ^= acc
    return out


# ----- chain maps and lifting -----


@dataclass
class ChainMap:
    """Chain self-map of bidegree (s0, t0), stored per generator.

    ``rows[(s, i)]`` is the coordinate vector of the image of generator i of
    level s inside level s - s0 at internal degree t_i - t0.
    """

    source: FreeComplex
    s0: int
    t0: int
    rows: dict[tuple[int, int], np.ndarray]

    def verify(self, levels: Optional[Iterable[int]] = None) -> None:
        cplx = self.source
        rng = levels if levels is not None else range(self.s0 + 1, len(cplx.gens))
        for s in rng:
            for i, g in enumerate(cplx.level_gens(s)):
                lhs = np.zeros(cplx.free_dim(s - self.s0 - 1, g.t - self.t0), dtype=np.uint8)
                vec = self.rows.get((s, i))
                if vec is not None and vec.any():
                    mat = cplx.diff_matrix(s - self.s0, g.t - self.t0)
                    if mat.rows:
                        lhs = ((mat.to_dense() @ vec) % 2).astype(np.uint8)
                rhs = _lift_rhs(self, s, i)
                if not np.array_equal(lhs, rhs):
                    raise ResolutionError(f"chain map fails to commute at level {s}, gen {i}")


def lift_cocycle(cplx: FreeComplex, s0: int, t0: int, seed: dict[int, int]) -> ChainMap:
    """Lift a trivial-coefficient cocycle to a chain map of bidegree (s0,t0).

    ``seed`` maps level-s0 generator indices of internal degree t0 to bits.
    Levels above s0 are solved generator by generator with the canonical
    rule; when a level fails, the previous level is adjusted by cycle-valued
    corrections that keep its own equations (and, at the seed level, the
    represented class) intact, and the level is re-solved jointly.
    """
    if len(cplx.level_gens(0)) != 1 or cplx.level_gens(0)[0].t != 0:
        raise ResolutionError("complex must have a single bottom generator in degree 0")
    rows: dict[tuple[int, int], np.ndarray] = {}
    for i, g in enumerate(cplx.level_gens(s0)):
        vec = np.zeros(cplx.free_dim(0, g.t - t0), dtype=np.uint8)
        if seed.get(i, 0):
            if g.t != t0:
                raise ResolutionError("seed supported outside internal degree t0")
            vec[0] = 1
        rows[(s0, i)] = vec
    cm = ChainMap(cplx, s0, t0, rows)
    for s in range(s0 + 1, len(cplx.gens)):
        failed = False
        for i, g in enumerate(cplx.level_gens(s)):
            rhs = _lift_rhs(cm, s, i)
            tgt_s, tgt_t = s - s0, g.t - t0
            if cplx.free_dim(tgt_s, tgt_t) == 0:
                if rhs.any():
                    failed = True
                    break
                rows[(s, i)] = np.zeros(0, dtype=np.uint8)
                continue
            sol = cplx.diff_solver(tgt_s, tgt_t).solve(rhs)
            if sol is None:
                failed = True
                break
            rows[(s, i)] = sol
        if failed:
            _lift_level_with_correction(cm, s)
    return cm


def _lift_rhs(cm: ChainMap, s: int, i: int) -> np.ndarray:
    cplx = cm.source
    g = cplx.gens[s][i]
    rhs = np.zeros(cplx.free_dim(s - cm.s0 - 1, g.t - cm.t0), dtype=np.uint8)
    for h, a in cplx.diff[s][i]:
        hv = cm.rows.get((s - 1, h))
        if hv is not None and hv.any():
            rhs ^= cplx.apply_element(a, s - 1 - cm.s0, cplx.gens[s - 1][h].t - cm.t0, hv)
    return rhs


def _correction_kernel(cm: ChainMap, s_prev: int, h: int) -> np.ndarray:
    """Admissible adjustments of the level-s_prev image of generator h: rows
    spanning the cycle subspace, with seed-functional changes excluded."""
    cplx = cm.source
    ts = s_prev - cm.s0
    tt = cplx.gens[s_prev][h].t - cm.t0
    dim = cplx.free_dim(ts, tt)
    if dim == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    if ts == 0:
        if tt == 0:
            # only the unit coordinate lives here; changing it would change
            # the represented class
            return np.zeros((0, dim), dtype=np.uint8)
        return np.eye(dim, dtype=np.uint8)
    return gf2.kernel_basis(cplx.diff_matrix(ts, tt)).to_dense()


def _lift_level_with_correction(cm: ChainMap, s: int) -> None:
    """Joint solve of one lifting level together with cycle-valued
    adjustments of the previous level."""
    cplx = cm.source
    s0, t0 = cm.s0, cm.t0
    gens_s = cplx.level_gens(s)
    gens_prev = cplx.level_gens(s - 1)
    kernels = [_correction_kernel(cm, s - 1, h) for h in range(len(gens_prev))]

    x_off = [0]
    for g in gens_s:
        x_off.append(x_off[-1] + cplx.free_dim(s - s0, g.t - t0))
    psi_off = [x_off[-1]]
    for kern in kernels:
        psi_off.append(psi_off[-1] + kern.shape[0])
    n_unknowns = psi_off[-1]
    eq_off = [0]
    for g in gens_s:
        eq_off.append(eq_off[-1] + cplx.free_dim(s - s0 - 1, g.t - t0))
    n_eqs = eq_off[-1]

    A = np.zeros((n_eqs, n_unknowns), dtype=np.uint8)
    b = np.zeros(n_eqs, dtype=np.uint8)
    for i, g in enumerate(gens_s):
        r0, r1 = eq_off[i], eq_off[i + 1]
        rhs = _lift_rhs(cm, s, i)
        if r1 == r0:
            if rhs.any():
                raise LiftError(f"lift obstructed at level {s}: no target for a nonzero image")
            continue
        b[r0:r1] = rhs
        mat = cplx.diff_matrix(s - s0, g.t - t0)
        if mat.rows:
            A[r0:r1, x_off[i] : x_off[i + 1]] = mat.to_dense()
        for h, a in cplx.diff[s][i]:
            kern = kernels[h]
            for k in range(kern.shape[0]):
                moved = cplx.apply_element(a, s - 1 - s0, cplx.gens[s - 1][h].t - t0, kern[k])
                A[r0:r1, psi_off[h] + k] ^= moved
    sol = gf2.solve(gf2.BitMatrix.from_dense(A), b)
    if sol is None:
        raise LiftError(f"lift obstructed at level {s}: the seed class does not lift")
    for h in range(len(gens_prev)):
        kern = kernels[h]
        if kern.shape[0] == 0:
            continue
        combo = sol[psi_off[h] : psi_off[h] + kern.shape[0]]
        if combo.any():
            cm.rows[(s - 1, h)] = ((cm.rows[(s - 1, h)] + (kern.T @ combo)) % 2).astype(np.uint8)
    for i in range(len(gens_s)):
        cm.rows[(s, i)] = sol[x_off[i] : x_off[i + 1]].astype(np.uint8)


def lift_chain_map(res: FreeResolution, s0: int, t0: int, cocycle: dict[int, int]) -> ChainMap:
    """Lift an Ext class representative over the minimal resolution."""
    return lift_cocycle(res, s0, t0, cocycle)


# ----- chart classes and Yoneda products -----


@dataclass(frozen=True)
class ChartClass:
    chart: ExtChart
    s: int
    t: int
    coords: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.coords)


def chart_class(chart: ExtChart, s: int, t: int, coords: Sequence[int]) -> ChartClass:
    dim = chart.dim(s, t)
    if len(coords) != dim:
        raise ResolutionError(f"class coords length {len(coords)} != dim {dim}")
    return ChartClass(chart, s, t, tuple(int(c) & 1 for c in coords))


def yoneda_product(a: ChartClass, b: ChartClass) -> ChartClass:
    """Product of a trivial-coefficient resolution class with any class over
    the same resolution."""
    res = a.chart.source
    if not isinstance(res, FreeResolution) or a.chart.module is not None:
        raise ResolutionError("left factor must be a trivial-coefficient resolution class")
    if b.chart.source is not res:
        raise ResolutionError("classes live over different resolutions")
    s_new, t_new = a.s + b.s, a.t + b.t
    if s_new > b.chart.max_s or t_new > b.chart.max_t:
        raise ResolutionError("product lands outside the computed bound")
    seed = {}
    pos = 0
    for i, g in enumerate(res.level_gens(a.s)):
        if g.t == a.t:
            seed[i] = a.coords[pos]
            pos += 1
    lifted = lift_cocycle(res, a.s, a.t, seed)
    mat = _product_matrix_at(b.chart, lifted, (b.s, b.t))
    tdim = b.chart.dim(s_new, t_new)
    if tdim == 0:
        return ChartClass(b.chart, s_new, t_new, ())
    vec = (mat.to_dense() @ np.array(b.coords, dtype=np.uint8)) % 2
    return ChartClass(b.chart, s_new, t_new, tuple(int(x) for x in vec))


# ----- trivial-coefficient cochain complex of any free complex -----


def _trivial_layout(cplx: FreeComplex, s: int, t: int) -> list[int]:
    """Indices of level-s generators sitting exactly in internal degree t."""
    return [i for i, g in enumerate(cplx.level_gens(s)) if g.t == t]


def _trivial_delta(cplx: FreeComplex, s: int, t: int) -> gf2.BitMatrix:
    """Trivial-coefficient delta: functionals on level s to level s+1."""
    src_pos = {i: p for p, i in enumerate(_trivial_layout(cplx, s, t))}
    tgt = _trivial_layout(cplx, s + 1, t)
    dense = np.zeros((len(tgt), len(src_pos)), dtype=np.uint8)
    for r, gi in enumerate(tgt):
        for h, a in cplx.diff[s + 1][gi]:
            if h in src_pos and a.augmentation():
                dense[r, src_pos[h]] ^= 1
    return gf2.BitMatrix.from_dense(dense)


def _local_cohomology(cplx: FreeComplex, s: int, t: int) -> CohomologyLocal:
    """Trivial-coefficient cohomology of the complex at one spot; vectors are
    indexed by the level-s generators of internal degree t."""
    cur = _trivial_delta(cplx, s, t)
    prev_cols = _trivial_delta(cplx, s - 1, t).to_dense() if s >= 1 else None
    return _canonical_reps(cur, prev_cols)


# ----- cones -----


def cone(
    base: FreeComplex,
    s0: int,
    t0: int,
    class_coords: Optional[Sequence[int]] = None,
) -> CellObject:
    """Mapping cone over a trivial-coefficient class of the base at (s0,t0).

    The class is given in the canonical representative basis of the base's
    chart at that spot; it defaults to the unique nonzero class when the
    spot is 1-dimensional.  Zero and ambiguous attaching classes are
    rejected.
    """
    local = _local_cohomology(base, s0, t0)
    if local.dim == 0:
        raise ResolutionError(f"no class at ({s0},{t0}) to cone on")
    if class_coords is None:
        if local.dim != 1:
            raise ResolutionError(
                f"attaching class ambiguous: dim {local.dim} at ({s0},{t0}); pass class_coords"
            )
        class_coords = (1,)
    coords = tuple(int(c) & 1 for c in class_coords)
    if len(coords) != local.dim or not any(coords):
        raise ResolutionError("attaching class must be a nonzero class in range")
    cocycle_vec = np.zeros(local.rep_vectors.shape[1], dtype=np.uint8)
    for c, rep in zip(coords, local.rep_vectors):
        if c:
            cocycle_vec ^= rep
    spot_gens = _trivial_layout(base, s0, t0)
    seed = {i: int(cocycle_vec[p]) for p, i in enumerate(spot_gens)}
    phi = lift_cocycle(base, s0, t0, seed)

    shift_stem, shift_filt = t0 - s0 + 1, s0 - 1
    new_cells = list(base.cells) + [
        Cell(str(c.stem + shift_stem), c.stem + shift_stem, c.filt + shift_filt)
        for c in base.cells
    ]
    order = sorted(range(len(new_cells)), key=lambda i: (new_cells[i].stem, new_cells[i].filt))
    cell_rank = {old: new for new, old in enumerate(order)}
    cells_sorted = [new_cells[i] for i in order]
    n_base = len(base.cells)

    max_s, max_t = base.max_s, base.max_t
    gens: list[list[Gen]] = [[] for _ in range(max_s + 1)]
    diff: list[list[DiffRow]] = [[] for _ in range(max_s + 1)]
    b1_index: dict[tuple[int, int], int] = {}
    b2_index: dict[tuple[int, int], int] = {}
    for s in range(max_s + 1):
        for i, g in enumerate(base.level_gens(s)):
            b1_index[(s, i)] = len(gens[s])
            gens[s].append(Gen(g.t, cell_rank[g.cell]))
        s_src = s - (s0 - 1)
        if s_src >= 0:
            for i, g in enumerate(base.level_gens(s_src)):
                b2_index[(s, i)] = len(gens[s])
                gens[s].append(Gen(g.t + t0, cell_rank[n_base + g.cell]))
    for s in range(max_s + 1):
        for i, g in enumerate(base.level_gens(s)):
            row = [(b1_index[(s - 1, h)], a) for h, a in base.diff[s][i]]
            vec = phi.rows.get((s, i))
            if vec is not None and vec.any():
                for h, a in base.vector_to_rows(s - s0, g.t - t0, vec):
                    row.append((b2_index[(s - 1, h)], a))
            diff[s].append(tuple(row))
        s_src = s - (s0 - 1)
        if s_src >= 0:
            for i in range(len(base.level_gens(s_src))):
                row = [(b2_index[(s - 1, h)], a) for h, a in base.diff[s_src][i]]
                diff[s].append(tuple(row))
    record = AttachingRecord(s0, t0, coords, local.dim)
    return CellObject(
        base.algebra,
        max_s,
        max_t,
        cells_sorted,
        gens,
        diff,
        attachings=base.attachings + (record,),
    )


def cells_of_tensor(x: FreeComplex, y: FreeComplex) -> tuple[tuple[int, int], ...]:
    """Multiset of pairwise cell-bidegree sums (stem, filt), sorted."""
    return tuple(
        sorted((a.stem + b.stem, a.filt + b.filt) for a in x.cells for b in y.cells)
    )


# ----- self-map selection -----


@dataclass(frozen=True)
class SelfMapSelection:
    """Outcome of picking a self-map class by bottom-cell restriction.

    ``candidate_dim`` and ``window_matching_dim`` describe the windowed
    Hom bicomplex (the matching family there includes artifacts from
    cochains whose constraints fall outside the window).  ``ambiguity_dim``
    is the certified bound: the total chart dimension at the flanking spots
    of the non-bottom cells.  When it vanishes, chain maps with the same
    bottom restriction are homotopic and the selection is canonical.
    """

    s0: int
    t0: int
    window_s: int
    window_t: int
    candidate_dim: int
    match_found: bool
    window_matching_dim: int
    ambiguity_dim: int
    chosen_seed: tuple[tuple[int, int], ...]
    attach_coords: tuple[int, ...]
    note: str

    @property
    def unique(self) -> bool:
        return self.match_found and self.ambiguity_dim == 0


def select_self_map(
    X: FreeComplex,
    s0: int,
    t0: int,
    sphere_res: FreeResolution,
    window_s: Optional[int] = None,
    window_t: Optional[int] = None,
) -> SelfMapSelection:
    """Self-map candidates of X at (s0, t0), selected by bottom restriction.

    Candidates are cohomology classes of the Hom(X, X) bicomplex inside the
    stated window; the canonical choice is the unique candidate whose
    bottom-cell restriction equals the pullback of the nonzero class of the
    sphere chart at (s0, t0), which must be 1-dimensional there.  Ambiguity
    and misses are reported, never silently resolved.
    """
    ws = window_s if window_s is not None else min(X.max_s, s0 + 6)
    wt = window_t if window_t is not None else min(X.max_t, t0 + 32)

    def layout(k: int):
        entries = []
        total = 0
        for s in range(max(k, 0), ws + 1):
            for i, g in enumerate(X.level_gens(s)):
                if g.t > wt:
                    continue
                size = X.free_dim(s - k, g.t - t0)
                entries.append((s, i, total, size))
                total += size
        return entries, total

    def dmat(k: int) -> np.ndarray:
        src, src_total = layout(k)
        tgt, tgt_total = layout(k + 1)
        src_pos = {(s, i): (off, size) for s, i, off, size in src}
        dense = np.zeros((tgt_total, src_total), dtype=np.uint8)
        for s, i, off, size in tgt:
            g = X.gens[s][i]
            rows_here = X.free_dim(s - k - 1, g.t - t0)
            if rows_here == 0:
                continue
            # term phi(d g)
            for h, a in X.diff[s][i]:
                hp = src_pos.get((s - 1, h))
                if hp is None or hp[1] == 0:
                    continue
                hg = X.gens[s - 1][h]
                offs_in, _ = X.block_layout(s - 1 - k, hg.t - t0)
                offs_out, _ = X.block_layout(s - 1 - k, g.t - t0)
                for mono in a.terms:
                    for bi, bg in enumerate(X.level_gens(s - 1 - k)):
                        d = hg.t - t0 - bg.t
                        if d < 0:
                            continue
                        width = len(basis_in_degree(X.algebra, d))
                        if width == 0:
                            continue
                        blk = _lmul_dense(X.algebra, mono, d)
                        dense[
                            off + offs_out[bi] : off + offs_out[bi] + blk.shape[0],
                            hp[0] + offs_in[bi] : hp[0] + offs_in[bi] + width,
                        ] ^= blk
            # term d(phi g)
            gp = src_pos.get((s, i))
            if gp is not None and gp[1]:
                mat = X.diff_matrix(s - k, g.t - t0)
                if mat.rows:
                    dense[off : off + mat.rows, gp[0] : gp[0] + mat.cols] ^= mat.to_dense()
        return dense

    d_cur = gf2.BitMatrix.from_dense(dmat(s0))
    d_prev = dmat(s0 - 1) if s0 >= 1 else None
    local = _canonical_reps(d_cur, d_prev)

    sphere_n = len(_trivial_layout(sphere_res, s0, t0))
    if sphere_n != 1:
        raise ResolutionError(
            f"sphere chart at ({s0},{t0}) has dimension {sphere_n}; selection undefined"
        )
    bottom = min(range(len(X.cells)), key=lambda i: (X.cells[i].stem, X.cells[i].filt))
    x_local = _local_cohomology(X, s0, t0)
    spot_gens = _trivial_layout(X, s0, t0)
    target_vec = np.zeros(len(spot_gens), dtype=np.uint8)
    for p, i in enumerate(spot_gens):
        if X.gens[s0][i].cell == bottom:
            target_vec[p] ^= 1
    target_coords = x_local.class_coords(target_vec)

    # bottom restriction: unit coefficient of phi at generators of (s0, t0)
    entries, _ = layout(s0)
    entry_pos = {(s, i): (off, size) for s, i, off, size in entries}
    br_cols = []
    for rep in local.rep_vectors:
        vec = np.zeros(len(spot_gens), dtype=np.uint8)
        for p, i in enumerate(spot_gens):
            got = entry_pos.get((s0, i))
            if got is not None and got[1]:
                vec[p] ^= rep[got[0]]
        br_cols.append(x_local.class_coords(vec))
    if br_cols:
        br = gf2.BitMatrix.from_dense(np.stack(br_cols, axis=1))
    else:
        br = gf2.BitMatrix.from_dense(np.zeros((target_coords.shape[0], 0), dtype=np.uint8))
    sol = gf2.solve(br, target_coords)
    window_matching = br.cols - gf2.rank(br)

    # certified ambiguity: a map with vanishing bottom restriction factors
    # through the non-bottom cells of the target, so its classes are bounded
    # by the chart at the upward-flanking spots
    bottom_cell = X.cells[bottom]
    ambiguity = 0
    for c in X.cells:
        if c is bottom_cell:
            continue
        fs = s0 + (c.filt - bottom_cell.filt)
        ft = t0 + (c.stem + c.filt - bottom_cell.stem - bottom_cell.filt)
        if ft > X.max_t or fs > X.max_s - 1:
            raise ResolutionError(
                f"complex too small to certify uniqueness: need spot ({fs},{ft})"
            )
        ambiguity += _local_cohomology(X, fs, ft).dim

    seed: list[tuple[int, int]] = []
    combo = np.zeros(len(spot_gens), dtype=np.uint8)
    for cbit, rep in zip(target_coords, x_local.rep_vectors):
        if cbit:
            combo ^= rep
    for p, i in enumerate(spot_gens):
        if combo[p]:
            seed.append((i, 1))
    if sol is None:
        note = "no candidate restricts to the sphere class"
    elif ambiguity:
        note = f"ambiguous: flanking cells contribute dimension {ambiguity}"
    else:
        note = "unique"
    return SelfMapSelection(
        s0,
        t0,
        ws,
        wt,
        local.dim,
        sol is not None,
        window_matching,
        ambiguity,
        tuple(seed),
        tuple(int(v) for v in target_coords),
        note,
    )


def attaching_action(
    chart: ExtChart, s0: int, t0: int, class_coords: Optional[Sequence[int]] = None
) -> dict[tuple[int, int], gf2.BitMatrix]:
    """Multiplication matrices of a trivial-coefficient class of the chart's
    own complex, keyed by source bidegree.  Used to feed the long exact
    sequence check for a cone over that class."""
    cplx = chart.source
    if cplx is None:
        raise ResolutionError("attaching action needs a chart with runtime handles")
    local = _local_cohomology(cplx, s0, t0)
    if class_coords is None:
        if local.dim != 1:
            raise ResolutionError(f"class ambiguous: dim {local.dim} at ({s0},{t0})")
        class_coords = (1,)
    coords = tuple(int(c) & 1 for c in class_coords)
    vec = np.zeros(local.rep_vectors.shape[1], dtype=np.uint8)
    for c, rep in zip(coords, local.rep_vectors):
        if c:
            vec ^= rep
    spot_gens = _trivial_layout(cplx, s0, t0)
    seed = {i: int(vec[p]) for p, i in enumerate(spot_gens)}
    lifted = lift_cocycle(cplx, s0, t0, seed)
    return {
        spot: _product_matrix_at(chart, lifted, spot)
        for spot in sorted(chart.dims)
        if spot[0] + s0 <= chart.max_s and spot[1] + t0 <= chart.max_t
    }


# ----- long exact sequence consistency and periodicity -----


@dataclass(frozen=True)
class LesReport:
    checked: int
    failures: tuple[tuple[int, int, int, int], ...]  # (s, t, cone dim, predicted)

    @property
    def ok(self) -> bool:
        return not self.failures


def les_consistency(
    base_chart: ExtChart,
    cone_chart: ExtChart,
    mult: dict[tuple[int, int], gf2.BitMatrix],
    s0: int,
    t0: int,
) -> LesReport:
    """dim(cone)^{s,t} = dim coker(theta)^{s,t} + dim ker(theta)^{s-s0+1,t-t0}.

    ``mult`` holds the attaching-class multiplication matrices on the base
    chart keyed by source bidegree (source (s,t) mapping to (s+s0, t+t0)).
    """

    def theta_rank(spot: tuple[int, int]) -> int:
        m = mult.get(spot)
        return gf2.rank(m) if m is not None else 0

    failures = []
    checked = 0
    t_hi = min(cone_chart.max_t, base_chart.max_t)
    for t in range(t_hi + 1):
        for s in range(cone_chart.max_s + 1):
            if s + 1 > base_chart.max_s:
                continue
            coker = base_chart.dim(s, t) - theta_rank((s - s0, t - t0))
            ker = 0
            if s - s0 + 1 >= 0 and t - t0 >= 0:
                ker = base_chart.dim(s - s0 + 1, t - t0) - theta_rank((s - s0 + 1, t - t0))
            predicted = coker + ker
            actual = cone_chart.dim(s, t)
            checked += 1
            if predicted != actual:
                failures.append((s, t, actual, predicted))
    return LesReport(checked, tuple(failures))


@dataclass(frozen=True)
class PeriodicityReport:
    shift: tuple[int, int]
    checked: int
    failures: tuple[tuple[int, int, int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def periodicity_report(
    chart: ExtChart,
    shift: tuple[int, int],
    min_filt_of_stem,
    stem_range: tuple[int, int],
) -> PeriodicityReport:
    """Dimension match under a periodicity shift above a configurable edge.

    ``min_filt_of_stem(stem)`` gives the lower filtration edge above which
    periodicity is asserted; both bidegrees must land inside the window.
    """
    ds, dt = shift
    failures = []
    checked = 0
    for stem in range(stem_range[0], stem_range[1] + 1):
        s = 0
        while True:
            t = stem + s
            if t + dt > chart.max_t or s + ds > chart.max_s:
                break
            if s >= min_filt_of_stem(stem):
                checked += 1
                a, b = chart.dim(s, t), chart.dim(s + ds, t + dt)
                if a != b:
                    failures.append((s, t, a, b))
            s += 1
    return PeriodicityReport(shift, checked, tuple(failures))


def vanishing_edge(chart: ExtChart, slope: Fraction = Fraction(1, 5), min_stem: int = 0) -> Fraction:
    """Largest s - slope*(t-s) over nonzero bidegrees: the chart's support
    satisfies s <= slope*stem + edge for stems past min_stem."""
    best: Optional[Fraction] = None
    for (s, t) in chart.dims:
        stem = t - s
        if stem < min_stem:
            continue
        val = Fraction(s) - slope * stem
        if best is None or val > best:
            best = val
    if best is None:
        raise ResolutionError("chart has no classes past the requested stem")
    return best
