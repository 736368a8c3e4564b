"""Bit-packed dense linear algebra over GF(2).

Everything downstream (resolutions, Hom complexes, the cobar oracle)
reduces to rank/kernel/solve computations over the two-element field, so
this module fixes a single deterministic elimination rule: pivot on the
lowest-index nonzero column, in the topmost available row.  Every basis
derived from it (kernel bases, canonical solutions) is then reproducible
across runs, platforms, and worker counts.

Rows are packed 64 columns per uint64 word; elimination XORs whole rows
at once through numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

_WORD = 64


def _words_for(cols: int) -> int:
    return (max(cols, 1) + _WORD - 1) // _WORD


def _pack_dense(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    words = _words_for(cols)
    bits = np.zeros((rows, words), dtype=np.uint64)
    for w in range(words):
        chunk = dense[:, w * _WORD : min((w + 1) * _WORD, cols)].astype(np.uint64)
        shifts = np.arange(chunk.shape[1], dtype=np.uint64)
        if chunk.shape[1]:
            bits[:, w] = np.bitwise_or.reduce(chunk << shifts, axis=1)
    return bits


class BitMatrix:
    """Immutable rows x cols matrix over GF(2) with uint64-packed rows.

    Bits beyond ``cols`` in the last word of each row are kept zero, so
    equality and hashing can work on the raw payload.
    """

    __slots__ = ("rows", "cols", "bits")

    def __init__(self, rows: int, cols: int, bits: np.ndarray):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        words = _words_for(cols)
        if bits.shape != (rows, words) or bits.dtype != np.uint64:
            raise ValueError(f"payload shape {bits.shape} does not match {rows}x{cols}")
        bits = np.ascontiguousarray(bits)
        # mask tail bits so the payload is canonical
        tail = cols % _WORD
        if cols and tail:
            mask = np.uint64((1 << tail) - 1)
            bits[:, -1] &= mask
        elif cols == 0:
            bits[:] = 0
        bits.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("BitMatrix is immutable")

    @staticmethod
    def zeros(rows: int, cols: int) -> "BitMatrix":
        return BitMatrix(rows, cols, np.zeros((rows, _words_for(cols)), dtype=np.uint64))

    @staticmethod
    def identity(n: int) -> "BitMatrix":
        bits = np.zeros((n, _words_for(n)), dtype=np.uint64)
        idx = np.arange(n)
        bits[idx, idx >> 6] = np.uint64(1) << (idx & 63).astype(np.uint64)
        return BitMatrix(n, n, bits)

    @staticmethod
    def from_dense(dense) -> "BitMatrix":
        arr = np.asarray(dense, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("dense payload must be 2-dimensional")
        return BitMatrix(arr.shape[0], arr.shape[1], _pack_dense(arr))

    @staticmethod
    def from_support(rows: int, cols: int, support: Iterable[Iterable[int]]) -> "BitMatrix":
        """Build from an iterable of per-row column-index iterables."""
        bits = np.zeros((rows, _words_for(cols)), dtype=np.uint64)
        for r, row_cols in enumerate(support):
            for c in row_cols:
                if not 0 <= c < cols:
                    raise ValueError(f"column {c} out of range")
                bits[r, c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
        return BitMatrix(rows, cols, bits)

    def to_dense(self) -> np.ndarray:
        if self.cols == 0:
            return np.zeros((self.rows, 0), dtype=np.uint8)
        cs = np.arange(self.cols)
        return ((self.bits[:, cs >> 6] >> (cs & 63).astype(np.uint64)) & 1).astype(np.uint8)

    def get(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError((r, c))
        return int((self.bits[r, c >> 6] >> np.uint64(c & 63)) & np.uint64(1))

    def row_support(self, r: int) -> tuple[int, ...]:
        out = []
        for w in range(self.bits.shape[1]):
            word = int(self.bits[r, w])
            while word:
                low = word & -word
                out.append(w * _WORD + low.bit_length() - 1)
                word ^= low
        return tuple(out)

    def is_zero(self) -> bool:
        return not self.bits.any()

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def xor(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, self.bits ^ other.bits)

    def take_rows(self, indices: Sequence[int]) -> "BitMatrix":
        idx = np.asarray(indices, dtype=np.intp)
        return BitMatrix(len(idx), self.cols, self.bits[idx].copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.bits, other.bits))
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def stack_rows(mats: Sequence[BitMatrix]) -> BitMatrix:
    if not mats:
        raise ValueError("nothing to stack")
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise ValueError("column mismatch")
    bits = np.vstack([m.bits for m in mats])
    return BitMatrix(sum(m.rows for m in mats), cols, bits.copy())


@dataclass(frozen=True)
class RowEchelonResult:
    """Reduced row-echelon form plus the pivot bookkeeping."""

    matrix: BitMatrix
    pivot_columns: tuple[int, ...]
    rank: int


def _eliminate(work: np.ndarray, rows: int, cols: int, pivot_limit: int) -> list[int]:
    """In-place RREF on a writable packed payload; returns pivot columns.

    Only columns below ``pivot_limit`` are eligible as pivots; later
    columns (e.g. an augmented right-hand side) are carried along.
    """
    pivots: list[int] = []
    r = 0
    for c in range(pivot_limit):
        if r == rows:
            break
        w, s = c >> 6, np.uint64(c & 63)
        col = (work[r:, w] >> s) & np.uint64(1)
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        mask = ((work[:, w] >> s) & np.uint64(1)).astype(bool)
        mask[r] = False
        if mask.any():
            work[mask] ^= work[r]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: BitMatrix, pivot_limit: Optional[int] = None) -> RowEchelonResult:
    """Reduced row echelon form with the canonical pivot rule."""
    limit = m.cols if pivot_limit is None else pivot_limit
    work = m.bits.copy()
    pivots = _eliminate(work, m.rows, m.cols, limit)
    return RowEchelonResult(BitMatrix(m.rows, m.cols, work), tuple(pivots), len(pivots))


def rank(m: BitMatrix) -> int:
    return rref(m).rank


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Canonical basis of the right kernel, one vector per row.

    The basis is the free-variable basis read off the RREF, ordered by
    free column index: vector for free column f has a 1 at f and the
    pivot-row entries of column f at the pivot columns.
    """
    res = rref(m)
    piv = set(res.pivot_columns)
    free = [c for c in range(m.cols) if c not in piv]
    dense = np.zeros((len(free), m.cols), dtype=np.uint8)
    R = res.matrix
    for k, f in enumerate(free):
        dense[k, f] = 1
        for row_idx, p in enumerate(res.pivot_columns):
            dense[k, p] = R.get(row_idx, f)
    return BitMatrix.from_dense(dense)


def _solve_reduced(work: np.ndarray, pivots: list[int], rows: int, rhs_col: int) -> Optional[np.ndarray]:
    w, s = rhs_col >> 6, np.uint64(rhs_col & 63)
    rhs = ((work[:, w] >> s) & np.uint64(1)).astype(np.uint8)
    if rhs[len(pivots) :].any():
        return None
    x = np.zeros(rhs_col, dtype=np.uint8)
    for k, p in enumerate(pivots):
        x[p] = rhs[k]
    return x


def solve(m: BitMatrix, b) -> Optional[np.ndarray]:
    """Canonical solution of m x = b (free variables zero), or None."""
    vec = np.asarray(b, dtype=np.uint8).reshape(-1) & 1
    if vec.shape[0] != m.rows:
        raise ValueError("length of b must equal row count")
    dense = np.concatenate([m.to_dense(), vec[:, None]], axis=1)
    aug = BitMatrix.from_dense(dense)
    work = aug.bits.copy()
    pivots = _eliminate(work, aug.rows, aug.cols, m.cols)
    return _solve_reduced(work, pivots, aug.rows, m.cols)


def solve_matrix(m: BitMatrix, B: BitMatrix) -> Optional[BitMatrix]:
    """Columnwise canonical solutions of m X = B; None if any column fails."""
    if B.rows != m.rows:
        raise ValueError("row mismatch")
    dense = np.concatenate([m.to_dense(), B.to_dense()], axis=1)
    aug = BitMatrix.from_dense(dense)
    work = aug.bits.copy()
    pivots = _eliminate(work, aug.rows, aug.cols, m.cols)
    cols_out = []
    for j in range(B.cols):
        x = _solve_reduced(work, pivots, aug.rows, m.cols + j)
        if x is None:
            return None
        cols_out.append(x[: m.cols])
    if not cols_out:
        return BitMatrix.zeros(m.cols, 0)
    return BitMatrix.from_dense(np.stack(cols_out, axis=1))


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """GF(2) matrix product a @ b."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch {a.cols} vs {b.rows}")
    out = np.zeros((a.rows, b.bits.shape[1]), dtype=np.uint64)
    for i in range(a.rows):
        sup = a.row_support(i)
        if sup:
            out[i] = np.bitwise_xor.reduce(b.bits[np.asarray(sup, dtype=np.intp)], axis=0)
    return BitMatrix(a.rows, b.cols, out)


def row_space_contains(basis: BitMatrix, vector: np.ndarray) -> bool:
    """Whether ``vector`` lies in the row space of ``basis``."""
    stacked = np.concatenate([basis.to_dense(), (np.asarray(vector, dtype=np.uint8) & 1)[None, :]], axis=0)
    m = BitMatrix.from_dense(stacked)
    return rref(m).rank == rref(basis).rank


def sparse_rank(columns: Iterable[Iterable]) -> int:
    """Rank over GF(2) of a matrix given as column supports.

    Row labels may be any hashable values; columns never need a row count
    up front, which lets callers hash image vectors on the fly.  Pivots
    are chosen lightest-row-first, then lightest containing column, which
    keeps fill-in negligible on the near-triangular sparse matrices the
    cobar oracle produces (dense elimination is hopeless at those sizes).
    The rank itself is basis-independent, so the heuristic only affects
    speed.
    """
    import heapq

    intern: dict = {}
    cols: dict[int, set[int]] = {}
    row_cols: dict[int, set[int]] = {}
    for ci, support in enumerate(columns):
        s: set[int] = set()
        for key in support:
            r = intern.setdefault(key, len(intern))
            s ^= {r}
        if s:
            cols[ci] = s
            for r in s:
                row_cols.setdefault(r, set()).add(ci)
    rank = 0
    heap = [(len(cs), r) for r, cs in row_cols.items()]
    heapq.heapify(heap)
    while heap:
        w, r = heapq.heappop(heap)
        cs = row_cols.get(r)
        if not cs:
            continue
        if len(cs) != w:
            # stale weight: re-queue with the current one
            heapq.heappush(heap, (len(cs), r))
            continue
        pc = min(cs, key=lambda c: len(cols[c]))
        pivot = cols.pop(pc)
        rank += 1
        for rr in pivot:
            row_cols[rr].discard(pc)
        for c in list(row_cols[r]):
            col = cols[c]
            col ^= pivot
            for rr in pivot:
                if rr in col:
                    row_cols[rr].add(c)
                else:
                    row_cols[rr].discard(c)
            if not col:
                del cols[c]
        del row_cols[r]
        for rr in pivot:
            if rr != r and row_cols.get(rr):
                heapq.heappush(heap, (len(row_cols[rr]), rr))
    return rank


class Solver:
    """One elimination of a fixed matrix, reused across many right sides.

    Solutions follow the same canonical rule as :func:`solve` (free
    variables zero).
    """

    def __init__(self, m: BitMatrix):
        self.matrix = m
        padded = np.zeros((m.rows, _words_for(m.cols + m.rows)), dtype=np.uint64)
        padded[:, : m.bits.shape[1]] = m.bits
        # track row operations in an appended identity block
        for i in range(m.rows):
            c = m.cols + i
            padded[i, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        self._pivots = _eliminate(padded, m.rows, m.cols + m.rows, m.cols)
        full = BitMatrix(m.rows, m.cols + m.rows, padded)
        self._ops = full.to_dense()[:, m.cols :] if m.rows else np.zeros((0, 0), dtype=np.uint8)

    def solve(self, b) -> Optional[np.ndarray]:
        vec = np.asarray(b, dtype=np.uint8).reshape(-1) & 1
        if vec.shape[0] != self.matrix.rows:
            raise ValueError("length of b must equal row count")
        m = self.matrix
        reduced = (self._ops @ vec) & 1 if m.rows else vec
        if reduced[len(self._pivots) :].any():
            return None
        x = np.zeros(m.cols, dtype=np.uint8)
        for k, p in enumerate(self._pivots):
            x[p] = reduced[k]
        return x


class IncrementalSpan:
    """Row space that grows one vector at a time, kept in echelon form."""

    def __init__(self, cols: int):
        self.cols = cols
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> tuple[np.ndarray, ...]:
        """Echelon rows currently spanning the space."""
        return tuple(self._rows)

    def reduce(self, vector) -> np.ndarray:
        v = (np.asarray(vector, dtype=np.uint8).reshape(-1) & 1).copy()
        if v.shape[0] != self.cols:
            raise ValueError("vector length mismatch")
        for p, r in zip(self._pivots, self._rows):
            if v[p]:
                v ^= r
        return v

    def contains(self, vector) -> bool:
        return not self.reduce(vector).any()

    def add(self, vector) -> bool:
        """Add a vector; returns True when it enlarged the span."""
        v = self.reduce(vector)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        pivot = int(nz[0])
        idx = 0
        while idx < len(self._pivots) and self._pivots[idx] < pivot:
            idx += 1
        self._pivots.insert(idx, pivot)
        self._rows.insert(idx, v)
        return True
