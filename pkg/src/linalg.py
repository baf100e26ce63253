"""Exact linear algebra over F2 and the integers.

F2 rows are Python ints used as bitsets: bit ``j`` of a row is column ``j``.
Elimination always pivots on the lowest set bit, so results are
deterministic for a given row order.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as _sympy_snf

from errors import NotASubspace


def _low_bit(vec):
    return (vec & -vec).bit_length() - 1


def parity(vec):
    return vec.bit_count() & 1


@dataclass(frozen=True)
class F2Matrix:
    rows: int
    cols: int
    bits: tuple

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if len(self.bits) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.bits)}")
        mask = (1 << self.cols) - 1
        for b in self.bits:
            if b < 0 or b & ~mask:
                raise ValueError("row has bits set beyond the column count")

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_rows(cls, rows, cols):
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_dense(cls, array):
        a = np.asarray(array, dtype=np.int64) % 2
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        n_rows, n_cols = a.shape
        packed = np.packbits(a.astype(np.uint8), axis=1, bitorder="little")
        bits = tuple(int.from_bytes(row.tobytes(), "little") for row in packed)
        if n_cols == 0:
            bits = (0,) * n_rows
        return cls(n_rows, n_cols, bits)

    def to_dense(self):
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        if self.cols == 0:
            return out
        n_bytes = (self.cols + 7) // 8
        for i, b in enumerate(self.bits):
            raw = np.frombuffer(b.to_bytes(n_bytes, "little"), dtype=np.uint8)
            out[i] = np.unpackbits(raw, bitorder="little")[: self.cols]
        return out

    def transpose(self):
        cols = [0] * self.cols
        for i, b in enumerate(self.bits):
            while b:
                j = _low_bit(b)
                cols[j] |= 1 << i
                b &= b - 1
        return F2Matrix(self.cols, self.rows, tuple(cols))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for b in self.bits:
            acc = 0
            while b:
                acc ^= other.bits[_low_bit(b)]
                b &= b - 1
            out.append(acc)
        return F2Matrix(self.rows, other.cols, tuple(out))

    def mul_vec(self, vec):
        """m.x for a column vector packed as an int of ``cols`` bits."""
        out = 0
        for i, b in enumerate(self.bits):
            if parity(b & vec):
                out |= 1 << i
        return out

    def is_zero(self):
        return not any(self.bits)


class Echelon:
    """Incremental echelon basis; each stored vector carries a tag that is
    combined alongside it, so reductions also report their combination."""

    def __init__(self):
        self.pivots = {}

    def __len__(self):
        return len(self.pivots)

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, vec, tag=0):
        while vec:
            low = _low_bit(vec)
            hit = self.pivots.get(low)
            if hit is None:
                break
            vec ^= hit[0]
            tag ^= hit[1]
        return vec, tag

    def add(self, vec, tag=0):
        vec, tag = self.reduce(vec, tag)
        if not vec:
            return False
        self.pivots[_low_bit(vec)] = (vec, tag)
        return True

    def contains(self, vec):
        return self.reduce(vec)[0] == 0


def rank_rows(rows):
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def rank_f2(m):
    return rank_rows(m.bits)


def left_null_rows(rows):
    """Basis of {y : sum_i y_i rows[i] = 0}, each y packed over row indices."""
    ech = Echelon()
    null = []
    for i, row in enumerate(rows):
        vec, combo = ech.reduce(row, 1 << i)
        if vec:
            ech.pivots[_low_bit(vec)] = (vec, combo)
        else:
            null.append(combo)
    return null


def kernel_basis_f2(m):
    """Rows span {x : m.x = 0}; there are cols - rank of them."""
    basis = left_null_rows(m.transpose().bits)
    return F2Matrix(len(basis), m.cols, tuple(basis))


def quotient_dim_f2(space, subspace):
    if space.cols != subspace.cols:
        raise NotASubspace(f"column counts differ: {space.cols} vs {subspace.cols}")
    ech = Echelon()
    for r in space.bits:
        ech.add(r)
    for i, r in enumerate(subspace.bits):
        if not ech.contains(r):
            raise NotASubspace(f"subspace row {i} is outside the span of the space")
    return ech.rank - rank_f2(subspace)


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) != self.rows or any(len(r) != self.cols for r in entries):
            raise ValueError("IntMatrix must be rectangular with the declared shape")

    @classmethod
    def from_lists(cls, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(tuple(r) for r in rows))

    def to_sympy(self):
        return Matrix(self.rows, self.cols, [x for row in self.entries for x in row])

    def is_symmetric(self):
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows)
            for j in range(i)
        )


def normalize_divisibility(diag):
    d = [abs(int(x)) for x in diag]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            a, b = d[i], d[j]
            g = gcd(a, b)
            lcm = 0 if g == 0 else a * b // g
            d[i], d[j] = g, lcm
    return d


def smith_normal_form(m):
    """Invariant factors d1 | d2 | ...; zeros (the nullity) come last."""
    if m.rows == 0 or m.cols == 0:
        return []
    snf = _sympy_snf(m.to_sympy(), domain=ZZ)
    diag = [snf[i, i] for i in range(min(m.rows, m.cols))]
    return normalize_divisibility(diag)


def int_determinant(m):
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    if m.rows == 0:
        return 1
    return int(m.to_sympy().det())


def apply_rows(rows, vec):
    """Image of a row vector under a map given by its row images."""
    out = 0
    while vec:
        out ^= rows[_low_bit(vec)]
        vec &= vec - 1
    return out
