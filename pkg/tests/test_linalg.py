import numpy as np
import pytest
import sys
import os

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from errors import NotASubspace
from linalg import (
    Echelon,
    F2Matrix,
    IntMatrix,
    int_determinant,
    kernel_basis_f2,
    left_null_rows,
    normalize_divisibility,
    quotient_dim_f2,
    rank_f2,
    smith_normal_form,
)

def test_dense_conversion():
    """Packed rows agree with the dense 0/1 array"""
    dense = np.array([[1, 0, 1, 1, 0, 0, 0, 0, 1], [0, 1, 1, 0, 0, 0, 0, 0, 0]])
    m = F2Matrix.from_dense(dense)
    assert m.bits[0] == 0b100001101
    assert m.bits[1] == 0b110
    assert (m.to_dense() == dense).all()

def test_matmul_matches_numpy():
    """Product over F2 equals the integer product mod 2"""
    rng = np.random.default_rng(7)
    a = rng.integers(0, 2, size=(5, 7))
    b = rng.integers(0, 2, size=(7, 4))
    product = F2Matrix.from_dense(a) @ F2Matrix.from_dense(b)
    assert (product.to_dense() == (a @ b) % 2).all()

def test_shape_checks():
    """Bad shapes are rejected"""
    with pytest.raises(ValueError):
        F2Matrix(1, 2, (0b100,))
    with pytest.raises(ValueError):
        F2Matrix.identity(2) @ F2Matrix.identity(3)

def test_rank_and_kernel():
    """rank + nullity = number of columns"""
    m = F2Matrix.from_dense([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]])
    assert rank_f2(m) == 2

    kernel = kernel_basis_f2(m)
    assert kernel.rows == m.cols - rank_f2(m)
    for x in kernel.bits:
        assert m.mul_vec(x) == 0

def test_left_null_rows():
    """Dependencies among rows are reported as index masks"""
    null = left_null_rows([0b011, 0b110, 0b101])
    assert null == [0b111]

def test_echelon_tags():
    """Tags follow the vectors through reduction"""
    ech = Echelon()
    assert ech.add(0b011, tag=0b01)
    assert ech.add(0b110, tag=0b10)
    assert not ech.add(0b011)

    residual, tag = ech.reduce(0b101)
    assert residual == 0
    assert tag == 0b11
    assert ech.rank == 2

def test_quotient_dim():
    """Quotient dimension and the subspace check"""
    space = F2Matrix.identity(3)
    sub = F2Matrix.from_rows([0b011], 3)
    assert quotient_dim_f2(space, sub) == 2

    with pytest.raises(NotASubspace):
        quotient_dim_f2(F2Matrix.from_rows([0b001], 3), sub)

def test_smith_normal_form():
    """Invariant factors divide each other; zeros come last"""
    assert smith_normal_form(IntMatrix.from_lists([[2, 0], [0, 3]])) == [1, 6]
    assert smith_normal_form(IntMatrix.from_lists([[2, 4], [6, 8]])) == [2, 4]
    assert smith_normal_form(IntMatrix.from_lists([[0, 0], [0, 5]])) == [5, 0]
    assert smith_normal_form(IntMatrix.from_lists([], 0)) == []

def test_normalize_divisibility():
    """Pairwise gcd/lcm fixes the divisibility order"""
    assert normalize_divisibility([4, 6]) == [2, 12]
    assert normalize_divisibility([0, 2]) == [2, 0]
    assert normalize_divisibility([3, 3, 0]) == [3, 3, 0]

def test_int_determinant():
    """Exact integer determinants; the empty matrix has determinant one"""
    assert int_determinant(IntMatrix.from_lists([[2, -1], [-1, 2]])) == 3
    assert int_determinant(IntMatrix.from_lists([], 0)) == 1
    assert IntMatrix.from_lists([[2, -1], [-1, 2]]).is_symmetric()
    with pytest.raises(ValueError):
        int_determinant(IntMatrix.from_lists([[1, 2]]))

def test_rank_of_transpose():
    """Row rank equals column rank on random matrices up to 64x64"""
    rng = np.random.default_rng(3)
    for rows, cols in [(1, 1), (3, 9), (17, 5), (33, 40), (64, 64)]:
        dense = rng.integers(0, 2, size=(rows, cols))
        m = F2Matrix.from_dense(dense)
        assert rank_f2(m) == rank_f2(m.transpose())

def test_rank_nullity_random():
    """cols = rank + kernel rows, and the kernel is killed by the matrix"""
    rng = np.random.default_rng(5)
    for rows, cols in [(4, 4), (6, 11), (20, 8), (64, 64)]:
        dense = rng.integers(0, 2, size=(rows, cols))
        # repeat a row so the rank is not always full
        dense[-1] = dense[0]
        m = F2Matrix.from_dense(dense)
        kernel = kernel_basis_f2(m)
        assert m.cols == rank_f2(m) + kernel.rows
        assert rank_f2(kernel) == kernel.rows
        for x in kernel.bits:
            assert m.mul_vec(x) == 0

def _span(rows):
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return span

def test_quotient_dim_brute_force():
    """Quotient dimension agrees with counting the spans"""
    rng = np.random.default_rng(13)
    for _ in range(5):
        space = F2Matrix.from_dense(rng.integers(0, 2, size=(6, 6)))
        combos = rng.integers(0, 2, size=(3, 6))
        sub_rows = []
        for combo in combos:
            row = 0
            for i, bit in enumerate(combo):
                if bit:
                    row ^= space.bits[i]
            sub_rows.append(row)
        sub = F2Matrix.from_rows(sub_rows, 6)

        expected = len(_span(space.bits)).bit_length() - len(_span(sub.bits)).bit_length()
        assert quotient_dim_f2(space, sub) == expected

def test_smith_normal_form_example():
    """[[2,1],[1,2]] has invariant factors 1 and 3"""
    assert smith_normal_form(IntMatrix.from_lists([[2, 1], [1, 2]])) == [1, 3]

def _unimodular(rng, n, steps=12):
    u = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        u[i] += int(rng.integers(-2, 3)) * u[j]
        if rng.integers(0, 2):
            u[[i, j]] = u[[j, i]]
    return u

def test_smith_normal_form_unimodular_invariance():
    """Row and column operations over Z leave the invariant factors alone"""
    rng = np.random.default_rng(17)
    for rows, cols in [(3, 3), (4, 5), (5, 2)]:
        a = rng.integers(-4, 5, size=(rows, cols))
        moved = _unimodular(rng, rows) @ a @ _unimodular(rng, cols)
        before = smith_normal_form(IntMatrix.from_lists(a.tolist()))
        after = smith_normal_form(IntMatrix.from_lists(moved.tolist()))
        assert before == after
