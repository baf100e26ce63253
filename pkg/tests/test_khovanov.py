import pytest
import sys
import os

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from diagram import disjoint_union, mirror, parse_pd
from errors import CircleMismatch, TooManyCrossings
from khovanov import (
    build_cube,
    chain_complex,
    determinant_from_dims,
    euler_characteristic,
    graded_euler_det,
    homology,
    jones_from_khovanov,
    kh_homology,
    khr_homology,
    merge_map,
    phi_infinity,
    split_map,
)
from linalg import apply_rows, rank_f2
from pretzel import braid_closure

TREFOIL = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"
FIGURE_EIGHT = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)"

def test_merge_and_split_maps():
    """Merge is onto; split followed by merge vanishes"""
    merge = merge_map(((1,), (2,), (3,)), ((1, 2), (3,)), (0, 1))
    assert (merge.rows, merge.cols) == (8, 4)
    assert rank_f2(merge) == 4

    split = split_map(((1, 2),), ((1,), (2,)), (0, 1))
    back = merge_map(((1,), (2,)), ((1, 2),), (0, 1))
    assert (split @ back).is_zero()

def test_merge_rejects_wrong_target():
    """Circle lists that do not fit a merge are rejected"""
    with pytest.raises(CircleMismatch):
        merge_map(((1,), (2,), (3,)), ((1, 3), (2,)), (0, 1))
    with pytest.raises(CircleMismatch):
        merge_map(((1,), (2,)), ((1, 2),), (0, 0))

def test_unknot_homology():
    """Unknot: Kh is two classes in h = 0, Khr is one"""
    d = parse_pd("U(1)")
    assert kh_homology(d).table == {(0, -1): 1, (0, 1): 1}
    assert khr_homology(d).table == {(0, 0): 1}

def test_kink_matches_unknot():
    """A one-crossing kink has unknot homology"""
    kink = parse_pd("X(1,1,2,2)")
    assert kh_homology(kink) == kh_homology(parse_pd("U(1)"))

def test_trefoil_tables():
    """Trefoil Khovanov tables"""
    d = parse_pd(TREFOIL)
    assert khr_homology(d).table == {(0, 2): 1, (2, 6): 1, (3, 8): 1}
    assert kh_homology(d).table == {
        (0, 1): 1, (0, 3): 1, (2, 5): 1, (2, 7): 1, (3, 7): 1, (3, 9): 1,
    }

def test_mirror_is_dual():
    """Khr of the mirror is the dual table"""
    d = parse_pd(TREFOIL)
    assert khr_homology(mirror(d)) == khr_homology(d).dual()

def test_unlink_splitting():
    """Two-component unlink: dim Kh = 4, dim Khr = 2"""
    d = parse_pd("U(2)")
    assert kh_homology(d).total == 4
    assert khr_homology(d).total == 2

def test_square_zero_and_gradings():
    """d squares to zero and preserves q, raising h by one"""
    cube = build_cube(parse_pd(FIGURE_EIGHT))
    for reduced in (False, True):
        cx = chain_complex(cube, reduced=reduced)
        cx.check_square_zero()
        for i, row in enumerate(cx.rows):
            j = 0
            while row:
                if row & 1:
                    assert cx.q[j] == cx.q[i]
                    assert cx.h[j] == cx.h[i] + 1
                row >>= 1
                j += 1

def test_phi_infinity_is_chain_map():
    """Wedging with the basepoint circle squares to zero and commutes with d"""
    cube = build_cube(parse_pd(TREFOIL))
    cx = chain_complex(cube)
    phi = phi_infinity(cube)
    assert len(phi) == cube.total_dim
    for i in range(len(cx)):
        assert apply_rows(phi, phi[i]) == 0
        assert apply_rows(cx.rows, phi[i]) == apply_rows(phi, cx.rows[i])

def test_euler_characteristic():
    """Graded Euler characteristic of the trefoil"""
    khr = khr_homology(parse_pd(TREFOIL))
    assert euler_characteristic(khr) == {2: 1, 6: 1, 8: -1}
    assert jones_from_khovanov is euler_characteristic

def test_determinant_from_dims():
    """|chi| at q = i recovers the determinant"""
    assert determinant_from_dims(khr_homology(parse_pd(TREFOIL))) == 3
    assert graded_euler_det(parse_pd(FIGURE_EIGHT)) == 5
    assert graded_euler_det(parse_pd("U(2)")) == 0

def test_parallel_slices_agree():
    """joblib workers give the same table as a single process"""
    cx = chain_complex(build_cube(parse_pd(FIGURE_EIGHT)), reduced=True)
    assert homology(cx, n_jobs=2) == homology(cx, n_jobs=1)

def test_crossing_limit():
    """Cubes past the crossing limit are refused"""
    with pytest.raises(TooManyCrossings):
        build_cube(parse_pd(TREFOIL), crossing_limit=2)

def test_trefoil_cube_census():
    """Three crossings give 8 vertices and 12 edges"""
    cube = build_cube(parse_pd(TREFOIL))
    assert len(cube.resolutions) == 8
    assert len(cube.edges) == 12
    assert cube.resolutions[0].n_circles == 2
    assert cube.resolutions[7].n_circles == 3

def test_split_circle_doubles_homology():
    """Adding a split circle tensors with V: each class moves to q - 1 and q + 1"""
    trefoil = parse_pd(TREFOIL)
    union = disjoint_union(trefoil, parse_pd("U(1)"))

    for dims, doubled in (
        (kh_homology(trefoil), kh_homology(union)),
        (khr_homology(trefoil), khr_homology(union)),
    ):
        expected = {}
        for (h, q), n in dims.table.items():
            for shift in (-1, 1):
                expected[(h, q + shift)] = expected.get((h, q + shift), 0) + n
        assert doubled.table == expected
        assert doubled.total == 2 * dims.total

def test_braid_r3_pair():
    """sigma1 sigma2 sigma1 sigma1 and sigma2 sigma1 sigma2 sigma1 close to the same trefoil"""
    first = khr_homology(braid_closure([1, 2, 1, 1]))
    second = khr_homology(braid_closure([2, 1, 2, 1]))
    trefoil = khr_homology(parse_pd(TREFOIL))
    assert first == second
    assert first in (trefoil, trefoil.dual())
