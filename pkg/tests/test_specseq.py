import numpy as np
import pytest
import sys
import os

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from diagram import mirror, parse_pd
from errors import InvalidPage, InvariantViolation
from khovanov import build_cube, chain_complex, khr_homology
from specseq import (
    FilteredComplex,
    e_infinity,
    for_link,
    from_cube,
    inject_differential,
    page,
    page_table_json,
    pages,
    spectral_summary,
    total_homology_dim,
)

TREFOIL = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"
TREFOIL_MIRROR = "X(4,2,5,1) X(6,4,1,3) X(2,6,3,5)"
FIGURE_EIGHT = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)"

def _two_step():
    # x in weight 2 hits y in weight 0
    return FilteredComplex.build([2, 0], [0, 0], [1 << 1, 0], labels=["x", "y"])

def test_build_sorts_by_weight():
    """Generators are reordered by weight and d follows them"""
    fc = _two_step()
    assert fc.weights == [0, 2]
    assert fc.labels == ["y", "x"]
    assert fc.rows == [0, 1]
    assert fc.spread == 2

def test_long_differential():
    """A weight-2 differential survives to E_2 and dies on E_3"""
    fc = _two_step()
    assert page(fc, 1).dims == {0: 1, 2: 1}
    e2 = page(fc, 2)
    assert e2.dims == {0: 1, 2: 1}
    assert e2.differentials[(2, 0)].bits == (1,)
    assert page(fc, 3).dims == {}
    assert e_infinity(fc).total == total_homology_dim(fc) == 0

def test_invalid_page():
    """Pages start at 1"""
    with pytest.raises(InvalidPage):
        page(_two_step(), 0)

def test_rejects_bad_complexes():
    """Weight-raising maps and d^2 != 0 are refused"""
    with pytest.raises(InvariantViolation):
        FilteredComplex.build([0, 1], [0, 0], [1 << 1, 0])
    with pytest.raises(InvariantViolation):
        FilteredComplex.build([2, 1, 0], [0, 0, 0], [1 << 1, 1 << 2, 0])
    with pytest.raises(ValueError):
        FilteredComplex([1, 0], [0, 0], [0, 0])

def test_inject_differential():
    """Injected higher differentials are picked up by later pages"""
    fc = FilteredComplex.build([2, 0], [0, 0], [0, 0])
    assert e_infinity(fc).total == 2

    twisted = inject_differential(fc, {1: 1 << 0})
    assert page(twisted, 2).total == 2
    assert page(twisted, 3).total == 0

def test_e2_is_khr_of_mirror():
    """E_2 of the weight filtration matches Khr of the mirror"""
    for code in (TREFOIL_MIRROR, FIGURE_EIGHT):
        d = parse_pd(code)
        fc = for_link(d)
        assert page(fc, 2).total == khr_homology(mirror(d)).total
        assert e_infinity(fc).total == total_homology_dim(fc)

def test_trefoil_mirror_e2_total():
    """The mirror trefoil has three classes on E_2"""
    fc = for_link(parse_pd(TREFOIL_MIRROR))
    assert page(fc, 2).total == 3
    # edge maps only: the sequence collapses at E_2
    assert [t.total for t in pages(fc)][1:] == [3] * fc.spread

def test_unknot_single_cell():
    """The unknot has one generator in weight 0"""
    fc = for_link(parse_pd("U(1)"))
    assert len(fc) == 1
    assert page(fc, 1).dims == {0: 1}
    assert spectral_summary(fc) == {"pages": [{"r": 1, "dims": [[0, 1]]}], "e_infinity_total": 1}

def test_from_cube_weights():
    """Weights run from N down to 0 across the cube"""
    cube = build_cube(parse_pd(TREFOIL))
    fc = from_cube(cube)
    assert set(fc.weights) == {0, 1, 2, 3}
    assert fc.is_graded()

def test_page_table_json():
    """Page tables render as r plus sorted weight rows"""
    fc = _two_step()
    assert page_table_json(pages(fc)) == [
        {"r": 1, "dims": [[0, 1], [2, 1]]},
        {"r": 2, "dims": [[0, 1], [2, 1]]},
        {"r": 3, "dims": []},
    ]

def _random_filtered(seed, size=12):
    # sources map onto cycles of lower weight, so d^2 = 0
    rng = np.random.default_rng(seed)
    weights = sorted(int(w) for w in rng.integers(0, 5, size=size))
    fc = FilteredComplex(weights, [0] * size, [0] * size)
    sources = {int(g) for g in rng.choice(size, size=size // 3, replace=False)}
    extra = {}
    for g in sorted(sources):
        image = 0
        for j in range(size):
            if j not in sources and weights[j] < weights[g] and rng.integers(0, 2):
                image |= 1 << j
        if image:
            extra[g] = image
    return inject_differential(fc, extra)

def _sample_complexes():
    yield for_link(parse_pd(TREFOIL))
    yield for_link(parse_pd(FIGURE_EIGHT))
    for seed in (1, 2, 3):
        yield _random_filtered(seed)

def test_pages_shrink_weightwise():
    """dim E_(r+1)^w <= dim E_r^w at every weight"""
    for fc in _sample_complexes():
        tables = pages(fc, fc.spread + 2)
        for before, after in zip(tables, tables[1:]):
            for w, n in after.dims.items():
                assert n <= before.dims.get(w, 0)

def test_pages_stable_past_spread():
    """E_r = E_(r+1) once r exceeds the spread"""
    for fc in _sample_complexes():
        r = fc.spread + 1
        assert page(fc, r).dims == page(fc, r + 1).dims == page(fc, r + 2).dims
        assert e_infinity(fc).total == total_homology_dim(fc)

def test_e1_counts_vertex_spaces():
    """E_1 at weight w sums 2^(circles - 1) over the vertices with N - |u| = w"""
    for code in (TREFOIL, FIGURE_EIGHT):
        cube = build_cube(parse_pd(code))
        n = cube.n_crossings
        expected = {}
        for u, res in enumerate(cube.resolutions):
            w = n - u.bit_count()
            expected[w] = expected.get(w, 0) + (1 << (res.n_circles - 1))
        assert page(from_cube(cube), 1).dims == expected

def test_first_differential_is_the_edge_map():
    """d_1 matches the reduced Khovanov differential entry by entry"""
    for code in (TREFOIL, FIGURE_EIGHT):
        cube = build_cube(parse_pd(code))
        cx = chain_complex(cube, reduced=True)
        position = {g: i for i, g in enumerate(cx.generators)}
        fc = from_cube(cube)
        e1 = page(fc, 1)
        assert e1.differentials

        for (p, q), matrix in e1.differentials.items():
            cells = list(zip(fc.weights, fc.gradings, fc.labels))
            source = [g for w, gr, g in cells if w == p and gr == q]
            target = [g for w, gr, g in cells if w == p - 1 and gr == q]
            assert (matrix.rows, matrix.cols) == (len(source), len(target))
            for i, s in enumerate(source):
                row = cx.rows[position[s]]
                for j, t in enumerate(target):
                    assert (matrix.bits[i] >> j & 1) == (row >> position[t] & 1)
