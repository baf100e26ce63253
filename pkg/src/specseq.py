"""Spectral sequences of finite filtered F2 complexes.

Generators are kept sorted by filtration weight so that ``F_p`` is a prefix
of the basis. For r >= 1

    Z_r^p = {x in F_p : dx in F_(p-r)}
    E_r^p = Z_r^p / (Z_(r-1)^(p-1) + d Z_(r-1)^(p+r-1))

with Z_r^p = F_p for r <= 0, so E_1 is the homology of the associated
graded and d_r lowers the weight by r.
"""

from bisect import bisect_right
from dataclasses import dataclass, field

from diagram import mirror
from errors import InvalidPage, InvariantViolation
from khovanov import DEFAULT_CROSSING_LIMIT, build_cube, chain_complex
from linalg import Echelon, F2Matrix, apply_rows, left_null_rows, rank_rows
from logger import get_logger

logger = get_logger(__name__)


@dataclass
class FilteredComplex:
    weights: list
    gradings: list
    rows: list
    labels: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.weights)
        if len(self.gradings) != n or len(self.rows) != n:
            raise ValueError("weights, gradings and rows must have equal length")
        if any(self.weights[i] > self.weights[i + 1] for i in range(n - 1)):
            raise ValueError("generators must be sorted by weight; use FilteredComplex.build")
        if not self.labels:
            self.labels = list(range(n))
        self.validate()

    @classmethod
    def build(cls, weights, gradings, rows, labels=None):
        """Sort generators by weight (stably) and remap the differential."""
        n = len(weights)
        order = sorted(range(n), key=lambda i: weights[i])
        new_index = {old: new for new, old in enumerate(order)}
        remapped = []
        for old in order:
            row, out = rows[old], 0
            while row:
                low = row & -row
                out |= 1 << new_index[low.bit_length() - 1]
                row ^= low
            remapped.append(out)
        labels = list(labels) if labels is not None else list(range(n))
        return cls(
            [weights[i] for i in order],
            [gradings[i] for i in order],
            remapped,
            [labels[i] for i in order],
        )

    def __len__(self):
        return len(self.weights)

    def validate(self):
        for g, row in enumerate(self.rows):
            if row and self.weights[row.bit_length() - 1] > self.weights[g]:
                raise InvariantViolation(f"differential raises the weight of generator {g}")
        for g, row in enumerate(self.rows):
            if apply_rows(self.rows, row):
                raise InvariantViolation(f"d^2 != 0 at generator {g}")

    @property
    def spread(self):
        return self.weights[-1] - self.weights[0] if self.weights else 0

    def prefix(self, p):
        return bisect_right(self.weights, p)

    def apply(self, vec):
        return apply_rows(self.rows, vec)

    def is_graded(self):
        return all(
            self.gradings[j] == self.gradings[g]
            for g, row in enumerate(self.rows)
            for j in _bits(row)
        )


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass
class PageTable:
    r: int
    dims: dict
    graded: dict = field(default_factory=dict)
    differentials: dict = field(default_factory=dict, repr=False)

    @property
    def total(self):
        return sum(self.dims.values())

    def as_rows(self):
        return [[w, n] for w, n in sorted(self.dims.items())]

    def to_json(self):
        return {"r": self.r, "dims": self.as_rows()}


class _PageEngine:
    """Z/B subspaces of one filtered complex, memoized per (r, p)."""

    def __init__(self, fc):
        self.fc = fc
        self._z = {}

    def z(self, r, p):
        key = (r, p)
        if key not in self._z:
            top = self.fc.prefix(p)
            if r <= 0:
                basis = [1 << g for g in range(top)]
            else:
                low = self.fc.prefix(p - r)
                basis = left_null_rows([self.fc.rows[g] >> low for g in range(top)])
            self._z[key] = basis
        return self._z[key]

    def denominator(self, r, p):
        vecs = list(self.z(r - 1, p - 1))
        vecs += [self.fc.apply(x) for x in self.z(r - 1, p + r - 1)]
        return vecs

    def dim(self, r, p):
        return len(self.z(r, p)) - rank_rows(self.denominator(r, p))

    def representatives(self, r, p):
        ech = Echelon()
        for v in self.denominator(r, p):
            ech.add(v)
        reps = []
        for z in self.z(r, p):
            if ech.add(z):
                reps.append(z)
        return reps

    def differential(self, r, p):
        """Matrix of d_r: E_r^p -> E_r^(p-r), one row per source class."""
        source = self.representatives(r, p)
        target = self.representatives(r, p - r)
        ech = Echelon()
        for v in self.denominator(r, p - r):
            ech.add(v, 0)
        for i, t in enumerate(target):
            ech.add(t, 1 << i)
        rows = []
        for x in source:
            residual, tag = ech.reduce(self.fc.apply(x))
            if residual:
                raise InvariantViolation(
                    f"d_{r} of a class at weight {p} leaves Z_{r} at weight {p - r}"
                )
            rows.append(tag)
        return F2Matrix(len(source), len(target), tuple(rows))


def _weights(fc):
    return sorted(set(fc.weights))


def _grading_slices(fc):
    """Split into grading-homogeneous subcomplexes when d preserves the grading."""
    if not fc.is_graded():
        return [(None, fc)]
    groups = {}
    for g, q in enumerate(fc.gradings):
        groups.setdefault(q, []).append(g)
    slices = []
    for q, members in sorted(groups.items()):
        local = {g: i for i, g in enumerate(members)}
        rows = []
        for g in members:
            out = 0
            for j in _bits(fc.rows[g]):
                out |= 1 << local[j]
            rows.append(out)
        sub = FilteredComplex(
            [fc.weights[g] for g in members],
            [q] * len(members),
            rows,
            [fc.labels[g] for g in members],
        )
        slices.append((q, sub))
    return slices


def page(fc, r, with_differentials=True):
    if r < 1:
        raise InvalidPage(f"page index must be at least 1, got {r}")
    dims, graded, differentials = {}, {}, {}
    for q, sub in _grading_slices(fc):
        engine = _PageEngine(sub)
        for p in _weights(sub):
            n = engine.dim(r, p)
            if n:
                dims[p] = dims.get(p, 0) + n
                graded[(p, q)] = n
        if with_differentials:
            for p in _weights(sub):
                differentials[(p, q)] = engine.differential(r, p)
            for p in _weights(sub):
                outgoing = differentials[(p, q)]
                following = differentials.get((p - r, q))
                if following is not None and outgoing.rows and following.cols:
                    if not (outgoing @ following).is_zero():
                        raise InvariantViolation(f"d_{r} squares to a non-zero map at weight {p}")
    logger.debug(f"E_{r}: {sum(dims.values())} classes over {len(dims)} weights")
    return PageTable(r, dict(sorted(dims.items())), dict(sorted(graded.items())), differentials)


def e_infinity(fc):
    return page(fc, fc.spread + 1, with_differentials=False)


def pages(fc, last=None):
    last = fc.spread + 1 if last is None else last
    return [page(fc, r, with_differentials=False) for r in range(1, last + 1)]


def total_homology_dim(fc):
    return len(fc) - 2 * rank_rows(fc.rows)


def inject_differential(fc, extra):
    """Add ``extra`` (generator -> image mask) to d; the result is revalidated."""
    rows = list(fc.rows)
    for g, image in extra.items():
        rows[g] ^= image
    return FilteredComplex(list(fc.weights), list(fc.gradings), rows, list(fc.labels))


def from_cube(cube, reduced=True, basepoint=None):
    """Filtered complex of a cube with the descending weight N - |u|.

    Only the edge maps enter the differential; maps between vertices at
    distance two or more are taken to be zero.
    """
    if basepoint is not None and basepoint != cube.diagram.basepoint:
        d = cube.diagram
        cube = build_cube(
            type(d).from_crossings(d.crossings, d.n_unknotted, basepoint, name=d.name),
            crossing_limit=max(d.n_crossings, DEFAULT_CROSSING_LIMIT),
        )
    cx = chain_complex(cube, reduced=reduced)
    n = cube.n_crossings
    weights = [n - u.bit_count() for u, _ in cx.generators]
    gradings = [int(x) for x in cx.q]
    fc = FilteredComplex.build(weights, gradings, cx.rows, labels=cx.generators)
    logger.info(f"Filtered complex with {len(fc)} generators, weights 0..{n}")
    return fc


def for_link(d, reduced=True, crossing_limit=DEFAULT_CROSSING_LIMIT):
    """Weight-filtered complex whose E_2 page is Khr of the mirror of ``d``."""
    return from_cube(build_cube(mirror(d), crossing_limit), reduced=reduced)


def page_table_json(tables):
    return [t.to_json() for t in tables]


def spectral_summary(fc, last_page=None):
    tables = pages(fc, last_page)
    return {
        "pages": page_table_json(tables),
        "e_infinity_total": e_infinity(fc).total,
    }
