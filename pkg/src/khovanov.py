"""Khovanov homology over F2 from the cube of resolutions.

The space at a vertex is the exterior algebra on its circles; a basis
element is a subset of circles, stored as a bitmask over the canonical
circle order. Edge maps are stored with one row per source monomial,
each row a bitset over target monomials.
"""

from dataclasses import dataclass, field
from math import isqrt

import numpy as np
from joblib import Parallel, delayed

from diagram import resolve
from errors import CircleMismatch, InvariantViolation, TooManyCrossings
from linalg import F2Matrix, apply_rows, rank_rows
from logger import get_logger

logger = get_logger(__name__)

DEFAULT_CROSSING_LIMIT = 14


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _circle_index(circles):
    return {x: i for i, circle in enumerate(circles) for x in circle}


def _circle_map(source, target):
    """Index of the target circle containing each source circle."""
    tgt_of = _circle_index(target)
    try:
        f = [tgt_of[c[0]] for c in source]
    except KeyError as exc:
        raise CircleMismatch(f"strand {exc.args[0]} is missing from the target circles") from exc
    for i, c in enumerate(source):
        if any(tgt_of.get(x) != f[i] for x in c):
            raise CircleMismatch(f"source circle {c} is split across target circles")
    return f


def merge_map(source, target, pair):
    """Quotient map Lambda V -> Lambda V/(x+y) when circles x and y fuse."""
    x, y = pair
    if len(source) < 2 or x == y or not (0 <= x < len(source) and 0 <= y < len(source)):
        raise CircleMismatch(f"cannot merge circles {pair} of a {len(source)}-circle vertex")
    if len(target) != len(source) - 1:
        raise CircleMismatch("a merge must lower the circle count by one")
    f = _circle_map(source, target)
    if f[x] != f[y] or len(set(f)) != len(target):
        raise CircleMismatch(f"target is not the source with circles {pair} merged")

    rows = []
    for mono in range(1 << len(source)):
        if mono >> x & 1 and mono >> y & 1:
            rows.append(0)
            continue
        image = 0
        for i in _bits(mono):
            image |= 1 << f[i]
        rows.append(1 << image)
    return F2Matrix(1 << len(source), 1 << len(target), tuple(rows))


def split_map(source, target, outputs):
    """Wedge with (x+y) after lifting into the split vertex."""
    x, y = outputs
    if x == y or not (0 <= x < len(target) and 0 <= y < len(target)):
        raise CircleMismatch(f"invalid split outputs {outputs}")
    if len(target) != len(source) + 1:
        raise CircleMismatch("a split must raise the circle count by one")
    g = _circle_map(target, source)
    if g[x] != g[y] or len(set(g)) != len(source):
        raise CircleMismatch(f"circles {outputs} do not come from one source circle")

    z = g[x]
    lift = {}
    for j, i in enumerate(g):
        if i != z:
            lift[i] = j

    rows = []
    for mono in range(1 << len(source)):
        base = 0
        for i in _bits(mono):
            if i != z:
                base |= 1 << lift[i]
        if mono >> z & 1:
            rows.append(1 << (base | 1 << x | 1 << y))
        else:
            rows.append((1 << (base | 1 << x)) ^ (1 << (base | 1 << y)))
    return F2Matrix(1 << len(source), 1 << len(target), tuple(rows))


@dataclass(frozen=True)
class EdgeMap:
    kind: str
    matrix: F2Matrix


def edge_map(src, tgt):
    if tgt.n_circles == src.n_circles - 1:
        f = _circle_map(src.circles, tgt.circles)
        seen = {}
        for i, j in enumerate(f):
            if j in seen:
                return EdgeMap("merge", merge_map(src.circles, tgt.circles, (seen[j], i)))
            seen[j] = i
    if tgt.n_circles == src.n_circles + 1:
        g = _circle_map(tgt.circles, src.circles)
        seen = {}
        for j, i in enumerate(g):
            if i in seen:
                return EdgeMap("split", split_map(src.circles, tgt.circles, (seen[i], j)))
            seen[i] = j
    raise InvariantViolation(
        f"edge {src.vertex} -> {tgt.vertex} changes {src.n_circles} circles to {tgt.n_circles}"
    )


@dataclass
class CubeComplex:
    diagram: object
    resolutions: list
    offsets: list
    edges: dict
    p: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)

    @property
    def n_crossings(self):
        return self.diagram.n_crossings

    @property
    def total_dim(self):
        return int(self.offsets[-1] + (1 << self.resolutions[-1].n_circles))


def vertex_tuple(u, n):
    return tuple(u >> k & 1 for k in range(n))


def build_cube(d, crossing_limit=DEFAULT_CROSSING_LIMIT):
    n = d.n_crossings
    if n > crossing_limit:
        raise TooManyCrossings(
            f"{d.name or 'diagram'} has {n} crossings, limit is {crossing_limit}"
        )
    logger.info(f"Building cube for {d.name or 'diagram'}: {1 << n} vertices")

    resolutions = [resolve(d, vertex_tuple(u, n)) for u in range(1 << n)]
    offsets = []
    total = 0
    for res in resolutions:
        offsets.append(total)
        total += 1 << res.n_circles

    edges = {}
    for u in range(1 << n):
        for k in range(n):
            if not u >> k & 1:
                edges[(u, k)] = edge_map(resolutions[u], resolutions[u | 1 << k])

    p = np.empty(total, dtype=np.int64)
    h = np.empty(total, dtype=np.int64)
    for u, res in enumerate(resolutions):
        c = res.n_circles
        sizes = np.array([m.bit_count() for m in range(1 << c)], dtype=np.int64)
        p[offsets[u] : offsets[u] + sizes.size] = c - 2 * sizes
        h[offsets[u] : offsets[u] + sizes.size] = u.bit_count() - d.n_minus
    q = p + h + d.n_plus - d.n_minus

    logger.debug(f"Cube has total dimension {total} and {len(edges)} edges")
    return CubeComplex(d, resolutions, offsets, edges, p, h, q)


@dataclass
class BigradedF2Complex:
    """Generators with (h, q) gradings; ``rows[i]`` is d of generator i."""

    generators: list
    h: np.ndarray
    q: np.ndarray
    rows: list
    reduced: bool = False

    def __len__(self):
        return len(self.generators)

    def check_square_zero(self):
        for i, row in enumerate(self.rows):
            if apply_rows(self.rows, row):
                raise InvariantViolation(f"d^2 != 0 at generator {self.generators[i]}")


def chain_complex(cube, reduced=False):
    """Total complex; the reduced one keeps monomials off the basepoint circle."""
    gens = []
    index = {}
    for u, res in enumerate(cube.resolutions):
        b = res.basepoint_circle
        for mono in range(1 << res.n_circles):
            if reduced and mono >> b & 1:
                continue
            index[(u, mono)] = len(gens)
            gens.append((u, mono))

    n = cube.n_crossings
    rows = []
    for u, mono in gens:
        image = 0
        for k in range(n):
            if u >> k & 1:
                continue
            target = u | 1 << k
            for t in _bits(cube.edges[(u, k)].matrix.bits[mono]):
                j = index.get((target, t))
                if j is not None:
                    image ^= 1 << j
        rows.append(image)

    flat = np.array([cube.offsets[u] + mono for u, mono in gens], dtype=np.int64)
    h = cube.h[flat] if gens else np.zeros(0, dtype=np.int64)
    q = cube.q[flat] if gens else np.zeros(0, dtype=np.int64)
    if reduced:
        q = q - 1
    return BigradedF2Complex(gens, h, q, rows, reduced)


def phi_infinity(cube):
    """Wedge with the basepoint circle, as row images over the unreduced total."""
    rows = []
    for u, res in enumerate(cube.resolutions):
        b = res.basepoint_circle
        for mono in range(1 << res.n_circles):
            if mono >> b & 1:
                rows.append(0)
            else:
                rows.append(1 << (cube.offsets[u] + (mono | 1 << b)))
    return rows


@dataclass(frozen=True)
class BigradedDims:
    table: dict

    def __getitem__(self, key):
        return self.table.get(key, 0)

    @property
    def total(self):
        return sum(self.table.values())

    def as_rows(self):
        return [[h, q, n] for (h, q), n in sorted(self.table.items())]

    def dual(self):
        return BigradedDims({(-h, -q): n for (h, q), n in self.table.items()})


def _slice_dims(q, groups):
    ranks = {h: rank_rows(rows) for h, rows in groups.items()}
    out = {}
    for h, rows in groups.items():
        dim = len(rows) - ranks[h] - ranks.get(h - 1, 0)
        if dim:
            out[(h, q)] = dim
    return out


def homology(cx, n_jobs=1):
    """Per-(h, q) homology dimensions; q-slices are independent."""
    slices = {}
    for i in range(len(cx)):
        slices.setdefault(int(cx.q[i]), {}).setdefault(int(cx.h[i]), []).append(cx.rows[i])

    results = Parallel(n_jobs=n_jobs)(
        delayed(_slice_dims)(q, groups) for q, groups in sorted(slices.items())
    )
    table = {}
    for part in results:
        table.update(part)
    return BigradedDims(dict(sorted(table.items())))


def kh_homology(d, n_jobs=1, crossing_limit=DEFAULT_CROSSING_LIMIT):
    cube = build_cube(d, crossing_limit)
    dims = homology(chain_complex(cube), n_jobs)
    logger.info(f"Kh({d.name or 'diagram'}): total dimension {dims.total}")
    return dims


def khr_homology(d, n_jobs=1, crossing_limit=DEFAULT_CROSSING_LIMIT):
    cube = build_cube(d, crossing_limit)
    dims = homology(chain_complex(cube, reduced=True), n_jobs)
    logger.info(f"Khr({d.name or 'diagram'}): total dimension {dims.total}")
    return dims


def euler_characteristic(dims):
    """Graded Euler characteristic as {q: coefficient}, zero terms dropped."""
    poly = {}
    for (h, q), n in dims.table.items():
        poly[q] = poly.get(q, 0) + (-1) ** (h % 2) * n
    return {q: c for q, c in sorted(poly.items()) if c}


jones_from_khovanov = euler_characteristic


_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def determinant_from_dims(dims):
    re_part = im_part = 0
    for (h, q), n in dims.table.items():
        sign = -1 if h % 2 else 1
        re, im = _I_POWERS[q % 4]
        re_part += sign * re * n
        im_part += sign * im * n
    norm = re_part * re_part + im_part * im_part
    root = isqrt(norm)
    if root * root != norm:
        raise InvariantViolation(
            f"Euler characteristic at q = i is {re_part}+{im_part}i, not of integer modulus"
        )
    return root


def graded_euler_det(d, n_jobs=1, crossing_limit=DEFAULT_CROSSING_LIMIT):
    """|det| from reduced Khovanov homology evaluated at q = sqrt(-1)."""
    return determinant_from_dims(khr_homology(d, n_jobs, crossing_limit))
