"""Model chain complexes for the real monopole tilde theory.

A model is a finite set of irreducible generators plus towers of
reducibles ``a_0, a_1, ...`` with gr(a_i) = base + i. The map upsilon
shifts each tower down (a_i -> a_(i-1)) and may carry extra terms given
explicitly; the check differential is given explicitly. Both lower the
grading by one.

The tilde complex is the mapping cone of upsilon: copy one keeps tower
elements up to index N+1, copy two up to N, and

    d(x, 0) = (dx, 0) + (0, upsilon x),   d(0, x) = (0, dx)

with gr(x, 0) = gr(0, x) = gr(x).
"""

import json
import re
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path

import numpy as np
from jsonschema import Draft7Validator

from errors import CutoffTooSmall, InvalidDims, InvariantViolation, ModelSchemaError, UnknownModel
from linalg import apply_rows, left_null_rows, rank_rows
from logger import get_logger

logger = get_logger(__name__)

DEFAULT_TRUNC_MARGIN = 2

MODEL_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["irreducibles", "towers"],
    "properties": {
        "name": {"type": "string"},
        "irreducibles": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 3,
                "items": [{"type": "string"}, {"type": "integer"}, {"type": "integer"}],
            },
        },
        "towers": {"type": "integer", "minimum": 0},
        "tower_gradings": {"type": "array", "items": {"type": "integer"}},
        "upsilon_extra": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        },
        "check_differential": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        },
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class Tower:
    name: str
    base: int
    spinc: int


@dataclass(frozen=True)
class HmrModel:
    name: str
    irreducibles: tuple
    towers: tuple
    upsilon_extra: dict = field(default_factory=dict, hash=False)
    check_differential: dict = field(default_factory=dict, hash=False)

    @property
    def tower_count(self):
        return len(self.towers)

    @property
    def spinc_count(self):
        return len({t.spinc for t in self.towers} | {i[2] for i in self.irreducibles})

    @property
    def irreducible_gradings(self):
        return [gr for _, gr, _ in self.irreducibles]

    def default_cutoff(self, margin=DEFAULT_TRUNC_MARGIN):
        return max([0] + self.irreducible_gradings) + margin


def tower_element(tower, i):
    return f"{tower.name}_{i}"


def _make_towers(gradings, spincs=None):
    if len(gradings) == 1:
        names = ["a"]
    else:
        names = [f"a{t}" for t in range(len(gradings))]
    spincs = spincs if spincs is not None else [0] * len(gradings)
    return tuple(Tower(n, int(g), int(s)) for n, g, s in zip(names, gradings, spincs))


def make_model(name, irreducibles=(), tower_gradings=(0,), spincs=None,
               upsilon_extra=None, check_differential=None):
    irr = tuple(
        (str(i[0]), int(i[1]), int(i[2]) if len(i) > 2 else 0) for i in irreducibles
    )
    model = HmrModel(
        name,
        irr,
        _make_towers(list(tower_gradings), spincs),
        {k: tuple(v) for k, v in (upsilon_extra or {}).items()},
        {k: tuple(v) for k, v in (check_differential or {}).items()},
    )
    validate_model(model)
    return model


@dataclass
class TruncatedComplex:
    """Finite piece of the check complex with upsilon and d as row images."""

    names: list
    gradings: list
    spincs: list
    d_rows: list
    upsilon_rows: list

    def index(self):
        return {n: i for i, n in enumerate(self.names)}


def _truncated(model, top):
    names, gradings, spincs = [], [], []
    for gen, gr, s in model.irreducibles:
        names.append(gen)
        gradings.append(gr)
        spincs.append(s)
    for tower in model.towers:
        for i in range(top + 1):
            names.append(tower_element(tower, i))
            gradings.append(tower.base + i)
            spincs.append(tower.spinc)
    index = {n: i for i, n in enumerate(names)}
    if len(index) != len(names):
        raise ModelSchemaError(f"model {model.name} has duplicate generator names")

    def rows_for(mapping, shift_towers):
        rows = [0] * len(names)
        for src, dsts in mapping.items():
            if src not in index:
                if _beyond_top(src, top):
                    continue
                raise ModelSchemaError(f"unknown generator {src!r} in model {model.name}")
            for dst in dsts:
                if dst not in index:
                    raise ModelSchemaError(f"unknown generator {dst!r} in model {model.name}")
                rows[index[src]] ^= 1 << index[dst]
        if shift_towers:
            for tower in model.towers:
                for i in range(1, top + 1):
                    rows[index[tower_element(tower, i)]] ^= 1 << index[tower_element(tower, i - 1)]
        return rows

    d_rows = rows_for(model.check_differential, False)
    upsilon_rows = rows_for(model.upsilon_extra, True)
    return TruncatedComplex(names, gradings, spincs, d_rows, upsilon_rows)


_ELEMENT = re.compile(r"^(a\d*)_(\d+)$")


def _beyond_top(name, top):
    m = _ELEMENT.match(name)
    return bool(m) and int(m.group(2)) > top


def validate_model(model, top=None):
    if model.towers and model.towers[0].base != 0:
        raise ModelSchemaError(f"model {model.name}: the first tower must start in grading 0")
    top = model.default_cutoff() + 1 if top is None else top
    tc = _truncated(model, top)
    for label, rows in (("upsilon", tc.upsilon_rows), ("d", tc.d_rows)):
        for i, row in enumerate(rows):
            for j in _bits(row):
                if tc.gradings[j] != tc.gradings[i] - 1:
                    raise ModelSchemaError(
                        f"model {model.name}: {label}({tc.names[i]}) hits {tc.names[j]} "
                        f"in grading {tc.gradings[j]}, expected {tc.gradings[i] - 1}"
                    )
    for i, row in enumerate(tc.d_rows):
        if apply_rows(tc.d_rows, row):
            raise InvariantViolation(f"model {model.name}: d^2 != 0 at {tc.names[i]}")
        d_then_u = apply_rows(tc.upsilon_rows, row)
        u_then_d = apply_rows(tc.d_rows, tc.upsilon_rows[i])
        if d_then_u != u_then_d:
            raise InvariantViolation(
                f"model {model.name}: upsilon is not a chain map at {tc.names[i]}"
            )


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass
class ConeComplex:
    model: str
    cutoff: int
    generators: list
    gradings: list
    spincs: list
    rows: list

    def __len__(self):
        return len(self.generators)

    def check_square_zero(self):
        for i, row in enumerate(self.rows):
            if apply_rows(self.rows, row):
                raise InvariantViolation(f"cone differential squares to non-zero at {self.generators[i]}")


def check_cutoff(model, N):
    need = model.default_cutoff()
    if N is None:
        return need
    if N < need:
        raise CutoffTooSmall(f"cutoff {N} is below {need} for model {model.name}")
    return N


def truncate(model, N=None):
    """Copy one (towers to N+1) and copy two (towers to N) of the check complex."""
    N = check_cutoff(model, N)
    return _truncated(model, N + 1), _truncated(model, N)


def mapping_cone(model, N=None):
    N = check_cutoff(model, N)
    one, two = truncate(model, N)
    two_index = two.index()
    offset = len(one.names)

    def into_two(row_in_one):
        out = 0
        for j in _bits(row_in_one):
            k = two_index.get(one.names[j])
            if k is not None:
                out |= 1 << (offset + k)
        return out

    generators, gradings, spincs, rows = [], [], [], []
    for i, name in enumerate(one.names):
        generators.append((name, 0))
        gradings.append(one.gradings[i])
        spincs.append(one.spincs[i])
        rows.append(one.d_rows[i] | into_two(one.upsilon_rows[i]))
    for i, name in enumerate(two.names):
        generators.append((name, 1))
        gradings.append(two.gradings[i])
        spincs.append(two.spincs[i])
        rows.append(two.d_rows[i] << offset)

    cone = ConeComplex(model.name, N, generators, gradings, spincs, rows)
    cone.check_square_zero()
    logger.debug(f"Cone of {model.name} at N={N}: {len(cone)} generators")
    return cone


@dataclass
class GradedDims:
    table: dict
    by_spinc: dict

    @property
    def total(self):
        return sum(self.table.values())

    @property
    def chi(self):
        return sum((-1) ** (g % 2) * n for g, n in self.table.items())

    @property
    def abs_chi(self):
        return abs(self.chi)

    def as_rows(self):
        return [[g, n] for g, n in sorted(self.table.items())]


def _graded_homology(gradings, rows, members):
    by_grade = {}
    for i in members:
        by_grade.setdefault(gradings[i], []).append(rows[i])
    ranks = {g: rank_rows(r) for g, r in by_grade.items()}
    out = {}
    for g, r in by_grade.items():
        n = len(r) - ranks[g] - ranks.get(g + 1, 0)
        if n:
            out[g] = n
    return out


def cone_homology(cone):
    """Per-grading dimensions; the differential lowers the grading by one."""
    table = _graded_homology(cone.gradings, cone.rows, range(len(cone)))
    by_spinc = {}
    for s in sorted(set(cone.spincs)):
        members = [i for i, x in enumerate(cone.spincs) if x == s]
        by_spinc[s] = sum(_graded_homology(cone.gradings, cone.rows, members).values())
    return GradedDims(dict(sorted(table.items())), by_spinc)


def tilde_homology(model, N=None):
    return cone_homology(mapping_cone(model, N))


@dataclass(frozen=True)
class LesDims:
    h_one: int
    h_two: int
    rank: int

    @property
    def kernel(self):
        return self.h_one - self.rank

    @property
    def cokernel(self):
        return self.h_two - self.rank

    @property
    def total(self):
        return self.kernel + self.cokernel


def les_dims(model, N=None):
    """dim ker and coker of upsilon on homology of the two truncations."""
    one, two = truncate(model, N)
    h_one = len(one.names) - 2 * rank_rows(one.d_rows)
    h_two = len(two.names) - 2 * rank_rows(two.d_rows)

    two_index = two.index()
    cycles = left_null_rows(one.d_rows)
    images = []
    for z in cycles:
        out = 0
        for j in _bits(apply_rows(one.upsilon_rows, z)):
            k = two_index.get(one.names[j])
            if k is not None:
                out |= 1 << k
        images.append(out)
    boundaries = list(two.d_rows)
    rank = rank_rows(images + boundaries) - rank_rows(boundaries)
    return LesDims(h_one, h_two, rank)


def euler_char_formula(gradings):
    return abs(1 + 2 * sum((-1) ** (g % 2) for g in gradings))


def ordinary_euler_char(model, N=None):
    """|chi| with tower steps of 2 and copy two shifted up by one."""
    N = check_cutoff(model, N)
    chi = 0
    for _, gr, _ in model.irreducibles:
        chi += (-1) ** (gr % 2) + (-1) ** ((gr + 1) % 2)
    for tower in model.towers:
        chi += sum((-1) ** ((tower.base + 2 * i) % 2) for i in range(N + 2))
        chi += sum((-1) ** ((tower.base + 2 * i + 1) % 2) for i in range(N + 1))
    return abs(chi)


def unlink(n):
    """Towers over the 2^n Morse generators of an n-torus; all d and upsilon(x_0) vanish."""
    if n < 0:
        raise UnknownModel(f"unlink({n}) needs n >= 0")
    gradings = [t.bit_count() for t in range(1 << n)]
    return make_model(f"unlink({n})", (), gradings)


def p237():
    return make_model(
        "p237",
        irreducibles=[("alpha", -1), ("beta", -1)],
        tower_gradings=[0],
        upsilon_extra={"a_0": ["alpha", "beta"]},
    )


def two_bridge(det):
    if det < 1:
        raise UnknownModel(f"two_bridge({det}) needs a positive determinant")
    return make_model(f"two_bridge({det})", (), [0] * det, spincs=list(range(det)))


def torus(p, q):
    if p % 2 == 0 or q % 2 == 0 or gcd(p, q) != 1:
        raise UnknownModel(f"torus({p},{q}) needs coprime odd p and q")
    return make_model(f"torus({p},{q})", (), [0])


def torus_odd():
    return make_model("torus_odd", (), [0])


_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\(\s*([-\d\s,]*)\s*\))?\s*$")

LIBRARY = {
    "unknot": lambda: unlink(0),
    "unlink": unlink,
    "p237": p237,
    "two_bridge": two_bridge,
    "torus_odd": torus_odd,
    "torus": torus,
}


def model_library(name):
    m = _CALL.match(name or "")
    if not m or m.group(1) not in LIBRARY:
        raise UnknownModel(f"unknown model {name!r}; known: {', '.join(sorted(LIBRARY))}")
    args = [int(a) for a in (m.group(2) or "").replace(" ", "").split(",") if a]
    try:
        return LIBRARY[m.group(1)](*args)
    except TypeError as exc:
        raise UnknownModel(f"bad arguments for model {name!r}") from exc


def model_from_json(payload, name=None):
    errors = sorted(Draft7Validator(MODEL_SCHEMA).iter_errors(payload), key=lambda e: list(e.path))
    if errors:
        raise ModelSchemaError("; ".join(e.message for e in errors))
    towers = payload["towers"]
    gradings = payload.get("tower_gradings", [0] * towers)
    if len(gradings) != towers:
        raise ModelSchemaError(f"tower_gradings has {len(gradings)} entries for {towers} towers")

    def pairs(key):
        out = {}
        for src, dst in payload.get(key, []):
            out.setdefault(src, []).append(dst)
        return out

    return make_model(
        payload.get("name", name or "model"),
        [tuple(i) for i in payload["irreducibles"]],
        gradings,
        spincs=list(range(towers)),
        upsilon_extra=pairs("upsilon_extra"),
        check_differential=pairs("check_differential"),
    )


def load_model(source):
    """A library name, or a path to a JSON model file."""
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise UnknownModel(f"model file {source} not found")
        with open(path, "r", encoding="utf-8") as f:
            try:
                payload = json.load(f)
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                raise ModelSchemaError(f"{source}: {exc}") from exc
        return model_from_json(payload, name=path.stem)
    return model_library(source)


def random_model(rng, max_irreducibles=8, low=-5, high=5, twist=True):
    """Random single-tower model with zero d; upsilon only where degrees allow."""
    count = int(rng.integers(0, max_irreducibles + 1))
    gradings = [int(g) for g in rng.integers(low, high + 1, size=count)]
    irreducibles = [(f"g{i}", g) for i, g in enumerate(gradings)]
    upsilon = {}
    if twist:
        bottom = [name for name, g in irreducibles if g == -1]
        chosen = [name for name in bottom if rng.random() < 0.5]
        if chosen:
            upsilon["a_0"] = chosen
        for src, gs in irreducibles:
            for dst, gd in irreducibles:
                if gd == gs - 1 and rng.random() < 0.3:
                    upsilon.setdefault(src, []).append(dst)
    return make_model("random", irreducibles, [0], upsilon_extra=upsilon)


@dataclass(frozen=True)
class TriangleCheck:
    dims: tuple
    passed: bool
    violations: tuple

    def to_json(self):
        return {"dims": list(self.dims), "passed": self.passed, "violations": list(self.violations)}


def triangle_rank_check(dims):
    """Arithmetic consequences of a 3-periodic exact sequence of finite F2 spaces."""
    dims = tuple(int(x) for x in dims)
    if len(dims) != 3 or any(x < 0 for x in dims):
        raise InvalidDims(f"expected three non-negative dimensions, got {dims}")
    a, b, c = dims
    violations = []
    if a > b + c:
        violations.append(f"{a} > {b} + {c}")
    if b > c + a:
        violations.append(f"{b} > {c} + {a}")
    if c > a + b:
        violations.append(f"{c} > {a} + {b}")
    if (a + b + c) % 2:
        violations.append(f"{a} + {b} + {c} is odd")
    return TriangleCheck(dims, not violations, tuple(violations))


def skein_consistency(triple_dets, N=None):
    """Spin-c census of two-bridge-style models against the skein determinants.

    A zero determinant has no finite census and is reported as None.
    """
    counts = []
    for det in triple_dets:
        if det < 0:
            raise InvalidDims(f"determinants must be non-negative, got {tuple(triple_dets)}")
        if det == 0:
            counts.append(None)
            continue
        dims = tilde_homology(two_bridge(det), N)
        per_spinc = set(dims.by_spinc.values())
        counts.append(dims.total if per_spinc == {1} else -dims.total)
    matches = all(c is None or c == d for c, d in zip(counts, triple_dets))
    return {
        "dets": [int(d) for d in triple_dets],
        "spinc_counts": counts,
        "matches": matches,
        "triangle": triangle_rank_check(triple_dets).to_json(),
    }


def default_rng(seed):
    return np.random.default_rng(seed)
