"""Planar diagram codes: parsing, orientation, resolutions and skein triples.

A crossing ``X(a,b,c,d)`` lists its four strand labels counterclockwise,
starting with the incoming under-strand, so ``a -> c`` is the under strand
and ``b, d`` the over strand. Crossing-free circles get the synthetic
labels ``-1, -2, ...``.

Smoothing convention: the 0-smoothing joins ``(a,d)`` and ``(b,c)``, the
1-smoothing joins ``(a,b)`` and ``(c,d)``. A crossing is positive when its
over strand runs from ``b`` to ``d``.
"""

import json
import re
from dataclasses import dataclass, field

from errors import (
    BasepointOnCrossing,
    DisconnectedNumbering,
    InconsistentStrands,
    InvalidBasepoint,
    InvalidCrossing,
    MalformedToken,
    NoCrossings,
    VertexLengthMismatch,
)
from logger import get_logger

logger = get_logger(__name__)

TOKEN = re.compile(r"([XUB])\s*[\(\[]([^()\[\]]*)[\)\]]")
SEPARATOR = re.compile(r"[\s,;]*")
INTEGER = re.compile(r"-?\d+")

# 0-smoothing joins slots (0,3),(1,2); 1-smoothing joins (0,1),(2,3)
SMOOTHING_PAIRS = {0: ((0, 3), (1, 2)), 1: ((0, 1), (2, 3))}


def label_key(label):
    """Crossing labels sort first, synthetic circles after them in index order."""
    return (0, label) if label > 0 else (1, -label)


def circle_key(circle):
    return min(label_key(x) for x in circle)


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple
    n_unknotted: int = 0
    basepoint: int = -1
    signs: tuple = ()
    components: tuple = ()
    name: str | None = field(default=None, compare=False)

    @classmethod
    def from_crossings(cls, crossings, n_unknotted=0, basepoint=None, name=None):
        crossings = tuple(tuple(int(x) for x in c) for c in crossings)
        for c in crossings:
            if len(c) != 4:
                raise MalformedToken(f"crossing {c} must have four strand labels")
            if any(x < 1 for x in c):
                raise MalformedToken(f"crossing {c} has a non-positive strand label")
        if n_unknotted < 0:
            raise MalformedToken(f"negative circle count {n_unknotted}")

        counts = {}
        for c in crossings:
            for x in c:
                counts[x] = counts.get(x, 0) + 1
        bad = sorted(x for x, n in counts.items() if n != 2)
        if bad:
            raise InconsistentStrands(
                f"strand labels must occur exactly twice; offending labels {bad}"
            )

        signs, components = _orient(crossings)
        components = components + tuple((-(i + 1),) for i in range(n_unknotted))

        labels = set(counts) | {-(i + 1) for i in range(n_unknotted)}
        if not labels:
            raise MalformedToken("diagram has no crossings and no circles")
        if basepoint is None:
            basepoint = min(labels, key=label_key)
        elif basepoint not in labels:
            raise InvalidBasepoint(f"basepoint {basepoint} is not a strand of the diagram")

        return cls(crossings, n_unknotted, basepoint, signs, components, name)

    @property
    def n_crossings(self):
        return len(self.crossings)

    @property
    def n_plus(self):
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self):
        return sum(1 for s in self.signs if s < 0)

    @property
    def n_components(self):
        return len(self.components)

    @property
    def writhe(self):
        return sum(self.signs)

    @property
    def labels(self):
        return sorted({x for c in self.crossings for x in c})

    def to_pd(self):
        parts = ["X({},{},{},{})".format(*c) for c in self.crossings]
        if self.n_unknotted:
            parts.append(f"U({self.n_unknotted})")
        parts.append(f"B({self.basepoint})")
        return " ".join(parts)

    def to_json(self):
        return {
            "name": self.name,
            "crossings": [list(c) for c in self.crossings],
            "n_unknotted": self.n_unknotted,
            "basepoint": self.basepoint,
        }

    @classmethod
    def from_json(cls, payload):
        if isinstance(payload, str):
            payload = json.loads(payload)
        return cls.from_crossings(
            payload.get("crossings", []),
            n_unknotted=payload.get("n_unknotted", 0),
            basepoint=payload.get("basepoint"),
            name=payload.get("name"),
        )


@dataclass(frozen=True)
class ResolutionState:
    vertex: tuple
    circles: tuple
    basepoint_circle: int
    circle_of: dict = field(compare=False, repr=False, hash=False)

    @property
    def n_circles(self):
        return len(self.circles)


def _slot_table(crossings):
    table = {}
    for k, c in enumerate(crossings):
        for p, x in enumerate(c):
            table.setdefault(x, []).append((k, p))
    return table


def _walk(crossings, table, entry):
    """Follow a component from ``entry``; yields (label, entry slot) pairs."""
    start = entry
    k, p = entry
    label = crossings[k][p]
    while True:
        yield label, (k, p)
        exit_slot = (k, (p + 2) % 4)
        label = crossings[k][exit_slot[1]]
        a, b = table[label]
        k, p = b if a == exit_slot else a
        if (k, p) == start:
            return


def _orient(crossings):
    """Derive component directions and crossing signs from the numbering."""
    table = _slot_table(crossings)
    signs = [0] * len(crossings)
    seen = set()
    components = []
    for m in sorted(table):
        if m in seen:
            continue
        chosen = None
        for entry in table[m]:
            walk = list(_walk(crossings, table, entry))
            labels = [x for x, _ in walk]
            if labels != list(range(m, m + len(labels))):
                continue
            if any(p == 2 for _, (_, p) in walk):
                continue
            chosen = walk
            break
        if chosen is None:
            raise DisconnectedNumbering(
                f"strand numbering through label {m} is not a consecutive oriented run"
            )
        for x, (k, p) in chosen:
            seen.add(x)
            if p == 1:
                signs[k] = 1
            elif p == 3:
                signs[k] = -1
        components.append(tuple(x for x, _ in chosen))
    return tuple(signs), tuple(components)


def parse_pd(text, name=None):
    """Parse ``X(a,b,c,d)``, ``U(k)`` and ``B(s)`` tokens into a LinkDiagram."""
    crossings = []
    n_unknotted = 0
    basepoint = None
    pos = 0
    for match in TOKEN.finditer(text):
        gap = text[pos : match.start()]
        if not SEPARATOR.fullmatch(gap):
            raise MalformedToken(f"unexpected text {gap.strip()!r}")
        pos = match.end()

        kind, body = match.group(1), match.group(2)
        args = [a.strip() for a in body.split(",")] if body.strip() else []
        if not all(INTEGER.fullmatch(a) for a in args):
            raise MalformedToken(f"non-integer argument in {match.group(0)!r}")
        values = [int(a) for a in args]

        if kind == "X":
            if len(values) != 4:
                raise MalformedToken(f"{match.group(0)!r} needs 4 strand labels")
            crossings.append(tuple(values))
        elif kind == "U":
            if len(values) != 1 or values[0] < 0:
                raise MalformedToken(f"{match.group(0)!r} needs one non-negative count")
            n_unknotted += values[0]
        else:
            if len(values) != 1:
                raise MalformedToken(f"{match.group(0)!r} needs one strand label")
            if basepoint is not None:
                raise MalformedToken("more than one basepoint token")
            basepoint = values[0]

    tail = text[pos:]
    if not SEPARATOR.fullmatch(tail):
        raise MalformedToken(f"unexpected text {tail.strip()!r}")
    if not crossings and not n_unknotted:
        raise MalformedToken("no X(...) or U(...) tokens found")

    d = LinkDiagram.from_crossings(crossings, n_unknotted, basepoint, name=name)
    logger.debug(
        f"Parsed {name or 'diagram'}: {d.n_crossings} crossings, "
        f"{d.n_components} components, signs ({d.n_plus},{d.n_minus})"
    )
    return d


def crossing_signs(d):
    return d.n_plus, d.n_minus


def mirror(d):
    """Switch every crossing; position 0 stays an incoming under-strand."""
    flipped = []
    for (a, b, c, e), sign in zip(d.crossings, d.signs):
        flipped.append((b, c, e, a) if sign > 0 else (e, a, b, c))
    name = f"{d.name}_mirror" if d.name else None
    return LinkDiagram.from_crossings(flipped, d.n_unknotted, d.basepoint, name=name)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if label_key(ry) < label_key(rx):
                rx, ry = ry, rx
            self.parent[ry] = rx

    def groups(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def _check_vertex(d, v, allowed):
    v = tuple(int(x) for x in v)
    if len(v) != d.n_crossings:
        raise VertexLengthMismatch(
            f"vertex has {len(v)} coordinates, diagram has {d.n_crossings} crossings"
        )
    if any(x not in allowed for x in v):
        raise VertexLengthMismatch(f"vertex {v} has coordinates outside {sorted(allowed)}")
    return v


def resolve(d, v):
    """Smooth every crossing according to ``v`` and return the circles."""
    v = _check_vertex(d, v, {0, 1})
    labels = d.labels + [-(i + 1) for i in range(d.n_unknotted)]
    uf = _UnionFind(labels)
    for c, bit in zip(d.crossings, v):
        for i, j in SMOOTHING_PAIRS[bit]:
            uf.union(c[i], c[j])

    circles = sorted(
        (tuple(sorted(g, key=label_key)) for g in uf.groups()), key=circle_key
    )
    circle_of = {x: i for i, circle in enumerate(circles) for x in circle}
    return ResolutionState(v, tuple(circles), circle_of[d.basepoint], circle_of)


def relabel(raw, n_unknotted=0, start=None, basepoint_edge=None, basepoint=None, name=None):
    """Number a diagram given by arbitrary edge ids.

    ``raw`` lists each crossing's four edge ids counterclockwise, with
    positions 0 and 2 on the under strand. Components are traversed in
    crossing order (``start`` is an optional first entry slot), labels are
    assigned consecutively, and each tuple is rotated so position 0 is the
    incoming under-strand.
    """
    raw = [list(c) for c in raw]
    table = {}
    for k, c in enumerate(raw):
        for p, e in enumerate(c):
            table.setdefault(e, []).append((k, p))
    for e, slots in table.items():
        if len(slots) != 2:
            raise InconsistentStrands(f"edge {e!r} occurs {len(slots)} times")

    new_label = {}
    under_entry = [None] * len(raw)
    entries = [start] if start is not None else []
    entries += [(k, p) for k in range(len(raw)) for p in range(4)]
    next_label = 1
    for entry in entries:
        if raw[entry[0]][entry[1]] in new_label:
            continue
        k, p = entry
        while True:
            e = raw[k][p]
            new_label[e] = next_label
            next_label += 1
            if p in (0, 2):
                under_entry[k] = p
            exit_slot = (k, (p + 2) % 4)
            a, b = table[raw[k][exit_slot[1]]]
            k, p = b if a == exit_slot else a
            if (k, p) == entry:
                break

    crossings = []
    for k, c in enumerate(raw):
        rot = under_entry[k] or 0
        crossings.append(tuple(new_label[c[(i + rot) % 4]] for i in range(4)))

    if basepoint_edge is not None:
        basepoint = new_label[basepoint_edge]
    return LinkDiagram.from_crossings(crossings, n_unknotted, basepoint, name=name)


def renumber(d, crossing=0, position=0):
    """Same diagram, numbering started from another slot."""
    if not d.crossings:
        return d
    basepoint_edge = d.basepoint if d.basepoint > 0 else None
    basepoint = d.basepoint if d.basepoint < 0 else None
    return relabel(
        d.crossings,
        d.n_unknotted,
        start=(crossing, position),
        basepoint_edge=basepoint_edge,
        basepoint=basepoint,
        name=d.name,
    )


def resolve_partial(d, v, name=None):
    """Smooth coordinates equal to 0 or 1; coordinates equal to 2 stay crossings."""
    v = _check_vertex(d, v, {0, 1, 2})
    if all(x == 2 for x in v):
        return d

    uf = _UnionFind(d.labels)
    for c, bit in zip(d.crossings, v):
        if bit != 2:
            for i, j in SMOOTHING_PAIRS[bit]:
                uf.union(c[i], c[j])

    kept = [c for c, bit in zip(d.crossings, v) if bit == 2]
    raw = [[uf.find(x) for x in c] for c in kept]
    live = {e for c in raw for e in c}
    free = sorted({uf.find(x) for x in d.labels} - live, key=label_key)
    n_unknotted = d.n_unknotted + len(free)

    basepoint_edge, basepoint = None, None
    if d.basepoint < 0:
        basepoint = d.basepoint
    else:
        root = uf.find(d.basepoint)
        if root in live:
            basepoint_edge = root
        else:
            basepoint = -(d.n_unknotted + free.index(root) + 1)

    if not raw:
        return LinkDiagram.from_crossings((), n_unknotted, basepoint, name=name)
    return relabel(raw, n_unknotted, basepoint_edge=basepoint_edge, basepoint=basepoint, name=name)


def skein_triple(d, crossing):
    """Return (K2, K1, K0): the diagram and its 1- and 0-smoothing at ``crossing``."""
    if not d.crossings:
        raise NoCrossings(f"{d.name or 'diagram'} has no crossings to resolve")
    if not 0 <= crossing < d.n_crossings:
        raise InvalidCrossing(
            f"crossing index {crossing} out of range for {d.n_crossings} crossings"
        )
    if d.basepoint in d.crossings[crossing]:
        raise BasepointOnCrossing(
            f"basepoint {d.basepoint} lies on crossing {crossing} {d.crossings[crossing]}"
        )
    base = d.name or "K"
    v = [2] * d.n_crossings
    v[crossing] = 1
    k1 = resolve_partial(d, v, name=f"{base}[{crossing}=1]")
    v[crossing] = 0
    k0 = resolve_partial(d, v, name=f"{base}[{crossing}=0]")
    return d, k1, k0


def disjoint_union(first, second, name=None):
    """Split union; the second diagram's labels are shifted past the first's."""
    shift = max(first.labels, default=0)
    crossings = list(first.crossings) + [
        tuple(x + shift for x in c) for c in second.crossings
    ]
    return LinkDiagram.from_crossings(
        crossings,
        first.n_unknotted + second.n_unknotted,
        first.basepoint,
        name=name,
    )
