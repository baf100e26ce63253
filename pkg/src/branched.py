"""Determinant and H1 of the double branched cover via the Goeritz form."""

from dataclasses import dataclass

import networkx as nx

from errors import DisconnectedDiagram, NonPlanarDiagram
from linalg import IntMatrix, int_determinant, normalize_divisibility, smith_normal_form
from logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class FaceStructure:
    faces: tuple
    corner_faces: tuple
    coloring: tuple
    white: int
    incidence: tuple

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def white_faces(self):
        return [f for f, c in enumerate(self.coloring) if c == self.white]


@dataclass(frozen=True)
class GoeritzForm:
    matrix: IntMatrix
    white_faces: tuple


def _twins(crossings):
    slots = {}
    for k, c in enumerate(crossings):
        for j, x in enumerate(c):
            slots.setdefault(x, []).append((k, j))
    twin = {}
    for a, b in slots.values():
        twin[a], twin[b] = b, a
    return twin


def crossing_graph(crossings):
    g = nx.MultiGraph()
    g.add_nodes_from(range(len(crossings)))
    slots = {}
    for k, c in enumerate(crossings):
        for x in c:
            slots.setdefault(x, []).append(k)
    for x, (a, b) in slots.items():
        g.add_edge(a, b, label=x)
    return g


def pieces(d):
    """Crossing sets of the connected pieces, plus one empty piece per free circle."""
    g = crossing_graph(d.crossings)
    parts = [sorted(comp) for comp in nx.connected_components(g)] if d.crossings else []
    parts.sort()
    return parts + [[] for _ in range(d.n_unknotted)]


def _faces_of(crossings):
    """Face cycles of the rotation system; dart (k, j) marks the corner
    between positions j-1 and j of crossing k."""
    twin = _twins(crossings)
    face_at = {}
    faces = []
    for k in range(len(crossings)):
        for j in range(4):
            if (k, j) in face_at:
                continue
            orbit = []
            dart = (k, j)
            while dart not in face_at:
                face_at[dart] = len(faces)
                orbit.append(dart)
                k2, j2 = twin[dart]
                dart = (k2, (j2 + 1) % 4)
            faces.append(tuple(orbit))

    n = len(crossings)
    if len(faces) != n + 2:
        raise NonPlanarDiagram(f"{len(faces)} faces for {n} crossings, expected {n + 2}")

    corner_faces = tuple(tuple(face_at[(k, j)] for j in range(4)) for k in range(n))

    dual = nx.Graph()
    dual.add_nodes_from(range(len(faces)))
    for corners in corner_faces:
        for j in range(4):
            dual.add_edge(corners[j], corners[(j + 1) % 4])
    try:
        color = nx.bipartite.color(dual)
    except nx.NetworkXError as exc:
        raise NonPlanarDiagram("faces do not admit a checkerboard coloring") from exc
    coloring = tuple(color[f] for f in range(len(faces)))
    return tuple(faces), corner_faces, coloring


def faces(d):
    if not d.crossings:
        if d.n_unknotted != 1:
            raise DisconnectedDiagram(f"{d.n_unknotted} crossing-free circles are split")
        # one circle: inside and outside
        return FaceStructure(((), ()), (), (0, 1), 0, ())
    if d.n_unknotted or len(pieces(d)) > 1:
        raise DisconnectedDiagram(f"{d.name or 'diagram'} is a split diagram")

    face_list, corner_faces, coloring = _faces_of(d.crossings)
    return _structure(face_list, corner_faces, coloring)


def _structure(face_list, corner_faces, coloring):
    counts = [coloring.count(0), coloring.count(1)]
    white = coloring[0] if counts[0] == counts[1] else counts.index(min(counts))

    incidence = []
    for corners in corner_faces:
        if coloring[corners[0]] == white:
            incidence.append((corners[0], corners[2], 1))
        else:
            incidence.append((corners[1], corners[3], -1))
    return FaceStructure(face_list, corner_faces, coloring, white, tuple(incidence))


def goeritz(fs):
    white = fs.white_faces
    pos = {f: i for i, f in enumerate(white)}
    n = len(white)
    g = [[0] * n for _ in range(n)]
    for f1, f2, eta in fs.incidence:
        if f1 == f2:
            continue  # nugatory
        i, j = pos[f1], pos[f2]
        g[i][j] -= eta
        g[j][i] -= eta
        g[i][i] += eta
        g[j][j] += eta
    reduced = [row[: n - 1] for row in g[: n - 1]] if n else []
    return GoeritzForm(IntMatrix.from_lists(reduced, max(n - 1, 0)), tuple(white[: n - 1]))


def goeritz_form(d):
    return goeritz(faces(d))


def _piece_factors(d, crossing_ids):
    if not crossing_ids:
        return []
    sub = [d.crossings[k] for k in crossing_ids]
    form = goeritz(_structure(*_faces_of(sub)))
    return [f for f in smith_normal_form(form.matrix) if f != 1]


def determinant(d):
    if len(pieces(d)) > 1:
        return 0
    form = goeritz_form(d)
    det = abs(int_determinant(form.matrix))
    logger.debug(f"det({d.name or 'diagram'}) = {det}")
    return det


def h1_double_cover(d):
    """Invariant factors of H1; one zero per extra split piece."""
    parts = pieces(d)
    factors = []
    for part in parts:
        factors.extend(_piece_factors(d, part))
    factors += [0] * (len(parts) - 1)
    return [f for f in normalize_divisibility(factors) if f != 1]


def branched_summary(d):
    factors = h1_double_cover(d)
    return {
        "det": determinant(d),
        "h1_invariant_factors": factors,
        "b1": sum(1 for f in factors if f == 0),
    }
