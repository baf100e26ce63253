"""PD codes for pretzel links P(t1, ..., tk) and closed braids.

Each column is a vertical twist region of |t| crossings. Corners of a
crossing in counterclockwise order are NW, SW, SE, NE; the strands run
NW-SE and NE-SW. For t > 0 the NW-SE strand is over, for t < 0 it is under.
"""

from diagram import relabel
from errors import InputError

NW, SW, SE, NE = "NW", "SW", "SE", "NE"


def _corner_order(t):
    # position 0 must be an end of the under strand
    return (SW, SE, NE, NW) if t > 0 else (NW, SW, SE, NE)


def pretzel(twists, name=None, basepoint_on_last=True):
    twists = [int(t) for t in twists]
    if len(twists) < 2:
        raise InputError("a pretzel link needs at least two columns")
    if any(t == 0 for t in twists):
        raise InputError(f"pretzel columns must be non-zero, got {twists}")

    cells = [(c, j) for c, t in enumerate(twists) for j in range(abs(t))]
    index = {cell: i for i, cell in enumerate(cells)}
    corners = {}

    def join(a, b):
        edge = (a, b)
        corners[a] = edge
        corners[b] = edge

    k = len(twists)
    for c, t in enumerate(twists):
        m = abs(t)
        for j in range(m - 1):
            join((c, j, SW), (c, j + 1, NW))
            join((c, j, SE), (c, j + 1, NE))
        nxt = (c + 1) % k
        join((c, 0, NE), (nxt, 0, NW))
        join((c, m - 1, SE), (nxt, abs(twists[nxt]) - 1, SW))

    raw = []
    for c, j in cells:
        order = _corner_order(twists[c])
        raw.append([corners[(c, j, corner)] for corner in order])

    start = None
    if basepoint_on_last:
        # label 1 on the NW edge of the final crossing, away from column 0
        last = len(cells) - 1
        start = (last, _corner_order(twists[-1]).index(NW))

    label = name or "P({})".format(",".join(str(t) for t in twists))
    return relabel(raw, start=start, name=label)


def braid_closure(word, strands=None, name=None):
    """Closure of a braid word; generator +i crosses strands i and i+1.

    Columns that no generator touches close up into split circles.
    """
    word = [int(g) for g in word]
    if not word:
        raise InputError("a braid word needs at least one generator")
    if any(g == 0 for g in word):
        raise InputError(f"braid generators must be non-zero, got {word}")
    n = strands if strands is not None else max(abs(g) for g in word) + 1
    if any(abs(g) >= n for g in word):
        raise InputError(f"braid word {word} does not fit on {n} strands")

    top = {c: ("top", c) for c in range(n)}
    current = dict(top)
    raw = []
    for k, g in enumerate(word):
        left, right = abs(g) - 1, abs(g)
        corners = {
            NW: current[left],
            NE: current[right],
            SW: ("seg", k, left),
            SE: ("seg", k, right),
        }
        current[left], current[right] = corners[SW], corners[SE]
        raw.append([corners[corner] for corner in _corner_order(g)])

    # bottom of each column joins its top
    closing = {current[c]: top[c] for c in range(n) if current[c] != top[c]}
    raw = [[closing.get(e, e) for e in c] for c in raw]
    n_free = sum(1 for c in range(n) if current[c] == top[c])

    label = name or "braid({})".format(",".join(str(g) for g in word))
    return relabel(raw, n_unknotted=n_free, name=label)
