"""Colored graphs: representation, validation, faces, degree, jackets.

A colored graph of dimension D is a connected bipartite (D+1)-regular graph
with k black and k white vertices whose edges carry colors 0..D, one edge of
each color per vertex.  It is stored as D+1 permutations of range(k):
``matchings[c][i]`` is the white vertex joined to black vertex ``i`` by the
color-c edge.  An edge is identified by its black endpoint plus its color.

Rooted graphs carry a distinguished edge ``root = (black, color)``.  A rooted
colored graph is rigid (the only root- and color-preserving automorphism is
the identity), which makes a breadth-first canonical encoding possible.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from math import factorial

from .errors import (
    BadOpenSet,
    Disconnected,
    NegativeDegree,
    NotAPermutation,
    NotRooted,
    OddEulerDefect,
    RootOutOfRange,
)

Edge = tuple[int, int]          # (black vertex, color)
Half = tuple[str, int, int]     # (side "b"|"w", vertex, color)


@dataclass(frozen=True)
class ColoredGraph:
    """Validated colored graph.  Instances are immutable; build via validate()."""

    dim: int
    k: int
    matchings: tuple[tuple[int, ...], ...]
    root: tuple[int, int] | None = None

    def white(self, color: int, black: int) -> int:
        return self.matchings[color][black]

    def black(self, color: int, white: int) -> int:
        return self.matchings[color].index(white)

    def inverse(self, color: int) -> tuple[int, ...]:
        inv = [0] * self.k
        for b, w in enumerate(self.matchings[color]):
            inv[w] = b
        return tuple(inv)

    def edges(self):
        for c in range(self.dim + 1):
            for b in range(self.k):
                yield (b, c)

    @property
    def is_rooted(self) -> bool:
        return self.root is not None

    def with_root(self, root: tuple[int, int] | None) -> "ColoredGraph":
        if root is not None:
            b, c = root
            if not (0 <= b < self.k and 0 <= c <= self.dim):
                raise RootOutOfRange(f"root {root} out of range for k={self.k}, D={self.dim}")
        return ColoredGraph(self.dim, self.k, self.matchings, root)

    def shared_colors(self, black: int, white: int) -> list[int]:
        """Colors of the parallel edges joining the given black/white pair."""
        return [c for c in range(self.dim + 1) if self.matchings[c][black] == white]


def validate(dim: int, k: int, matchings, root=None) -> ColoredGraph:
    """Check the raw data and return an immutable, connected ColoredGraph."""
    if dim < 3:
        raise ValueError(f"dimension must be >= 3, got {dim}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    matchings = tuple(tuple(m) for m in matchings)
    if len(matchings) != dim + 1:
        raise NotAPermutation(len(matchings), f"expected {dim + 1} matchings")
    for c, m in enumerate(matchings):
        if len(m) != k or sorted(m) != list(range(k)):
            raise NotAPermutation(c)
    if root is not None:
        b, c = root
        if not (0 <= b < k and 0 <= c <= dim):
            raise RootOutOfRange(f"root {root} out of range for k={k}, D={dim}")
        root = (b, c)
    g = ColoredGraph(dim, k, matchings, root)
    if not is_connected(g):
        raise Disconnected(f"graph on 2*{k} vertices is not connected")
    return g


def is_connected(g: ColoredGraph) -> bool:
    seen_b = [False] * g.k
    seen_w = [False] * g.k
    seen_b[0] = True
    stack = [("b", 0)]
    inv = [g.inverse(c) for c in range(g.dim + 1)]
    while stack:
        side, v = stack.pop()
        for c in range(g.dim + 1):
            if side == "b":
                w = g.matchings[c][v]
                if not seen_w[w]:
                    seen_w[w] = True
                    stack.append(("w", w))
            else:
                b = inv[c][v]
                if not seen_b[b]:
                    seen_b[b] = True
                    stack.append(("b", b))
    return all(seen_b) and all(seen_w)


# -- faces and degree ----------------------------------------------------------

@dataclass(frozen=True)
class FaceProfile:
    """Face lengths per color pair plus the aggregate counters.

    ``lengths[(c, c')]`` lists each face of colors {c, c'} as its length 2p.
    ``by_half_length[p]`` counts faces of length 2p over all color pairs.
    """

    dim: int
    k: int
    lengths: dict[tuple[int, int], tuple[int, ...]]
    by_half_length: dict[int, int]
    total: int

    def pair_count(self, c: int, cp: int) -> int:
        return len(self.lengths[(min(c, cp), max(c, cp))])


def _pair_cycles(g: ColoredGraph, c: int, cp: int) -> list[int]:
    """Half-lengths p of the faces of colors {c, cp} (cycles on black vertices)."""
    inv = g.inverse(cp)
    perm = [inv[g.matchings[c][b]] for b in range(g.k)]
    seen = [False] * g.k
    out = []
    for start in range(g.k):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            length += 1
            v = perm[v]
        out.append(length)
    return out


def face_profile(g: ColoredGraph) -> FaceProfile:
    lengths = {}
    by_half = {}
    total = 0
    for c, cp in itertools.combinations(range(g.dim + 1), 2):
        ps = _pair_cycles(g, c, cp)
        lengths[(c, cp)] = tuple(sorted(2 * p for p in ps))
        for p in ps:
            by_half[p] = by_half.get(p, 0) + 1
        total += len(ps)
    return FaceProfile(g.dim, g.k, lengths, by_half, total)


def face_count(g: ColoredGraph) -> int:
    return sum(len(_pair_cycles(g, c, cp))
               for c, cp in itertools.combinations(range(g.dim + 1), 2))


def degree(g: ColoredGraph) -> int:
    """Reduced degree: D(D-1)k/2 + D - F.  Nonnegative on valid graphs."""
    d = g.dim * (g.dim - 1) * g.k // 2 + g.dim - face_count(g)
    if d < 0:
        raise NegativeDegree(f"degree came out {d}")
    return d


def degree_via_jackets(g: ColoredGraph) -> int:
    """Degree recomputed as the normalized sum of the genera of all jackets.

    Every cyclic order of the D+1 colors embeds the graph in an oriented
    surface whose faces are the bicolored faces of consecutive colors; the
    degree is the sum of those D! genera divided by (D-1)!.
    """
    dcount = {}
    for c, cp in itertools.combinations(range(g.dim + 1), 2):
        dcount[(c, cp)] = len(_pair_cycles(g, c, cp))

    total = 0
    for tail in itertools.permutations(range(1, g.dim + 1)):
        cycle = (0,) + tail
        faces = 0
        for i in range(g.dim + 1):
            a, b = cycle[i], cycle[(i + 1) % (g.dim + 1)]
            faces += dcount[(min(a, b), max(a, b))]
        defect = 2 + (g.dim - 1) * g.k - faces   # = 2 * genus of this jacket
        if defect % 2 or defect < 0:
            raise OddEulerDefect(f"jacket {cycle} has Euler defect {defect}")
        total += defect // 2
    if total % factorial(g.dim - 1):
        raise OddEulerDefect("jacket genus sum is not divisible by (D-1)!")
    return total // factorial(g.dim - 1)


# -- pre-graphs (open graphs) --------------------------------------------------

@dataclass(frozen=True)
class PreGraph:
    """Colored graph with some half-edges left unmatched.

    ``matchings[c][i]`` is the white end of black i's color-c edge, or -1 if
    that half-edge is open.  Black and white vertex counts may differ; every
    vertex still carries one half-edge of each color, matched or open.
    """

    dim: int
    blacks: int
    whites: int
    matchings: tuple[tuple[int, ...], ...]

    def open_halves(self) -> list[Half]:
        out = []
        for c in range(self.dim + 1):
            row = self.matchings[c]
            hit = [False] * self.whites
            for b, w in enumerate(row):
                if w < 0:
                    out.append(("b", b, c))
                else:
                    hit[w] = True
            for w, h in enumerate(hit):
                if not h:
                    out.append(("w", w, c))
        return out

    @property
    def vertex_count(self) -> int:
        return self.blacks + self.whites


def validate_pregraph(dim: int, blacks: int, whites: int, matchings) -> PreGraph:
    matchings = tuple(tuple(m) for m in matchings)
    if len(matchings) != dim + 1:
        raise NotAPermutation(len(matchings), f"expected {dim + 1} matchings")
    for c, m in enumerate(matchings):
        if len(m) != blacks:
            raise NotAPermutation(c, "wrong length")
        hit = [h for h in m if h >= 0]
        if len(set(hit)) != len(hit) or any(h >= whites for h in hit):
            raise NotAPermutation(c, "not a partial injection")
    return PreGraph(dim, blacks, whites, matchings)


def is_open_colored_graph(p: PreGraph) -> bool:
    """Exactly two open half-edges, same color, one black-side one white-side."""
    halves = p.open_halves()
    if len(halves) != 2:
        return False
    (s1, _, c1), (s2, _, c2) = halves
    return c1 == c2 and {s1, s2} == {"b", "w"}


def open_root(g: ColoredGraph) -> PreGraph:
    """Cut the root edge into two open half-edges of its color."""
    if g.root is None:
        raise NotRooted("open_root needs a rooted graph")
    rb, rc = g.root
    mats = [list(m) for m in g.matchings]
    mats[rc][rb] = -1
    return PreGraph(g.dim, g.k, g.k, tuple(tuple(m) for m in mats))


def close(p: PreGraph) -> ColoredGraph:
    """Glue the two open half-edges back into a root edge."""
    if p.blacks != p.whites:
        raise BadOpenSet("cannot close an unbalanced pre-graph")
    halves = p.open_halves()
    if len(halves) != 2:
        raise BadOpenSet(f"need exactly 2 open half-edges, found {len(halves)}")
    (s1, v1, c1), (s2, v2, c2) = halves
    if c1 != c2 or {s1, s2} != {"b", "w"}:
        raise BadOpenSet("open half-edges must share a color and sit on opposite sides")
    b = v1 if s1 == "b" else v2
    w = v2 if s1 == "b" else v1
    mats = [list(m) for m in p.matchings]
    mats[c1][b] = w
    return validate(p.dim, p.blacks, mats, root=(b, c1))


# -- canonical form ------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    """Root-anchored relabeling of a rooted graph.

    ``graph`` is the relabeled copy (root at black 0, discovery indices),
    ``black_map``/``white_map`` send original indices to canonical ones, and
    ``edge_order`` lists all edges of the relabeled graph in the order the
    breadth-first traversal discovers them (the root edge first).
    """

    graph: ColoredGraph
    black_map: tuple[int, ...]
    white_map: tuple[int, ...]
    edge_order: tuple[Edge, ...]


def canonical_form(g: ColoredGraph) -> CanonicalForm:
    """Breadth-first relabeling from the root edge's black endpoint.

    Colors are explored in increasing order, so the relabeling is invariant
    under any root- and color-preserving isomorphism; rooted rigidity makes
    it exactly one representative per isomorphism class.
    """
    if g.root is None:
        raise NotRooted("canonical_form needs a rooted graph")
    rb, rc = g.root
    inv = [g.inverse(c) for c in range(g.dim + 1)]
    black_id = {rb: 0}
    white_id = {}
    queue = [("b", rb)]
    qi = 0
    while qi < len(queue):
        side, v = queue[qi]
        qi += 1
        for c in range(g.dim + 1):
            if side == "b":
                w = g.matchings[c][v]
                if w not in white_id:
                    white_id[w] = len(white_id)
                    queue.append(("w", w))
            else:
                b = inv[c][v]
                if b not in black_id:
                    black_id[b] = len(black_id)
                    queue.append(("b", b))

    if len(black_id) != g.k or len(white_id) != g.k:
        raise Disconnected("canonical traversal did not reach every vertex")

    new_mats = [[0] * g.k for _ in range(g.dim + 1)]
    for c in range(g.dim + 1):
        for b, nb in black_id.items():
            new_mats[c][nb] = white_id[g.matchings[c][b]]
    graph = ColoredGraph(g.dim, g.k,
                         tuple(tuple(m) for m in new_mats), root=(0, rc))

    # Edge discovery order in the relabeled graph: replay the same traversal.
    seen_edges = set()
    edge_order = []
    inv2 = [graph.inverse(c) for c in range(g.dim + 1)]
    queue2 = [("b", 0)]
    seen_b = {0}
    seen_w = set()
    qi = 0
    while qi < len(queue2):
        side, v = queue2[qi]
        qi += 1
        for c in range(g.dim + 1):
            if side == "b":
                b, w = v, graph.matchings[c][v]
            else:
                b, w = inv2[c][v], v
            if (b, c) not in seen_edges:
                seen_edges.add((b, c))
                edge_order.append((b, c))
            if side == "b":
                if w not in seen_w:
                    seen_w.add(w)
                    queue2.append(("w", w))
            else:
                if b not in seen_b:
                    seen_b.add(b)
                    queue2.append(("b", b))

    black_map = tuple(black_id[b] for b in range(g.k))
    white_map = tuple(white_id[w] for w in range(g.k))
    return CanonicalForm(graph, black_map, white_map, tuple(edge_order))


def canonical_encoding(g: ColoredGraph) -> bytes:
    """Relabeling-invariant byte encoding of a rooted graph.

    Two rooted graphs get equal encodings exactly when a root- and
    color-preserving isomorphism maps one onto the other.
    """
    cf = canonical_form(g)
    vals = [g.dim, g.k, cf.graph.root[1]]
    for m in cf.graph.matchings:
        vals.extend(m)
    return struct.pack(f">{len(vals)}I", *vals)


def relabel(g: ColoredGraph, black_perm, white_perm) -> ColoredGraph:
    """Apply vertex relabelings (used by tests to probe encoding invariance)."""
    mats = [[0] * g.k for _ in range(g.dim + 1)]
    for c in range(g.dim + 1):
        for b in range(g.k):
            mats[c][black_perm[b]] = white_perm[g.matchings[c][b]]
    root = None
    if g.root is not None:
        root = (black_perm[g.root[0]], g.root[1])
    return ColoredGraph(g.dim, g.k, tuple(tuple(m) for m in mats), root)


def delta_graph(dim: int, root_color: int = 0) -> ColoredGraph:
    """The unique 2-vertex colored graph: D+1 parallel edges."""
    return validate(dim, 1, [[0]] * (dim + 1), root=(0, root_color))
