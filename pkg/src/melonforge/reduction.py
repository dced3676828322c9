"""Melon detection and removal, core decomposition, 2-edge-cut machinery.

A melon is a pair of vertices joined by exactly D parallel edges plus two
external half-edges of the missing color.  A proper sub-melon is one whose
parallel edges do not include the root; removing all of them (in any order)
yields the unique melon-free core.  The core computation here tracks, for
every surviving edge position, the set of original vertices absorbed into it,
so the full decomposition (core + per-edge melonic attachments) comes out of
one pass.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .errors import (
    Disconnected,
    EdgeNotInGraph,
    InternalCheckFailed,
    MelonIsWholeGraph,
    NotRooted,
)
from .graphs import (
    ColoredGraph,
    PreGraph,
    canonical_encoding,
    canonical_form,
    close,
    degree,
    open_root,
    validate,
)


@dataclass(frozen=True)
class MelonOccurrence:
    """A proper sub-melon: vertex pair, its external color, root adjacency."""

    black: int
    white: int
    external_color: int
    on_root_edge: bool   # an external half-edge of the melon lies on the root edge


def find_melons(g: ColoredGraph) -> list[MelonOccurrence]:
    """All proper sub-melons of a rooted graph; empty iff the graph is melon-free.

    A pair sharing exactly D parallel edges is a proper sub-melon unless the
    root edge is one of the parallels (such a "root melon" may legitimately
    sit inside a melon-free graph).  For the 2-vertex graph the only proper
    sub-melon is the one whose external color equals the root color.
    """
    if g.root is None:
        raise NotRooted("find_melons needs a rooted graph")
    rb, rc = g.root
    if g.k == 1:
        return [MelonOccurrence(0, 0, rc, True)]
    out = []
    for b in range(g.k):
        counts = Counter(g.matchings[c][b] for c in range(g.dim + 1))
        for w, n in counts.items():
            if n != g.dim:
                continue
            (c0,) = [c for c in range(g.dim + 1) if g.matchings[c][b] != w]
            if rb == b and rc != c0:
                continue   # root is one of the parallel edges
            far_black = g.inverse(c0)[w]
            on_root = (rb, rc) in ((b, c0), (far_black, c0))
            out.append(MelonOccurrence(b, w, c0, on_root))
    return out


def is_melon_free(g: ColoredGraph) -> bool:
    return not find_melons(g)


def find_root_melon(g: ColoredGraph) -> tuple[int, int] | None:
    """The improper melon holding the root among its parallels, if any."""
    rb, rc = g.root
    if g.k == 1:
        return None
    counts = Counter(g.matchings[c][rb] for c in range(g.dim + 1))
    for w, n in counts.items():
        if n == g.dim and g.matchings[rc][rb] == w:
            return (rb, w)
    return None


def remove_melon(g: ColoredGraph, m: MelonOccurrence) -> ColoredGraph:
    """Delete the melon pair and glue its two external half-edges.

    Keeps the vertex count down by one pair and the degree unchanged; if the
    root edge was one of the external edges, the glued edge becomes the root.
    """
    if g.k == 1:
        raise MelonIsWholeGraph("removing the only melon would empty the graph")
    c0 = m.external_color
    u = g.matchings[c0][m.black]          # white far end of the black external
    v = g.inverse(c0)[m.white]            # black far end of the white external

    def nb(b: int) -> int:
        return b - (b > m.black)

    def nw(w: int) -> int:
        return w - (w > m.white)

    mats = []
    for c in range(g.dim + 1):
        row = []
        for b in range(g.k):
            if b == m.black:
                continue
            w = g.matchings[c][b]
            if c == c0 and b == v:
                w = u
            row.append(nw(w))
        mats.append(tuple(row))

    rb, rc = g.root
    if (rb, rc) in ((m.black, c0), (v, c0)):
        root = (nb(v), c0)
    else:
        if rb == m.black:
            raise InternalCheckFailed("asked to remove a melon with the root among its parallels")
        root = (nb(rb), rc)
    return ColoredGraph(g.dim, g.k - 1, tuple(mats), root)


def insert_melon(g: ColoredGraph, edge: tuple[int, int],
                 root_stays_on_black_half: bool = True) -> ColoredGraph:
    """Insert a fresh melon pair on the given edge.

    The new pair gets indices k on both sides.  If the edge is the root, the
    flag picks which half of the split root carries the root afterwards.
    """
    b, c = edge
    w = g.matchings[c][b]
    mats = [list(m) + [g.k] for m in g.matchings]   # new pair parallel on every color...
    mats[c][b] = g.k          # ...except c: black b now reaches the new white,
    mats[c][g.k] = w          # and the new black takes over the old white end.
    root = g.root
    if g.root == edge:
        root = (b, c) if root_stays_on_black_half else (g.k, c)
    return ColoredGraph(g.dim, g.k + 1, tuple(tuple(m) for m in mats), root)


# -- core decomposition ----------------------------------------------------------

ROOT_BLACK_SLOT = "root_black"
ROOT_WHITE_SLOT = "root_white"


@dataclass(frozen=True)
class CoreDecomposition:
    """Unique melon-free core plus the melonic attachment hung on each edge.

    ``core`` is canonically relabeled (root at black 0); ``core=None`` encodes
    the empty core of a melonic graph, in which case there is a single
    attachment holding the whole opened graph.  Otherwise ``slots`` lists
    ``root_black``, ``root_white`` and then ``("edge", (b, c))`` for every
    non-root edge of the core in canonical discovery order; ``attachments[i]``
    is the open melonic pre-graph in slot i, or None when the slot is empty.
    The root_black slot holds the cluster containing the graph's root-edge
    black half, root_white the one containing its white half.
    """

    dim: int
    core: ColoredGraph | None
    slots: tuple
    attachments: tuple[PreGraph | None, ...]

    @property
    def core_degree(self) -> int:
        return 0 if self.core is None else degree(self.core)

    def vertex_total(self) -> int:
        n = 0 if self.core is None else 2 * self.core.k
        for a in self.attachments:
            if a is not None:
                n += a.vertex_count
        return n


def _induced_pregraph(g: ColoredGraph, blacks: set[int], whites: set[int]) -> PreGraph:
    """Sub-pregraph on the given vertices; edges leaving the set become open halves."""
    wmap = {w: i for i, w in enumerate(sorted(whites))}
    mats = []
    for c in range(g.dim + 1):
        row = []
        for b in sorted(blacks):
            w = g.matchings[c][b]
            row.append(wmap.get(w, -1))
        mats.append(tuple(row))
    return PreGraph(g.dim, len(blacks), len(whites), tuple(mats))


def core(g: ColoredGraph) -> CoreDecomposition:
    """Iterated proper-melon removal with provenance tracking.

    Works on the opened graph, so melons straddling the root cut just move the
    open position.  After a removal only the neighborhood of the glued edge is
    re-scanned.
    """
    if g.root is None:
        raise NotRooted("core needs a rooted graph")
    rb, rc = g.root

    # Mutable adjacency under original labels: mat[(c, b)] = w, inv[(c, w)] = b.
    mat = {}
    inv = {}
    for c in range(g.dim + 1):
        for b in range(g.k):
            w = g.matchings[c][b]
            mat[(c, b)] = w
            inv[(c, w)] = b
    rw = g.matchings[rc][rb]
    del mat[(rc, rb)]          # cut the root into two open halves
    del inv[(rc, rw)]

    alive_black = set(range(g.k))
    alive_white = set(range(g.k))
    slot_black_pos = rb        # black vertex carrying the open color-rc half
    slot_white_pos = rw        # white vertex carrying the other one
    abs_black: set = set()     # original vertices absorbed into each slot
    abs_white: set = set()
    edge_absorbed: dict = {}   # (c, black) -> set of absorbed (side, idx)

    def find_melon_at(b: int):
        counts = Counter(mat[(c, b)] for c in range(g.dim + 1) if (c, b) in mat)
        for w, n in counts.items():
            if n == g.dim:
                (c0,) = [c for c in range(g.dim + 1) if mat.get((c, b)) != w]
                return w, c0
            if n == g.dim + 1:
                raise InternalCheckFailed("connected graph contains a floating pair")
        return None

    worklist = list(alive_black)
    melonic = False
    while worklist:
        b = worklist.pop()
        if b not in alive_black:
            continue
        hit = find_melon_at(b)
        if hit is None:
            continue
        w, c0 = hit
        black_open = (c0, b) not in mat
        white_open = (c0, w) not in inv
        if black_open and white_open:
            melonic = True
            break

        absorbed = {("b", b), ("w", w)}
        # The parallel edges may already hold absorbed melonic material.
        for c in range(g.dim + 1):
            if c != c0 and (c, b) in mat:
                absorbed |= edge_absorbed.pop((c, b), set())
        # Unhook the pair's parallel edges.
        for c in range(g.dim + 1):
            if c == c0:
                continue
            ww = mat.pop((c, b))
            inv.pop((c, ww), None)
        touched: list[int] = []

        if black_open:
            v = inv.pop((c0, w))
            del mat[(c0, v)]
            absorbed |= edge_absorbed.pop((c0, v), set())
            abs_black |= absorbed
            slot_black_pos = v
            touched.append(v)
        elif white_open:
            u = mat.pop((c0, b))
            del inv[(c0, u)]
            absorbed |= edge_absorbed.pop((c0, b), set())
            abs_white |= absorbed
            slot_white_pos = u
        else:
            u = mat.pop((c0, b))
            v = inv.pop((c0, w))
            del inv[(c0, u)]
            del mat[(c0, v)]
            absorbed |= edge_absorbed.pop((c0, b), set())
            absorbed |= edge_absorbed.pop((c0, v), set())
            mat[(c0, v)] = u
            inv[(c0, u)] = v
            edge_absorbed[(c0, v)] = absorbed
            touched.append(v)

        alive_black.discard(b)
        alive_white.discard(w)
        worklist.extend(t for t in touched if t in alive_black)

    if melonic:
        return CoreDecomposition(g.dim, None, (ROOT_BLACK_SLOT,), (open_root(g),))

    blacks = sorted(alive_black)
    whites = sorted(alive_white)
    bmap = {b: i for i, b in enumerate(blacks)}
    wmap = {w: i for i, w in enumerate(whites)}
    p = len(blacks)
    mats = [[-1] * p for _ in range(g.dim + 1)]
    for (c, b), w in mat.items():
        mats[c][bmap[b]] = wmap[w]
    mats[rc][bmap[slot_black_pos]] = wmap[slot_white_pos]
    core_graph = validate(g.dim, p, mats, root=(bmap[slot_black_pos], rc))
    cf = canonical_form(core_graph)

    raw_attach = {}
    for (c, b), absorbed in edge_absorbed.items():
        if absorbed:
            raw_attach[(bmap[b], c)] = absorbed

    def attachment_from(absorbed: set) -> PreGraph | None:
        if not absorbed:
            return None
        sub_b = {i for s, i in absorbed if s == "b"}
        sub_w = {i for s, i in absorbed if s == "w"}
        pre = _induced_pregraph(g, sub_b, sub_w)
        halves = pre.open_halves()
        if len(halves) != 2 or len({h[2] for h in halves}) != 1:
            raise InternalCheckFailed("attachment is not an open colored graph")
        return pre

    inv_black_map = {nb: orig for orig, nb in enumerate(cf.black_map)}
    slots: list = [ROOT_BLACK_SLOT, ROOT_WHITE_SLOT]
    attachments = [attachment_from(abs_black), attachment_from(abs_white)]
    for edge in cf.edge_order[1:]:
        slots.append(("edge", edge))
        b_raw = inv_black_map[edge[0]]
        attachments.append(attachment_from(raw_attach.get((b_raw, edge[1]), set())))

    decomp = CoreDecomposition(g.dim, cf.graph, tuple(slots), tuple(attachments))
    if decomp.vertex_total() != 2 * g.k:
        raise InternalCheckFailed("core decomposition lost vertices")
    return decomp


def _attachment_open_halves(att: PreGraph):
    """(black-side open half, white-side open half) as (index, color) pairs."""
    open_b = open_w = None
    for side, v, c in att.open_halves():
        if side == "b":
            open_b = (v, c)
        else:
            open_w = (v, c)
    if open_b is None or open_w is None:
        raise InternalCheckFailed("attachment lacks a two-sided open pair")
    return open_b, open_w


def substitute(decomp: CoreDecomposition) -> ColoredGraph:
    """Rebuild a rooted graph from its core decomposition."""
    if decomp.core is None:
        return close(decomp.attachments[0])

    g = decomp.core
    dim = g.dim
    pair: dict = {}

    def link(h1, h2):
        pair[h1] = h2
        pair[h2] = h1

    for c in range(dim + 1):
        for b in range(g.k):
            link((("c",), "b", b, c), (("c",), "w", g.matchings[c][b], c))

    def add_attachment(idx):
        """Wire the attachment's internal edges; return its two open halves."""
        att = decomp.attachments[idx]
        tag = ("s", idx)
        for c in range(dim + 1):
            for i, w in enumerate(att.matchings[c]):
                if w >= 0:
                    link((tag, "b", i, c), (tag, "w", w, c))
        (bi, bc), (wi, wc) = _attachment_open_halves(att)
        return (tag, "b", bi, bc), (tag, "w", wi, wc)

    rb, rc = g.root
    hb = (("c",), "b", rb, rc)
    hw = (("c",), "w", g.matchings[rc][rb], rc)
    del pair[hb]
    del pair[hw]
    free_b, free_w = hb, hw
    if decomp.attachments[0] is not None:
        ob, ow = add_attachment(0)
        link(hb, ow)
        free_b = ob
    if decomp.attachments[1] is not None:
        ob, ow = add_attachment(1)
        link(hw, ob)
        free_w = ow
    link(free_b, free_w)   # the reassembled root edge

    for idx, slot in enumerate(decomp.slots):
        if slot in (ROOT_BLACK_SLOT, ROOT_WHITE_SLOT):
            continue
        if decomp.attachments[idx] is None:
            continue
        b, c = slot[1]
        h1 = (("c",), "b", b, c)
        h2 = (("c",), "w", g.matchings[c][b], c)
        del pair[h1]
        del pair[h2]
        ob, ow = add_attachment(idx)
        link(h1, ow)
        link(h2, ob)

    blacks = sorted({(h[0], h[2]) for h in pair if h[1] == "b"})
    whites = sorted({(h[0], h[2]) for h in pair if h[1] == "w"})
    bmap = {v: i for i, v in enumerate(blacks)}
    wmap = {v: i for i, v in enumerate(whites)}
    k = len(blacks)
    mats = [[-1] * k for _ in range(dim + 1)]
    for h, h2 in pair.items():
        if h[1] != "b":
            continue
        mats[h[3]][bmap[(h[0], h[2])]] = wmap[(h2[0], h2[2])]
    root = (bmap[(free_b[0], free_b[2])], free_b[3])
    return validate(dim, k, mats, root=root)


def reduce_to_core_graph(g: ColoredGraph, rng: random.Random | None = None) -> ColoredGraph | None:
    """Strip proper sub-melons one at a time until none remain.

    With ``rng`` the melon removed at each step is chosen uniformly at random;
    the final graph is the same whatever the order.  Returns None for a
    melonic graph (empty core).
    """
    cur = g
    while True:
        melons = find_melons(cur)
        if not melons:
            return cur
        if cur.k == 1:
            return None
        m = melons[0] if rng is None else rng.choice(melons)
        cur = remove_melon(cur, m)


# -- 2-edge-cuts and the inductive melonic test ----------------------------------

def _connected_without(g: ColoredGraph, removed: set) -> bool:
    seen_b = [False] * g.k
    seen_w = [False] * g.k
    seen_b[0] = True
    stack = [("b", 0)]
    inv = [g.inverse(c) for c in range(g.dim + 1)]
    while stack:
        side, v = stack.pop()
        for c in range(g.dim + 1):
            if side == "b":
                if (v, c) in removed:
                    continue
                w = g.matchings[c][v]
                if not seen_w[w]:
                    seen_w[w] = True
                    stack.append(("w", w))
            else:
                b = inv[c][v]
                if (b, c) in removed:
                    continue
                if not seen_b[b]:
                    seen_b[b] = True
                    stack.append(("b", b))
    return all(seen_b) and all(seen_w)


def is_two_edge_cut(g: ColoredGraph, e1: tuple[int, int], e2: tuple[int, int]) -> bool:
    return not _connected_without(g, {e1, e2})


@dataclass(frozen=True)
class CutSet:
    """Maximal proper cut-set through an edge, cyclically arranged.

    ``edges[i]`` joins a black vertex of ``parts[i]`` to a white vertex of
    ``parts[i+1]`` (indices mod len).  A singleton cut-set means the edge
    belongs to no 2-edge-cut; its single part is then the whole vertex set.
    """

    edges: tuple[tuple[int, int], ...]
    parts: tuple[tuple[frozenset, frozenset], ...]   # (blacks, whites) per part


def cut_set(g: ColoredGraph, e: tuple[int, int]) -> CutSet:
    b, c = e
    if not (0 <= b < g.k and 0 <= c <= g.dim):
        raise EdgeNotInGraph(f"no edge {e}")
    partners = [e2 for e2 in g.edges() if e2 != e and is_two_edge_cut(g, e, e2)]
    if not partners:
        all_b = frozenset(range(g.k))
        all_w = frozenset(range(g.k))
        return CutSet((e,), ((all_b, all_w),))

    edges = set(partners) | {e}
    comp_of_black: dict = {}
    comp_of_white: dict = {}
    inv = [g.inverse(cc) for cc in range(g.dim + 1)]
    comp_id = 0
    for start in range(g.k):
        if start in comp_of_black:
            continue
        stack = [("b", start)]
        comp_of_black[start] = comp_id
        while stack:
            side, v = stack.pop()
            for cc in range(g.dim + 1):
                if side == "b":
                    if (v, cc) in edges:
                        continue
                    w = g.matchings[cc][v]
                    if w not in comp_of_white:
                        comp_of_white[w] = comp_id
                        stack.append(("w", w))
                else:
                    bb = inv[cc][v]
                    if (bb, cc) in edges:
                        continue
                    if bb not in comp_of_black:
                        comp_of_black[bb] = comp_id
                        stack.append(("b", bb))
        comp_id += 1
    if comp_id != len(edges):
        raise InternalCheckFailed("cut-set part count does not match edge count")

    by_black_part = {}
    for (bb, cc) in edges:
        part = comp_of_black[bb]
        if part in by_black_part:
            raise InternalCheckFailed("two cut edges leave the same part")
        by_black_part[part] = (bb, cc)

    ordered = [e]
    parts = [comp_of_black[b]]
    while True:
        bb, cc = ordered[-1]
        nxt_part = comp_of_white[g.matchings[cc][bb]]
        if nxt_part == parts[0]:
            break
        parts.append(nxt_part)
        ordered.append(by_black_part[nxt_part])
    if len(ordered) != len(edges):
        raise InternalCheckFailed("cut-set cycle did not close")

    part_sets = []
    for pid in parts:
        blk = frozenset(v for v, p in comp_of_black.items() if p == pid)
        wht = frozenset(v for v, p in comp_of_white.items() if p == pid)
        part_sets.append((blk, wht))
    return CutSet(tuple(ordered), tuple(part_sets))


def is_melonic(g: ColoredGraph, _memo: dict | None = None) -> bool:
    """Inductive melonic test built on the cut-set of the root edge.

    Deliberately independent of the degree: a rooted graph is melonic when
    every closed component of its root's cut-set is prime melonic, and a
    prime melonic graph is one whose root-endpoint-deleted components all
    reclose into melonic graphs.
    """
    if g.root is None:
        raise NotRooted("is_melonic needs a rooted graph")
    if _memo is None:
        _memo = {}
    key = canonical_encoding(g)
    if key in _memo:
        return _memo[key]
    cs = cut_set(g, g.root)
    if len(cs.edges) == 1:
        ok = _is_prime_melonic(g, _memo)
    else:
        ok = all(_is_prime_melonic(comp, _memo)
                 for comp in _closed_components(g, cs))
    _memo[key] = ok
    return ok


def _closed_components(g: ColoredGraph, cs: CutSet) -> list[ColoredGraph]:
    comps = []
    n = len(cs.edges)
    for i in range(n):
        blacks, whites = cs.parts[i]
        bmap = {b: j for j, b in enumerate(sorted(blacks))}
        wmap = {w: j for j, w in enumerate(sorted(whites))}
        mats = [[-1] * len(blacks) for _ in range(g.dim + 1)]
        for c in range(g.dim + 1):
            for b in blacks:
                w = g.matchings[c][b]
                if w in whites:
                    mats[c][bmap[b]] = wmap[w]
        # Part i holds the black end of edges[i] and the white end of edges[i-1];
        # cut-set edges all share one color, so regluing them is color-coherent.
        eb, ec = cs.edges[i]
        prev_b, prev_c = cs.edges[(i - 1) % n]
        if ec != prev_c:
            raise InternalCheckFailed("cut-set edges of different colors")
        w_in = g.matchings[prev_c][prev_b]
        mats[ec][bmap[eb]] = wmap[w_in]
        comps.append(validate(g.dim, len(blacks), mats, root=(bmap[eb], ec)))
    return comps


def _is_prime_melonic(g: ColoredGraph, memo: dict) -> bool:
    rb, rc = g.root
    rw = g.matchings[rc][rb]
    if g.k == 1:
        return True
    blacks = set(range(g.k)) - {rb}
    whites = set(range(g.k)) - {rw}
    inv = [g.inverse(c) for c in range(g.dim + 1)]

    comp_of: dict = {}
    comp_id = 0
    for start in blacks:
        if ("b", start) in comp_of:
            continue
        stack = [("b", start)]
        comp_of[("b", start)] = comp_id
        while stack:
            side, v = stack.pop()
            for c in range(g.dim + 1):
                if side == "b":
                    w = g.matchings[c][v]
                    if w in whites and ("w", w) not in comp_of:
                        comp_of[("w", w)] = comp_id
                        stack.append(("w", w))
                else:
                    b = inv[c][v]
                    if b in blacks and ("b", b) not in comp_of:
                        comp_of[("b", b)] = comp_id
                        stack.append(("b", b))
        comp_id += 1

    for cid in range(comp_id):
        sub_b = {v for (s, v), cc in comp_of.items() if s == "b" and cc == cid}
        sub_w = {v for (s, v), cc in comp_of.items() if s == "w" and cc == cid}
        dangling = []
        for c in range(g.dim + 1):
            for b in sub_b:
                if g.matchings[c][b] not in sub_w:
                    dangling.append(("b", b, c))
            for w in sub_w:
                if inv[c][w] not in sub_b:
                    dangling.append(("w", w, c))
        if len(dangling) != 2:
            return False
        (s1, v1, c1), (s2, v2, c2) = dangling
        if c1 != c2 or {s1, s2} != {"b", "w"}:
            return False
        bmap = {b: j for j, b in enumerate(sorted(sub_b))}
        wmap = {w: j for j, w in enumerate(sorted(sub_w))}
        mats = [[-1] * len(sub_b) for _ in range(g.dim + 1)]
        for c in range(g.dim + 1):
            for b in sub_b:
                w = g.matchings[c][b]
                if w in sub_w:
                    mats[c][bmap[b]] = wmap[w]
        b_open = v1 if s1 == "b" else v2
        w_open = v2 if s1 == "b" else v1
        mats[c1][bmap[b_open]] = wmap[w_open]
        try:
            comp = validate(g.dim, len(sub_b), mats, root=(bmap[b_open], c1))
        except Disconnected:
            return False
        if not is_melonic(comp, memo):
            return False
    return True
