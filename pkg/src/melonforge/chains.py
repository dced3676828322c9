"""Dipoles, chains of (D-1)-dipoles, chain classification, and schemes.

A (D-q)-dipole is a vertex pair joined by exactly D-q parallel edges.  A
chain is a ladder of (D-1)-dipoles in which consecutive dipoles share two
edges of a common color; it is described by its color sequence x_0..x_len:
dipole t has external colors {x_{t-1}, x_t} and the two edges joining dipole
t to dipole t+1 both have color x_t.  The chain is unbroken when the sequence
alternates between two colors and broken otherwise; configurations whose two
left external half-edges carry different colors are twisters and are never
collapsed.

A scheme replaces every maximal proper chain of a melon-free rooted graph by
a typed chain-vertex with four ports (left/right, white/black side).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InternalCheckFailed, NotRooted, UnknownKind
from .graphs import ColoredGraph, validate
from .reduction import find_melons

BROKEN = "broken"
UNBROKEN_DISTINCT = "unbroken_distinct"
UNBROKEN_EQUAL = "unbroken_equal"
TWISTER = "twister"

# Chain-vertex ports: left/right end, white-side (pairs with black endpoints)
# or black-side (pairs with white endpoints).
PORT_LW, PORT_LB, PORT_RW, PORT_RB = "lw", "lb", "rw", "rb"
PORTS = (PORT_LW, PORT_LB, PORT_RW, PORT_RB)


@dataclass(frozen=True)
class Dipole:
    black: int
    white: int
    q: int
    parallel_colors: tuple[int, ...]
    external_colors: tuple[int, ...]


def find_dipoles(g: ColoredGraph, q: int) -> list[Dipole]:
    """All vertex pairs joined by exactly D-q parallel edges, 1 <= q <= D-1."""
    if not 1 <= q <= g.dim - 1:
        return []
    out = []
    for b in range(g.k):
        row = [g.matchings[c][b] for c in range(g.dim + 1)]
        for w in set(row):
            shared = [c for c in range(g.dim + 1) if row[c] == w]
            if len(shared) == g.dim - q:
                ext = [c for c in range(g.dim + 1) if row[c] != w]
                out.append(Dipole(b, w, q, tuple(shared), tuple(ext)))
    return out


@dataclass(frozen=True)
class Chain:
    """A ladder of (D-1)-dipoles, left to right.

    ``colors[t]`` is x_t; dipole t (0-based) has externals {x_t, x_{t+1}} and
    is joined to its successor by two edges of color x_{t+1}.
    """

    dipoles: tuple[tuple[int, int], ...]
    colors: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.dipoles)

    @property
    def left_color(self) -> int:
        return self.colors[0]

    @property
    def right_color(self) -> int:
        return self.colors[-1]

    def vertices(self) -> tuple[set[int], set[int]]:
        return {b for b, _ in self.dipoles}, {w for _, w in self.dipoles}

    def left_halves(self):
        b, w = self.dipoles[0]
        return ("w", w, self.colors[0]), ("b", b, self.colors[0])   # l-white, l-black

    def right_halves(self):
        b, w = self.dipoles[-1]
        return ("w", w, self.colors[-1]), ("b", b, self.colors[-1])

    def is_alternating(self) -> bool:
        return all(self.colors[t + 1] == self.colors[t - 1]
                   for t in range(1, len(self.colors) - 1))


@dataclass(frozen=True)
class ChainKind:
    """Type of a chain (or chain-vertex): routing class plus end colors."""

    kind: str                    # broken | unbroken_distinct | unbroken_equal | twister
    left_color: int
    right_color: int
    secondary: int | None = None

    @property
    def ends_equal(self) -> bool:
        return self.left_color == self.right_color


def _edge_of_half(g: ColoredGraph, half) -> tuple[int, int]:
    side, v, c = half
    return (v, c) if side == "b" else (g.inverse(c)[v], c)


def _internal_edges(g: ColoredGraph, chain: Chain) -> set[tuple[int, int]]:
    edges = set()
    for t, (b, w) in enumerate(chain.dipoles):
        for c in range(g.dim + 1):
            if g.matchings[c][b] == w:
                edges.add((b, c))
        if t + 1 < chain.length:
            b2, _ = chain.dipoles[t + 1]
            x = chain.colors[t + 1]
            edges.add((b, x))     # b_t -- w_{t+1}
            edges.add((b2, x))    # b_{t+1} -- w_t
    return edges


def _trace_exit(g: ColoredGraph, chain: Chain, k: int):
    """Follow the (i,k)-bicolored walk entering at the left white half.

    The walk stays inside the chain's vertices and stops at the first
    half-edge leading out; that exit half determines the routing class.
    """
    blacks, whites = chain.vertices()
    i = chain.left_color
    inv = {c: g.inverse(c) for c in (i, k)}
    side, v = "w", chain.dipoles[0][1]
    color = k       # entered via color i, leave via the other one
    while True:
        if side == "w":
            nxt = inv[color][v]
            if nxt not in blacks:
                return ("w", v, color)
            side, v = "b", nxt
        else:
            nxt = g.matchings[color][v]
            if nxt not in whites:
                return ("b", v, color)
            side, v = "w", nxt
        color = i if color == k else k


def classify_chain(g: ColoredGraph, chain: Chain) -> ChainKind:
    """Routing class of a ladder inside its graph.

    Broken means every bicolored walk entering on the left comes back out on
    the left; unbroken chains pass exactly one color family straight through,
    which for equal end colors singles out the secondary color.
    """
    i = chain.left_color
    j = chain.right_color
    lw, lb = chain.left_halves()
    rw, rb = chain.right_halves()
    crossings = []
    for k in range(g.dim + 1):
        if k == i:
            continue
        exit_half = _trace_exit(g, chain, k)
        if exit_half == lb:
            continue
        if exit_half in (rw, rb):
            crossings.append((k, exit_half))
        else:
            raise InternalCheckFailed(f"walk left the chain at {exit_half}")

    alternating = chain.is_alternating()
    if not crossings:
        if alternating:
            raise InternalCheckFailed("alternating chain classified broken")
        return ChainKind(BROKEN, i, j)
    if len(crossings) != 1 or not alternating:
        raise InternalCheckFailed(f"unbroken chain with crossings {crossings}")
    k, exit_half = crossings[0]
    if i != j:
        if k != j or exit_half != rw or chain.length % 2 == 0:
            raise InternalCheckFailed("distinct-color chain broke parity rules")
        return ChainKind(UNBROKEN_DISTINCT, i, j)
    if exit_half != rb or chain.length % 2 == 1:
        raise InternalCheckFailed("equal-color chain broke parity rules")
    return ChainKind(UNBROKEN_EQUAL, i, i, secondary=k)


# -- chain discovery -------------------------------------------------------------

def _root_touches(g: ColoredGraph, dip_pair, externals) -> bool:
    """Root edge among the pair's parallels or its four external edges."""
    b, w = dip_pair
    rb, rc = g.root
    if rb == b and g.matchings[rc][b] == w:
        return True
    for x in externals:
        if (rb, rc) == (b, x):
            return True
        if (rb, rc) == (g.inverse(x)[w], x):
            return True
    return False


def find_maximal_proper_chains(g: ColoredGraph) -> list[Chain]:
    """A canonical family of pairwise disjoint maximal proper chains.

    Chains may not contain the root edge (as parallel, connector or external
    edge) and their four external half-edges must belong to four distinct
    edges.  Candidates are seeded in vertex order and grown left-first to
    exhaustion; a finished chain consumes its vertices, so later candidates
    never overlap it.  (Maximal proper chains are usually unique and disjoint
    outright; the one known exception - cyclic ladders threaded through a
    root melon - admits several overlapping maximal windows, and the greedy
    order picks one deterministically.)
    """
    if g.root is None:
        raise NotRooted("chain discovery needs a rooted graph")
    dipoles = {(d.black, d.white): d for d in find_dipoles(g, 1)}
    inv = [g.inverse(c) for c in range(g.dim + 1)]
    consumed_b: set[int] = set()
    consumed_w: set[int] = set()

    def externals_of(pair):
        return dipoles[pair].external_colors

    def extend(chain: Chain, left: bool) -> Chain | None:
        if left:
            x = chain.colors[0]
            b1, w1 = chain.dipoles[0]
            cand = (inv[x][w1], g.matchings[x][b1])     # (new black, new white)
        else:
            x = chain.colors[-1]
            bl, wl = chain.dipoles[-1]
            cand = (inv[x][wl], g.matchings[x][bl])
        if cand not in dipoles:
            return None
        if cand[0] in consumed_b or cand[1] in consumed_w:
            return None
        blacks, whites = chain.vertices()
        if cand[0] in blacks or cand[1] in whites:
            return None
        ext = externals_of(cand)
        if x not in ext:
            raise InternalCheckFailed("ladder neighbor without the connector color")
        y = ext[0] if ext[1] == x else ext[1]
        rb, rc = g.root
        # Root may not land on the connectors, the new parallels, or the new
        # external edges.
        b0, w0 = cand
        connectors = {(b0, x), ((b1 if left else bl), x)}
        if (rb, rc) in connectors:
            return None
        if rb == b0 and g.matchings[rc][b0] == w0:
            return None
        new_ext_edges = {(b0, y), (inv[y][w0], y)}
        if (rb, rc) in new_ext_edges:
            return None
        # The fresh externals may not close onto the chain's other end.
        if left:
            fw, fb = chain.right_halves()
        else:
            fw, fb = chain.left_halves()
        far_edges = {_edge_of_half(g, fw), _edge_of_half(g, fb)}
        if new_ext_edges & far_edges:
            return None
        if left:
            return Chain((cand,) + chain.dipoles, (y,) + chain.colors)
        return Chain(chain.dipoles + (cand,), chain.colors + (y,))

    chains = []
    for pair in sorted(dipoles):
        if pair[0] in consumed_b or pair[1] in consumed_w:
            continue
        ext = externals_of(pair)
        if _root_touches(g, pair, ext):
            continue
        chain = Chain((pair,), (min(ext), max(ext)))
        while True:
            grown = extend(chain, left=True)
            if grown is None:
                grown = extend(chain, left=False)
            if grown is None:
                break
            chain = grown
        if chain.length < 2:
            continue
        lw, lb = chain.left_halves()
        rw, rb_ = chain.right_halves()
        ext_edges = {_edge_of_half(g, h) for h in (lw, lb, rw, rb_)}
        if len(ext_edges) != 4:
            continue   # ends meet: the would-be chain closes onto itself
        chains.append(chain)
        blacks, whites = chain.vertices()
        consumed_b |= blacks
        consumed_w |= whites
    return chains


# -- schemes ---------------------------------------------------------------------

Endpoint = tuple   # ("b", i, c) | ("w", i, c) | ("cv", idx, port)


def endpoint_is_black_side(ep: Endpoint) -> bool:
    if ep[0] == "b":
        return True
    if ep[0] == "w":
        return False
    return ep[2] in (PORT_LB, PORT_RB)


def _port_color(kind: ChainKind, port: str) -> int:
    return kind.left_color if port in (PORT_LW, PORT_LB) else kind.right_color


@dataclass(frozen=True)
class Scheme:
    """Graph over regular vertices plus typed chain-vertices.

    ``edges`` is the half-edge pairing: each entry joins a black-side
    endpoint to a white-side endpoint of the same color.  ``root`` is a
    regular edge (black vertex, color).
    """

    dim: int
    p: int
    edges: tuple[tuple[Endpoint, Endpoint], ...]
    chain_vertices: tuple[ChainKind, ...]
    root: tuple[int, int]

    def pairing(self) -> dict[Endpoint, Endpoint]:
        out = {}
        for a, b in self.edges:
            out[a] = b
            out[b] = a
        return out

    def endpoint_color(self, ep: Endpoint) -> int:
        if ep[0] in ("b", "w"):
            return ep[2]
        return _port_color(self.chain_vertices[ep[1]], ep[2])

    def counts(self):
        """(broken_equal, broken_distinct, unbroken_equal, unbroken_distinct)."""
        be = bd = ue = ud = 0
        for cv in self.chain_vertices:
            if cv.kind == BROKEN:
                if cv.ends_equal:
                    be += 1
                else:
                    bd += 1
            elif cv.kind == UNBROKEN_EQUAL:
                ue += 1
            elif cv.kind == UNBROKEN_DISTINCT:
                ud += 1
            else:
                raise UnknownKind(cv.kind)
        return be, bd, ue, ud


def scheme_signature(s: Scheme) -> tuple[int, int, int, int, int]:
    """(p, broken_equal, broken_distinct, unbroken_equal, unbroken_distinct)."""
    be, bd, ue, ud = s.counts()
    return (s.p, be, bd, ue, ud)


def graph_as_scheme(g: ColoredGraph) -> Scheme:
    edges = []
    for c in range(g.dim + 1):
        for b in range(g.k):
            edges.append((("b", b, c), ("w", g.matchings[c][b], c)))
    return Scheme(g.dim, g.k, tuple(sorted(edges)), (), g.root)


def validate_scheme(s: Scheme) -> Scheme:
    seen = {}
    for a, b in s.edges:
        if endpoint_is_black_side(a) == endpoint_is_black_side(b):
            raise InternalCheckFailed(f"edge {a}-{b} joins same-side endpoints")
        if s.endpoint_color(a) != s.endpoint_color(b):
            raise InternalCheckFailed(f"edge {a}-{b} joins different colors")
        for ep in (a, b):
            if ep in seen:
                raise InternalCheckFailed(f"endpoint {ep} used twice")
            seen[ep] = True
    for side in ("b", "w"):
        for i in range(s.p):
            for c in range(s.dim + 1):
                if (side, i, c) not in seen:
                    raise InternalCheckFailed(f"missing endpoint {(side, i, c)}")
    for idx, cv in enumerate(s.chain_vertices):
        if cv.kind == TWISTER:
            raise InternalCheckFailed("twisters are never chain-vertices")
        if cv.kind == UNBROKEN_DISTINCT and cv.ends_equal:
            raise InternalCheckFailed("unbroken-distinct chain-vertex with equal ends")
        if cv.kind == UNBROKEN_EQUAL and (not cv.ends_equal or cv.secondary in
                                          (None, cv.left_color)):
            raise InternalCheckFailed("bad unbroken-equal chain-vertex")
        for port in PORTS:
            if ("cv", idx, port) not in seen:
                raise InternalCheckFailed(f"missing port {(idx, port)}")
    pairing = s.pairing()
    rb, rc = s.root
    partner = pairing[("b", rb, rc)]
    if partner[0] != "w":
        raise InternalCheckFailed("scheme root must join two regular vertices")
    return s


def scheme_of(core_graph: ColoredGraph) -> Scheme:
    """Collapse every maximal proper chain of a melon-free core to a chain-vertex."""
    if find_melons(core_graph):
        raise InternalCheckFailed("scheme_of expects a melon-free graph")
    chains = find_maximal_proper_chains(core_graph)
    kinds = [classify_chain(core_graph, ch) for ch in chains]

    half_to_port: dict = {}
    internal_b: set[int] = set()
    internal_w: set[int] = set()
    for idx, ch in enumerate(chains):
        blacks, whites = ch.vertices()
        internal_b |= blacks
        internal_w |= whites
        lw, lb = ch.left_halves()
        rw, rb_ = ch.right_halves()
        half_to_port[lw] = ("cv", idx, PORT_LW)
        half_to_port[lb] = ("cv", idx, PORT_LB)
        half_to_port[rw] = ("cv", idx, PORT_RW)
        half_to_port[rb_] = ("cv", idx, PORT_RB)

    bmap = {b: i for i, b in enumerate(sorted(set(range(core_graph.k)) - internal_b))}
    wmap = {w: i for i, w in enumerate(sorted(set(range(core_graph.k)) - internal_w))}

    def endpoint(side, v, c):
        half = (side, v, c)
        if half in half_to_port:
            return half_to_port[half]
        if side == "b":
            if v in internal_b:
                return None
            return ("b", bmap[v], c)
        if v in internal_w:
            return None
        return ("w", wmap[v], c)

    edges = []
    for c in range(core_graph.dim + 1):
        for b in range(core_graph.k):
            w = core_graph.matchings[c][b]
            eb = endpoint("b", b, c)
            ew = endpoint("w", w, c)
            if eb is None and ew is None:
                continue    # edge internal to some chain
            if eb is None or ew is None:
                raise InternalCheckFailed("edge half in a chain interior leaks out")
            edges.append(tuple(sorted((eb, ew))))

    rb, rc = core_graph.root
    if rb in internal_b:
        raise InternalCheckFailed("root ended up inside a chain")
    s = Scheme(core_graph.dim, core_graph.k - len(internal_b),
               tuple(sorted(edges)), tuple(kinds), (bmap[rb], rc))
    return validate_scheme(s)


# -- chain materialization and scheme realization ---------------------------------

def _alternating_sequence(i: int, j: int, length: int) -> tuple[int, ...]:
    return tuple(i if t % 2 == 0 else j for t in range(length + 1))


def chain_color_sequence(kind: ChainKind, length: int, dim: int,
                         rng=None) -> tuple[int, ...]:
    """A color sequence realizing the given chain type at the given length."""
    i, j = kind.left_color, kind.right_color
    if kind.kind == UNBROKEN_DISTINCT:
        if length % 2 == 0 or length < 3:
            raise ValueError("unbroken chains with distinct ends have odd length >= 3")
        return _alternating_sequence(i, j, length)
    if kind.kind == UNBROKEN_EQUAL:
        if length % 2 == 1 or length < 2:
            raise ValueError("unbroken chains with equal ends have even length >= 2")
        return _alternating_sequence(i, kind.secondary, length)
    if kind.kind != BROKEN:
        raise UnknownKind(kind.kind)
    min_len = 3 if i == j else 2
    if length < min_len:
        raise ValueError(f"broken chains with these ends need length >= {min_len}")
    colors = list(range(dim + 1))
    while True:
        seq = [i]
        for t in range(1, length):
            pool = [c for c in colors if c != seq[-1]]
            if t == length - 1:
                pool = [c for c in pool if c != j]
            seq.append(pool[0] if rng is None else rng.choice(pool))
        seq.append(j)
        cand = tuple(seq)
        if not all(cand[t + 1] == cand[t - 1] for t in range(1, length)):
            return cand
        if rng is None:
            # Deterministic fallback: bend the first step off the alternation.
            alt = cand[1]
            bend = min(c for c in colors if c not in (i, alt))
            seq = list(cand)
            seq[1] = bend
            if length == 2:
                seq = [i, bend, j]
            cand = tuple(seq)
            if cand[-1] == j and all(cand[t] != cand[t + 1] for t in range(length)):
                if not all(cand[t + 1] == cand[t - 1] for t in range(1, length)):
                    return cand
            raise InternalCheckFailed("could not build a broken sequence")


def minimal_chain_length(kind: ChainKind) -> int:
    if kind.kind == UNBROKEN_DISTINCT:
        return 3
    if kind.kind == UNBROKEN_EQUAL:
        return 2
    return 3 if kind.ends_equal else 2


@dataclass(frozen=True)
class Realization:
    """A colored graph produced from a scheme plus the chain bookkeeping."""

    graph: ColoredGraph
    ladder_blacks: tuple[tuple[int, ...], ...]    # per chain-vertex
    ladder_whites: tuple[tuple[int, ...], ...]
    edge_of: dict   # scheme edge (sorted endpoint pair) -> graph edge (black, color)


def realize(s: Scheme, lengths: dict[int, int] | None = None,
            sequences: dict[int, tuple[int, ...]] | None = None,
            rng=None) -> Realization:
    """Substitute a concrete chain for every chain-vertex.

    Default is the minimal-length chain of each type; ``lengths`` overrides
    per chain-vertex, ``sequences`` pins full color sequences (broken types
    admit several per length), ``rng`` randomizes broken sequences.
    """
    seqs = {}
    for idx, cv in enumerate(s.chain_vertices):
        if sequences and idx in sequences:
            seqs[idx] = tuple(sequences[idx])
        else:
            n = lengths.get(idx, minimal_chain_length(cv)) if lengths \
                else minimal_chain_length(cv)
            seqs[idx] = chain_color_sequence(cv, n, s.dim, rng)

    n_black = s.p
    ladder_blacks = []
    ladder_whites = []
    for idx in range(len(s.chain_vertices)):
        ln = len(seqs[idx]) - 1
        ladder_blacks.append(tuple(range(n_black, n_black + ln)))
        ladder_whites.append(tuple(range(n_black, n_black + ln)))
        n_black += ln

    mats = [[-1] * n_black for _ in range(s.dim + 1)]

    def set_edge(b, w, c):
        if mats[c][b] != -1:
            raise InternalCheckFailed(f"half ({b},{c}) wired twice")
        mats[c][b] = w

    # Chain interiors: parallels plus the double connectors.
    for idx in range(len(s.chain_vertices)):
        seq = seqs[idx]
        bs, ws = ladder_blacks[idx], ladder_whites[idx]
        for t in range(len(bs)):
            ext = {seq[t], seq[t + 1]}
            for c in range(s.dim + 1):
                if c not in ext:
                    set_edge(bs[t], ws[t], c)
            if t + 1 < len(bs):
                set_edge(bs[t], ws[t + 1], seq[t + 1])
                set_edge(bs[t + 1], ws[t], seq[t + 1])

    def concrete(ep):
        """(side, vertex) carrying this endpoint's half in the realization."""
        if ep[0] == "b":
            return ("b", ep[1])
        if ep[0] == "w":
            return ("w", ep[1])
        _, idx, port = ep
        bs, ws = ladder_blacks[idx], ladder_whites[idx]
        if port == PORT_LW:
            return ("w", ws[0])
        if port == PORT_LB:
            return ("b", bs[0])
        if port == PORT_RW:
            return ("w", ws[-1])
        return ("b", bs[-1])

    edge_of = {}
    for a, b in s.edges:
        c = s.endpoint_color(a)
        (sa, va) = concrete(a)
        (sb, vb) = concrete(b)
        if sa == sb:
            raise InternalCheckFailed("scheme edge maps to same-side halves")
        black = va if sa == "b" else vb
        white = vb if sa == "b" else va
        set_edge(black, white, c)
        edge_of[tuple(sorted((a, b)))] = (black, c)

    root = s.root
    g = validate(s.dim, n_black, mats, root=root)
    return Realization(g, tuple(ladder_blacks), tuple(ladder_whites), edge_of)


def scheme_degree(s: Scheme) -> int:
    from .graphs import degree
    return degree(realize(s).graph)


def is_reduced(s: Scheme) -> bool:
    """No proper chain survives among the regular vertices.

    Any proper chain contains a valid two-dipole window, so it suffices to
    look for a pair of regular (D-1)-dipoles joined by two same-color edges
    that satisfies the root and external-edge constraints.
    """
    pairing = s.pairing()
    rb, rc = s.root if s.root is not None else (None, None)
    root_ep = ("b", rb, rc) if s.root is not None else None

    def is_root_edge(ep) -> bool:
        if root_ep is None or ep[0] == "cv":
            return False
        if ep == root_ep:
            return True
        return pairing[root_ep] == ep

    dipoles = {}
    for b in range(s.p):
        partners: dict[int, list[int]] = {}
        for c in range(s.dim + 1):
            other = pairing[("b", b, c)]
            if other[0] == "w":
                partners.setdefault(other[1], []).append(c)
        for w, colors in partners.items():
            if len(colors) == s.dim - 1:
                dipoles[(b, w)] = [c for c in range(s.dim + 1) if c not in colors]

    for (b, w), ext in dipoles.items():
        if any(is_root_edge(("b", b, c)) for c in range(s.dim + 1)):
            continue
        if any(is_root_edge(("w", w, c)) for c in ext):
            continue
        for x in ext:
            pb = pairing[("b", b, x)]
            pw = pairing[("w", w, x)]
            if pb[0] != "w" or pw[0] != "b":
                continue
            cand = (pw[1], pb[1])
            if cand not in dipoles or cand == (b, w):
                continue
            if cand[0] == b or cand[1] == w:
                continue
            y = [c for c in dipoles[cand] if c != x]
            if len(y) != 1:
                continue
            y = y[0]
            cb, cw = cand
            if any(is_root_edge(("b", cb, c)) for c in range(s.dim + 1)):
                continue
            if any(is_root_edge(("w", cw, c)) for c in dipoles[cand]):
                continue
            # Four external edges of the 2-window must be pairwise distinct.
            (oy,) = [c for c in ext if c != x]
            ends = [("b", b, oy), ("w", w, oy), ("b", cb, y), ("w", cw, y)]
            edges = {frozenset({ep, pairing[ep]}) for ep in ends}
            if len(edges) == 4:
                return False
    return True


def scheme_from_core(g: ColoredGraph) -> Scheme:
    """Core of a melon-free rooted graph as a validated reduced scheme."""
    s = scheme_of(g)
    if not is_reduced(s):
        raise InternalCheckFailed("scheme_of produced a non-reduced scheme")
    return s


# -- canonical encoding ------------------------------------------------------------

def canonical_scheme_encoding(s: Scheme) -> bytes:
    """Relabeling-invariant encoding of a rooted scheme.

    Breadth-first from the root edge's black endpoint, colors ascending;
    chain-vertices are traversed end-symmetrically (entry port first), so two
    schemes that differ only by flipping a chain-vertex encode identically.
    """
    pairing = s.pairing()
    rb, rc = s.root
    ids: dict = {("b", rb): 0}
    counters = {"b": 1, "w": 0, "cv": 0}
    entry_port: dict[int, str] = {}
    queue = [("b", rb)]
    records: list = [s.dim, s.p, len(s.chain_vertices), rc]

    def node_of(ep):
        if ep[0] in ("b", "w"):
            return (ep[0], ep[1])
        return ("cv", ep[1])

    def touch(ep):
        node = node_of(ep)
        if node not in ids:
            ids[node] = counters[node[0]]
            counters[node[0]] += 1
            queue.append(node)
            if node[0] == "cv":
                entry_port[node[1]] = ep[2]
        return node

    def symbol(ep):
        node = touch(ep)
        tag = {"b": 0, "w": 1, "cv": 2}[node[0]]
        return (tag, ids[node])

    def cv_port_order(idx: int) -> list[str]:
        first = entry_port[idx]
        mate = {PORT_LW: PORT_LB, PORT_LB: PORT_LW,
                PORT_RW: PORT_RB, PORT_RB: PORT_RW}[first]
        other = {PORT_LW: PORT_RW, PORT_LB: PORT_RB,
                 PORT_RW: PORT_LW, PORT_RB: PORT_LB}[first]
        other_mate = {PORT_LW: PORT_LB, PORT_LB: PORT_LW,
                      PORT_RW: PORT_RB, PORT_RB: PORT_RW}[other]
        return [mate, other, other_mate]

    qi = 0
    while qi < len(queue):
        node = queue[qi]
        qi += 1
        if node[0] in ("b", "w"):
            side, v = node
            records.append((3, ids[node]))
            for c in range(s.dim + 1):
                records.append(symbol(pairing[(side, v, c)]))
        else:
            idx = node[1]
            cv = s.chain_vertices[idx]
            first = entry_port[idx]
            entry_color = _port_color(cv, first)
            other_color = cv.right_color if first in (PORT_LW, PORT_LB) \
                else cv.left_color
            kind_tag = {BROKEN: 0, UNBROKEN_DISTINCT: 1, UNBROKEN_EQUAL: 2}[cv.kind]
            records.append((4, ids[node], kind_tag, entry_color, other_color,
                            -1 if cv.secondary is None else cv.secondary))
            for port in cv_port_order(idx):
                records.append(symbol(pairing[("cv", idx, port)]))

    return repr(records).encode()


# -- programmatic construction -----------------------------------------------------

class SchemeBuilder:
    """Assemble a scheme endpoint by endpoint (used for fixtures and the
    dominant-scheme constructions)."""

    def __init__(self, dim: int):
        self.dim = dim
        self.p = 0
        self._edges: list = []
        self._cvs: list[ChainKind] = []
        self._root: tuple[int, int] | None = None

    def add_pair(self, parallel_colors) -> int:
        """Add a black/white pair joined by the given parallel colors."""
        i = self.p
        self.p += 1
        for c in parallel_colors:
            self.connect(("b", i, c), ("w", i, c))
        return i

    def add_chain_vertex(self, kind: ChainKind) -> int:
        self._cvs.append(kind)
        return len(self._cvs) - 1

    def connect(self, a: Endpoint, b: Endpoint):
        self._edges.append(tuple(sorted((a, b))))

    def set_root(self, black: int, color: int):
        self._root = (black, color)

    def build(self) -> Scheme:
        if self._root is None:
            raise NotRooted("scheme needs a root")
        s = Scheme(self.dim, self.p, tuple(sorted(self._edges)),
                   tuple(self._cvs), self._root)
        return validate_scheme(s)


def count_scheme_dipoles(s: Scheme, q: int) -> int:
    """Regular-vertex pairs of the scheme joined by exactly D-q parallel edges."""
    pairing = s.pairing()
    count = 0
    for b in range(s.p):
        partners: dict[int, int] = {}
        for c in range(s.dim + 1):
            other = pairing[("b", b, c)]
            if other[0] == "w":
                partners[other[1]] = partners.get(other[1], 0) + 1
        count += sum(1 for n in partners.values() if n == s.dim - q)
    return count


def structural_budget(s: Scheme) -> int:
    """Chain-vertices plus (D-1)-dipoles plus, for D >= 4, (D-2)-dipoles."""
    n = len(s.chain_vertices) + count_scheme_dipoles(s, 1)
    if s.dim >= 4:
        n += count_scheme_dipoles(s, 2)
    return n
