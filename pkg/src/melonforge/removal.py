"""Dipole and chain-vertex removal with degree accounting.

Removing a (D-q)-dipole deletes its two vertices and rejoins the freed
half-edges color by color.  The degree change is predictable from data read
off before the removal: the number of connected components afterwards and,
for each pair of external colors, whether the four incident edges lie on one
bicolored cycle (type a) or two (type b).  Chain-vertex removal reduces to
the same case analysis through a minimal chain representation.

The iterative deletion procedure removes every chain-vertex, then every
(D-1)-dipole, then (for D >= 4) every (D-2)-dipole of a scheme, marking the
edges each removal creates; the resulting mark distribution bounds the number
of removable structures by five times the degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chains import (
    BROKEN,
    PORT_LB,
    PORT_LW,
    PORT_RB,
    PORT_RW,
    PORTS,
    ChainKind,
    Scheme,
    realize,
    scheme_degree,
    validate_scheme,
)
from .errors import (
    InternalCheckFailed,
    NotAChainVertex,
    NotADipole,
    ProcedureStuck,
    QOutOfRange,
)
from .graphs import ColoredGraph, degree, face_count


@dataclass(frozen=True)
class RemovalReport:
    """Pre-removal prediction of the effect of deleting one (D-q)-dipole.

    ``predicted_delta`` is the predicted value of
    degree(G) - sum(degree(G_i)) = D(q+1-C) - 2*sum(r_i);
    case I (completely separating, C = q+1) forces it to zero.
    """

    q: int
    external_colors: tuple[int, ...]
    components: int
    new_edges_per_component: tuple[int, ...]
    type_b_per_component: tuple[int, ...]
    case: str
    predicted_delta: int
    untouched_faces_removed: int      # always C(D-q, 2)


def _face_orbit(g: ColoredGraph, c1: int, c2: int, black: int) -> frozenset:
    inv = g.inverse(c2)
    orbit = set()
    v = black
    while v not in orbit:
        orbit.add(v)
        v = inv[g.matchings[c1][v]]
    return frozenset(orbit)


def remove_dipole(g: ColoredGraph, black: int, white: int):
    """Delete a (D-q)-dipole, 1 <= q <= D-2; return (components, report).

    Components come back as valid colored graphs; the root survives only in
    the component that inherits it (None elsewhere).
    """
    shared = g.shared_colors(black, white)
    q = g.dim - len(shared)
    if not shared or len(shared) == g.dim + 1:
        raise NotADipole(f"pair ({black},{white}) shares {len(shared)} edges")
    if not 1 <= q <= g.dim - 2:
        raise QOutOfRange(f"removal supports 1 <= q <= D-2, got q={q}")
    externals = [c for c in range(g.dim + 1) if c not in shared]

    inv = {c: g.inverse(c) for c in externals}
    far_white = {c: g.matchings[c][black] for c in externals}
    far_black = {c: inv[c][white] for c in externals}

    # Type a/b per external color pair, read off before the surgery.
    type_b_pairs = []
    for ca, cb in itertools.combinations(externals, 2):
        orbit_b = _face_orbit(g, ca, cb, black)
        if inv[ca][white] in orbit_b:
            type_b_pairs.append(((ca, cb), False))
        else:
            type_b_pairs.append(((ca, cb), True))

    # Surgery on a dict copy.
    mat = {}
    for c in range(g.dim + 1):
        for b in range(g.k):
            if b in (black,):
                continue
            w = g.matchings[c][b]
            if w == white:
                continue
            mat[(b, c)] = w
    for c in externals:
        mat[(far_black[c], c)] = far_white[c]

    # Root bookkeeping: external edges pass the root on to the glued edge.
    rb_rc = g.root
    if rb_rc is not None:
        rb, rc = rb_rc
        if rb == black or g.matchings[rc][rb] == white:
            if rc in externals:
                rb_rc = (far_black[rc], rc)
            else:
                rb_rc = None      # root was a parallel edge of the dipole

    # Split into components.
    blacks = [b for b in range(g.k) if b != black]
    adj: dict = {b: set() for b in blacks}
    white_owner: dict = {}
    for (b, c), w in mat.items():
        white_owner.setdefault(w, set()).add(b)
    for w, bs in white_owner.items():
        bs = sorted(bs)
        for x in bs:
            adj[x].update(bs)
    comp_of: dict = {}
    comp_id = 0
    for start in blacks:
        if start in comp_of:
            continue
        stack = [start]
        comp_of[start] = comp_id
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in comp_of:
                    comp_of[u] = comp_id
                    stack.append(u)
        comp_id += 1

    d_per = [0] * comp_id
    for c in externals:
        d_per[comp_of[far_black[c]]] += 1
    r_per = [0] * comp_id
    for (ca, cb), is_b in type_b_pairs:
        if not is_b:
            continue
        ka, kb = comp_of[far_black[ca]], comp_of[far_black[cb]]
        if ka != kb:
            raise InternalCheckFailed("type-b pair split across components")
        r_per[ka] += 1

    components = []
    for cid in range(comp_id):
        sub_b = sorted(b for b in blacks if comp_of[b] == cid)
        sub_w = sorted({mat[(b, c)] for b in sub_b for c in range(g.dim + 1)
                        if (b, c) in mat})
        bmap = {b: i for i, b in enumerate(sub_b)}
        wmap = {w: i for i, w in enumerate(sub_w)}
        mats = [[-1] * len(sub_b) for _ in range(g.dim + 1)]
        for b in sub_b:
            for c in range(g.dim + 1):
                mats[c][bmap[b]] = wmap[mat[(b, c)]]
        root = None
        if rb_rc is not None and rb_rc[0] in bmap:
            root = (bmap[rb_rc[0]], rb_rc[1])
        components.append(ColoredGraph(g.dim, len(sub_b),
                                       tuple(tuple(m) for m in mats), root))

    case = "I" if comp_id == q + 1 else "II"
    predicted = g.dim * (q + 1 - comp_id) - 2 * sum(r_per)
    report = RemovalReport(q, tuple(externals), comp_id, tuple(d_per),
                           tuple(r_per), case, predicted,
                           (g.dim - q) * (g.dim - q - 1) // 2)
    return components, report


def audit_dipole_removal(g: ColoredGraph, black: int, white: int) -> dict:
    """Run a removal and compare prediction against the actual face/degree change."""
    components, report = remove_dipole(g, black, white)
    actual = degree(g) - sum(degree(c) for c in components)
    faces_removed = face_count(g) - sum(face_count(c) for c in components)
    expected_faces = (report.untouched_faces_removed
                      - (report.q + 1) * report.q // 2
                      + 2 * sum(report.type_b_per_component))
    return {
        "report": report,
        "actual_delta": actual,
        "predicted_delta": report.predicted_delta,
        "delta_ok": actual == report.predicted_delta,
        "faces_removed": faces_removed,
        "faces_ok": faces_removed == expected_faces,
        "component_degrees": tuple(degree(c) for c in components),
    }


# -- scheme workbench --------------------------------------------------------------

_PORT_MATE = {PORT_LW: PORT_LB, PORT_LB: PORT_LW, PORT_RW: PORT_RB, PORT_RB: PORT_RW}
_PORT_ACROSS = {PORT_LW: PORT_RW, PORT_RW: PORT_LW, PORT_LB: PORT_RB, PORT_RB: PORT_LB}


class Workbench:
    """Mutable, possibly disconnected scheme with edge marks.

    Vertices and chain-vertices keep their identity through removals; new
    pairings created by a removal are marked.  This is the engine behind
    chain-vertex removal and the iterative deletion procedure.
    """

    def __init__(self, s: Scheme):
        self.dim = s.dim
        self.blacks = set(range(s.p))
        self.whites = set(range(s.p))
        self.cvs: dict[int, ChainKind] = dict(enumerate(s.chain_vertices))
        self.pair: dict = {}
        for a, b in s.edges:
            self.pair[a] = b
            self.pair[b] = a
        self.marked: set = set()
        if s.root is None:
            self.root_edge = None
        else:
            rb, rc = s.root
            self.root_edge = frozenset({("b", rb, rc), self.pair[("b", rb, rc)]})
        self._next_vertex = s.p

    def clone(self) -> "Workbench":
        other = object.__new__(Workbench)
        other.dim = self.dim
        other.blacks = set(self.blacks)
        other.whites = set(self.whites)
        other.cvs = dict(self.cvs)
        other.pair = dict(self.pair)
        other.marked = set(self.marked)
        other.root_edge = self.root_edge
        other._next_vertex = self._next_vertex
        return other

    # -- basic surgery ----------------------------------------------------------

    def _link(self, a, b, mark: bool):
        self.pair[a] = b
        self.pair[b] = a
        if mark:
            self.marked.add(frozenset({a, b}))

    def _unlink(self, a):
        b = self.pair.pop(a)
        self.pair.pop(b)
        self.marked.discard(frozenset({a, b}))
        return b

    def _retire_root(self, replacement: frozenset | None):
        self.root_edge = replacement

    def _root_died(self, a, b) -> bool:
        return self.root_edge is not None and self.root_edge == frozenset({a, b})

    def shared_colors(self, black: int, white: int) -> list[int]:
        out = []
        for c in range(self.dim + 1):
            if self.pair.get(("b", black, c)) == ("w", white, c):
                out.append(c)
        return out

    def remove_chain_vertex(self, idx: int) -> list[frozenset]:
        """Delete a chain-vertex, rejoining port half-edges end by end.

        Returns the new pairings (all marked), left end first.
        """
        if idx not in self.cvs:
            raise NotAChainVertex(f"no chain-vertex {idx}")
        partners = {p: self._unlink(("cv", idx, p)) for p in PORTS}
        del self.cvs[idx]
        new = []
        for pw, pb in ((PORT_LW, PORT_LB), (PORT_RW, PORT_RB)):
            a, b = partners[pw], partners[pb]   # a is black-side, b is white-side
            self._link(a, b, mark=True)
            new.append(frozenset({a, b}))
        return new

    def remove_pair(self, black: int, white: int, expected_q: int) -> list[frozenset]:
        """Delete a vertex pair sharing exactly D - expected_q edges."""
        shared = self.shared_colors(black, white)
        if self.dim - len(shared) != expected_q:
            raise NotADipole(f"pair ({black},{white}) shares {len(shared)} edges")
        root_hit = False
        for c in shared:
            a = ("b", black, c)
            if self._root_died(a, ("w", white, c)):
                root_hit = True
            self._unlink(a)
        new = []
        for c in range(self.dim + 1):
            if c in shared:
                continue
            pa = ("b", black, c)
            pb = ("w", white, c)
            far_w = self._unlink(pa)    # white-side endpoint
            far_b = self._unlink(pb)    # black-side endpoint
            inherits = (self.root_edge is not None
                        and self.root_edge & {pa, pb})
            self._link(far_b, far_w, mark=True)
            e = frozenset({far_b, far_w})
            new.append(e)
            if inherits:
                self._retire_root(e)
        self.blacks.discard(black)
        self.whites.discard(white)
        if root_hit:
            self._retire_root(new[0])
        return new

    def add_delta(self, marked_edges: int) -> int:
        """Append a fresh 2-vertex graph with the given number of marked edges."""
        v = self._next_vertex
        self._next_vertex += 1
        self.blacks.add(v)
        self.whites.add(v)
        for c in range(self.dim + 1):
            self._link(("b", v, c), ("w", v, c), mark=c < marked_edges)
        return v

    # -- components -------------------------------------------------------------

    def _nodes(self):
        return ([("B", v) for v in sorted(self.blacks)]
                + [("W", v) for v in sorted(self.whites)]
                + [("C", i) for i in sorted(self.cvs)])

    def _node_of_endpoint(self, ep):
        if ep[0] == "b":
            return ("B", ep[1])
        if ep[0] == "w":
            return ("W", ep[1])
        return ("C", ep[1])

    def _endpoints_of_node(self, node):
        tag, v = node
        if tag == "B":
            return [("b", v, c) for c in range(self.dim + 1)]
        if tag == "W":
            return [("w", v, c) for c in range(self.dim + 1)]
        return [("cv", v, p) for p in PORTS]

    def components(self) -> list[set]:
        seen = set()
        comps = []
        for node in self._nodes():
            if node in seen:
                continue
            comp = {node}
            stack = [node]
            seen.add(node)
            while stack:
                cur = stack.pop()
                for ep in self._endpoints_of_node(cur):
                    other = self._node_of_endpoint(self.pair[ep])
                    if other not in seen:
                        seen.add(other)
                        comp.add(other)
                        stack.append(other)
            comps.append(comp)
        return comps

    def component_of(self, node) -> set:
        for comp in self.components():
            if node in comp:
                return comp
        raise InternalCheckFailed(f"node {node} not found")

    def component_scheme(self, comp: set) -> Scheme:
        bmap = {v: i for i, v in enumerate(sorted(v for t, v in comp if t == "B"))}
        wmap = {v: i for i, v in enumerate(sorted(v for t, v in comp if t == "W"))}
        cmap = {v: i for i, v in enumerate(sorted(v for t, v in comp if t == "C"))}
        if len(bmap) != len(wmap):
            raise InternalCheckFailed("unbalanced component")

        def remap(ep):
            if ep[0] == "b":
                return ("b", bmap[ep[1]], ep[2])
            if ep[0] == "w":
                return ("w", wmap[ep[1]], ep[2])
            return ("cv", cmap[ep[1]], ep[2])

        edges = set()
        for node in comp:
            for ep in self._endpoints_of_node(node):
                other = self.pair[ep]
                edges.add(tuple(sorted((remap(ep), remap(other)))))
        kinds = tuple(self.cvs[v] for v in sorted(cmap))
        return Scheme(self.dim, len(bmap), tuple(sorted(edges)), kinds, None)

    def component_degree(self, comp: set) -> int:
        return scheme_degree(self.component_scheme(comp))

    def component_marks(self, comp: set) -> int:
        n = 0
        for e in self.marked:
            a = next(iter(e))
            if self._node_of_endpoint(a) in comp:
                n += 1
        return n

    def root_component(self) -> set:
        if self.root_edge is None:
            raise InternalCheckFailed("lost track of the root")
        a = next(iter(self.root_edge))
        return self.component_of(self._node_of_endpoint(a))


# -- chain-vertex removal (public, typed cases) --------------------------------------

@dataclass(frozen=True)
class ChainVertexRemoval:
    components: tuple[Scheme, ...]
    case: str                    # I | II | IIIa | IIIb
    degree_before: int
    degrees_after: tuple[int, ...]
    new_edges: tuple


def _same_face(g: ColoredGraph, e1, e2, c_other: int) -> bool:
    b1, c1 = e1
    b2, _ = e2
    return b2 in _face_orbit(g, c1, c_other, b1)


def remove_chain_vertex(s: Scheme, idx: int) -> ChainVertexRemoval:
    """Remove one chain-vertex of a scheme and classify the removal.

    Case I: separating.  Case II: non-separating with the two new edges on
    distinct bicolored cycles.  Case IIIa/IIIb: single cycle, unbroken/broken.
    """
    if not 0 <= idx < len(s.chain_vertices):
        raise NotAChainVertex(f"no chain-vertex {idx}")
    cv = s.chain_vertices[idx]
    before = scheme_degree(s)
    wb = Workbench(s)
    new_edges = wb.remove_chain_vertex(idx)
    comps = wb.components()
    schemes = tuple(wb.component_scheme(c) for c in comps)
    degrees = tuple(scheme_degree(c) for c in schemes)

    if len(comps) == 2:
        if before != sum(degrees):
            raise InternalCheckFailed("separating removal changed the degree")
        return ChainVertexRemoval(schemes, "I", before, degrees, tuple(new_edges))
    if len(comps) != 1:
        raise InternalCheckFailed(f"cv removal produced {len(comps)} components")

    drop = before - degrees[0]
    if drop == s.dim - 2:
        if cv.kind == BROKEN:
            raise InternalCheckFailed("broken chain-vertex dropped degree by D-2")
        return ChainVertexRemoval(schemes, "IIIa", before, degrees, tuple(new_edges))
    if drop != s.dim:
        raise InternalCheckFailed(f"chain-vertex removal dropped degree by {drop}")
    if cv.kind != BROKEN:
        return ChainVertexRemoval(schemes, "II", before, degrees, tuple(new_edges))

    # Broken, drop D: one or two resulting cycles tells IIIb from II.  Trace on
    # a realization of the remaining scheme.
    comp_scheme = schemes[0]
    remap = _remap_after_cv_removal(s, idx, comp_scheme)
    real = realize(comp_scheme)
    g_edges = []
    for e in new_edges:
        a, b = sorted(remap(ep) for ep in e)
        g_edges.append(real.edge_of[(a, b)])
    i, j = cv.left_color, cv.right_color
    if i != j:
        same = _same_face(real.graph, g_edges[0], g_edges[1], j)
    else:
        same = any(_same_face(real.graph, g_edges[0], g_edges[1], c)
                   for c in range(s.dim + 1) if c != i)
    case = "IIIb" if same else "II"
    return ChainVertexRemoval(schemes, case, before, degrees, tuple(new_edges))


def _remap_after_cv_removal(s: Scheme, idx: int, comp: Scheme):
    """Endpoint map from the post-removal workbench labels to the single
    component's labels (chain-vertex indices shift down past idx)."""
    def remap(ep):
        if ep[0] == "cv" and ep[1] > idx:
            return ("cv", ep[1] - 1, ep[2])
        return ep
    return remap


# -- iterative deletion statistics ----------------------------------------------------

@dataclass(frozen=True)
class ReductionStats:
    """Outcome of the full marked-edge deletion procedure on a scheme."""

    separating: int              # p
    cv_soft: int                 # q1: non-separating unbroken, single cycle
    cv_hard: int                 # q2: other non-separating chain-vertices
    dipole_d1: int               # q': non-separating (D-1)-dipoles
    dipole_d2: int               # q'': non-separating (D-2)-dipoles
    skipped: int                 # targets invalidated by earlier removals
    c_plus: int
    c_zero: int
    marks_per_component: tuple[int, ...]
    targets: int                 # r + s + t

    def executed(self) -> int:
        return (self.separating + self.cv_soft + self.cv_hard
                + self.dipole_d1 + self.dipole_d2)


def _scheme_pairs_sharing(s_or_wb, q: int) -> list[tuple[int, int]]:
    wb = s_or_wb
    out = []
    for b in sorted(wb.blacks):
        partners: dict[int, int] = {}
        for c in range(wb.dim + 1):
            other = wb.pair[("b", b, c)]
            if other[0] == "w":
                partners[other[1]] = partners.get(other[1], 0) + 1
        for w, n in sorted(partners.items()):
            if n == wb.dim - q:
                out.append((b, w))
    return out


def iterative_reduction_stats(s: Scheme) -> ReductionStats:
    """Run the chain-vertex / (D-1) / (D-2) deletion procedure with marks.

    Targets are listed up front; a target whose vertices vanished or whose
    parallel count drifted is skipped (this happens when dipoles overlap).
    Afterwards every degree-0 non-root component must carry at least three
    marks, which is asserted.
    """
    wb = Workbench(s)
    cv_list = sorted(wb.cvs)
    d1_list = _scheme_pairs_sharing(wb, 1)
    d2_list = _scheme_pairs_sharing(wb, 2) if s.dim >= 4 else []
    targets = len(cv_list) + len(d1_list) + len(d2_list)

    p = q1 = q2 = qp = qpp = skipped = 0

    for idx in cv_list:
        comp_before = wb.component_of(("C", idx))
        deg_before = wb.component_degree(comp_before)
        kind = wb.cvs[idx]
        new_edges = wb.remove_chain_vertex(idx)
        after = [c for c in wb.components()
                 if any(wb._node_of_endpoint(next(iter(e))) in c for e in new_edges)]
        degs = [wb.component_degree(c) for c in after]
        if len(after) == 2:
            if deg_before != sum(degs):
                raise ProcedureStuck("separating chain-vertex changed the degree")
            p += 1
        else:
            drop = deg_before - degs[0]
            if drop == wb.dim - 2:
                if kind.kind == BROKEN:
                    raise ProcedureStuck("broken chain-vertex dropped D-2")
                q1 += 1
            elif drop == wb.dim:
                q2 += 1
            else:
                raise ProcedureStuck(f"chain-vertex drop {drop}")

    for (b, w) in d1_list:
        if b not in wb.blacks or w not in wb.whites:
            skipped += 1
            continue
        if len(wb.shared_colors(b, w)) != wb.dim - 1:
            skipped += 1
            continue
        comp_before = wb.component_of(("B", b))
        deg_before = wb.component_degree(comp_before)
        new_edges = wb.remove_pair(b, w, 1)
        after = [c for c in wb.components()
                 if any(wb._node_of_endpoint(next(iter(e))) in c for e in new_edges)]
        degs = [wb.component_degree(c) for c in after]
        if len(after) == 2:
            if deg_before != sum(degs):
                raise ProcedureStuck("separating (D-1)-dipole changed the degree")
            p += 1
        else:
            drop = deg_before - degs[0]
            if drop not in (wb.dim - 2, wb.dim):
                raise ProcedureStuck(f"(D-1)-dipole drop {drop}")
            qp += 1

    for (b, w) in d2_list:
        if b not in wb.blacks or w not in wb.whites:
            skipped += 1
            continue
        if len(wb.shared_colors(b, w)) != wb.dim - 2:
            skipped += 1
            continue
        comp_before = wb.component_of(("B", b))
        deg_before = wb.component_degree(comp_before)
        n_comp_before = len(wb.components())

        probe = wb.clone()
        probe.remove_pair(b, w, 2)
        spread = len(probe.components()) - n_comp_before

        if spread == 2:      # totally separating: three components appear
            wb.remove_pair(b, w, 2)
            wb.add_delta(3)
            p += 1
        elif spread == 1:    # partially separating: break the separating color pair
            sep_color = _separating_color(wb, b, w)
            a1 = ("b", b, sep_color)
            a2 = ("w", w, sep_color)
            far_w = wb._unlink(a1)
            far_b = wb._unlink(a2)
            wb._link(a1, a2, mark=True)
            wb._link(far_b, far_w, mark=True)
            p += 1
        else:
            new_edges = wb.remove_pair(b, w, 2)
            comp_after = [c for c in wb.components()
                          if any(wb._node_of_endpoint(next(iter(e))) in c
                                 for e in new_edges)]
            degs = [wb.component_degree(c) for c in comp_after]
            drop = deg_before - degs[0]
            if drop < 2 * wb.dim - 6:
                raise ProcedureStuck(f"(D-2)-dipole drop {drop}")
            qpp += 1

    comps = wb.components()
    root_comp = wb.root_component()
    marks = []
    c_plus = c_zero = 0
    for comp in comps:
        m = wb.component_marks(comp)
        marks.append(m)
        if comp == root_comp or wb.component_degree(comp) > 0:
            c_plus += 1
        else:
            c_zero += 1
            if m < 3:
                raise ProcedureStuck("degree-0 non-root component with < 3 marks")

    stats = ReductionStats(p, q1, q2, qp, qpp, skipped, c_plus, c_zero,
                           tuple(sorted(marks)), targets)
    if stats.executed() + skipped != targets:
        raise ProcedureStuck("removal bookkeeping does not add up")
    if 2 * (q1 + q2 + qp) + 3 * qpp + c_plus - 2 < c_zero:
        raise ProcedureStuck("mark inequality violated")
    return stats


def _separating_color(wb: Workbench, b: int, w: int) -> int:
    shared = set(wb.shared_colors(b, w))
    for c in range(wb.dim + 1):
        if c in shared:
            continue
        # Does cutting both color-c edges at the pair split it from the rest?
        cut = {frozenset({("b", b, c), wb.pair[("b", b, c)]}),
               frozenset({("w", w, c), wb.pair[("w", w, c)]})}
        seen = {("B", b)}
        stack = [("B", b)]
        while stack:
            cur = stack.pop()
            for ep in wb._endpoints_of_node(cur):
                other = wb.pair[ep]
                if frozenset({ep, other}) in cut:
                    continue
                node = wb._node_of_endpoint(other)
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
        if wb._node_of_endpoint(wb.pair[("b", b, c)]) not in seen:
            return c
    raise ProcedureStuck("partially separating dipole without a separating color")
