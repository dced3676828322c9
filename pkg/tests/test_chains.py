import random

import pytest

from melonforge.chains import (
    BROKEN,
    UNBROKEN_DISTINCT,
    UNBROKEN_EQUAL,
    ChainKind,
    SchemeBuilder,
    canonical_scheme_encoding,
    chain_color_sequence,
    classify_chain,
    find_dipoles,
    find_maximal_proper_chains,
    graph_as_scheme,
    is_reduced,
    realize,
    scheme_degree,
    scheme_from_core,
    scheme_of,
    scheme_signature,
)
from melonforge.graphs import canonical_form, degree, delta_graph, validate
from melonforge.reduction import is_melon_free
from conftest import lollipop_scheme, square_graph


def canon_scheme(graph):
    return scheme_of(canonical_form(graph).graph)


def test_find_dipoles():
    assert find_dipoles(delta_graph(3), 1) == []
    assert len(find_dipoles(square_graph(3), 1)) == 4
    sq4 = square_graph(4)
    assert len(find_dipoles(sq4, 1)) == 2
    assert len(find_dipoles(sq4, 2)) == 2


def test_square_has_no_proper_chain(square3):
    assert find_maximal_proper_chains(square3) == []


def loop_scheme(dim=3, kind=None, parallels=(0, 1), colors=(2, 3)):
    b = SchemeBuilder(dim)
    rd = b.add_pair(list(parallels) + list(range(4, dim + 1)))
    cv = b.add_chain_vertex(kind or ChainKind(UNBROKEN_DISTINCT, *colors))
    b.connect(("b", rd, colors[0]), ("cv", cv, "lw"))
    b.connect(("w", rd, colors[0]), ("cv", cv, "lb"))
    b.connect(("b", rd, colors[1]), ("cv", cv, "rw"))
    b.connect(("w", rd, colors[1]), ("cv", cv, "rb"))
    b.set_root(rd, 0)
    return b.build()


def test_hanging_chain_found_and_classified():
    s = loop_scheme()
    g = realize(s).graph
    chains = find_maximal_proper_chains(g)
    assert len(chains) == 1
    assert chains[0].length == 3
    kind = classify_chain(g, chains[0])
    assert kind.kind == UNBROKEN_DISTINCT and {kind.left_color, kind.right_color} == {2, 3}


@pytest.mark.parametrize("kind,lengths", [
    (ChainKind(UNBROKEN_DISTINCT, 2, 3), (3, 5, 7)),
    (ChainKind(UNBROKEN_EQUAL, 2, 2, secondary=3), (2, 4, 6)),
    (ChainKind(BROKEN, 2, 3), (2, 3, 4)),
    (ChainKind(BROKEN, 2, 2), (3, 4, 5)),
])
def test_classification_round_trip(kind, lengths):
    if kind.left_color != kind.right_color:
        # distinct-end chains close into a loop on one anchor; the root on the
        # anchor's parallel keeps the ladder from being extended into it
        s = loop_scheme(kind=kind)
    else:
        b = SchemeBuilder(3)
        d1 = b.add_pair([0])
        d2 = b.add_pair([0])
        cv = b.add_chain_vertex(kind)
        b.connect(("b", d1, kind.left_color), ("cv", cv, "lw"))
        b.connect(("w", d1, kind.left_color), ("cv", cv, "lb"))
        b.connect(("b", d2, kind.right_color), ("cv", cv, "rw"))
        b.connect(("w", d2, kind.right_color), ("cv", cv, "rb"))
        for c in [c for c in range(1, 4)
                  if c not in (kind.left_color, kind.right_color)]:
            b.connect(("b", d1, c), ("w", d2, c))
            b.connect(("b", d2, c), ("w", d1, c))
        b.set_root(d1, 0)
        s = b.build()
    assert is_reduced(s)
    base_degree = scheme_degree(s)
    rng = random.Random(1)
    for n in lengths:
        real = realize(s, lengths={0: n}, rng=rng)
        g = real.graph
        assert is_melon_free(g)
        assert degree(g) == base_degree
        chains = find_maximal_proper_chains(g)
        assert len(chains) == 1 and chains[0].length == n
        got = classify_chain(g, chains[0])
        assert (got.kind, got.left_color, got.right_color, got.secondary) in {
            (kind.kind, kind.left_color, kind.right_color, kind.secondary),
            (kind.kind, kind.right_color, kind.left_color, kind.secondary)}
        # parity checks come with the classification
        if got.kind == UNBROKEN_DISTINCT:
            assert n % 2 == 1
        if got.kind == UNBROKEN_EQUAL:
            assert n % 2 == 0
        s2 = canon_scheme(g)
        assert canonical_scheme_encoding(s2) == canonical_scheme_encoding(s)


def test_twister_is_not_contracted():
    # ladder with crossed rails between two anchors stays dipoles in the scheme
    mats = [
        [0, 1, 2],        # color 0: parallels of anchors and the ladder pair
        [1, 2, 0],        # color 1 rail
        [2, 0, 1],        # color 2 rail
        [0, 1, 2],        # color 3: second parallel set
    ]
    g = validate(3, 3, mats, root=(0, 0))
    twister_pairs = [(d.black, d.white) for d in find_dipoles(g, 1)]
    assert len(twister_pairs) == 3
    assert find_maximal_proper_chains(g) == []
    s = canon_scheme(g)
    assert s.chain_vertices == ()


def test_scheme_of_square_is_identity(square3):
    s = canon_scheme(square3)
    assert s.chain_vertices == ()
    assert scheme_signature(s) == (2, 0, 0, 0, 0)
    assert canonical_scheme_encoding(s) == canonical_scheme_encoding(
        graph_as_scheme(canonical_form(square3).graph))


def test_lollipop_signature_and_degree():
    s = lollipop_scheme(3)
    assert scheme_signature(s) == (2, 0, 1, 0, 1)
    assert scheme_degree(s) == 1
    assert is_reduced(s)
    for dim in (4, 5):
        assert scheme_degree(lollipop_scheme(dim)) == dim - 2


def test_substitution_degree_invariance():
    rng = random.Random(9)
    s = lollipop_scheme(3)
    degs = set()
    encs = set()
    for trial in range(12):
        lengths = {0: rng.choice([2, 3, 4, 5]), 1: rng.choice([3, 5])}
        g = realize(s, lengths=lengths, rng=rng).graph
        degs.add(degree(g))
        encs.add(canonical_scheme_encoding(canon_scheme(g)))
    assert degs == {1}
    assert encs == {canonical_scheme_encoding(s)}


def test_scheme_encoding_invariance_under_builder_order():
    def build(perm):
        b = SchemeBuilder(3)
        rd = b.add_pair([0, 1])
        kinds = [ChainKind(UNBROKEN_DISTINCT, 2, 3)]
        cv = b.add_chain_vertex(kinds[0])
        conns = [
            (("b", rd, 2), ("cv", cv, "lw")),
            (("w", rd, 2), ("cv", cv, "lb")),
            (("b", rd, 3), ("cv", cv, "rw")),
            (("w", rd, 3), ("cv", cv, "rb")),
        ]
        for i in perm:
            b.connect(*conns[i])
        b.set_root(rd, 0)
        return b.build()

    import itertools
    encs = {canonical_scheme_encoding(build(p))
            for p in itertools.permutations(range(4))}
    assert len(encs) == 1


def test_scheme_encoding_flip_invariance():
    # wiring the chain-vertex with its ends swapped describes the same scheme
    def build(flipped):
        b = SchemeBuilder(3)
        d1 = b.add_pair([0])
        d2 = b.add_pair([0])
        cv = b.add_chain_vertex(ChainKind(UNBROKEN_EQUAL, 2, 2, secondary=3))
        if flipped:
            l, r = ("rw", "rb"), ("lw", "lb")
        else:
            l, r = ("lw", "lb"), ("rw", "rb")
        b.connect(("b", d1, 2), ("cv", cv, l[0]))
        b.connect(("w", d1, 2), ("cv", cv, l[1]))
        b.connect(("b", d2, 2), ("cv", cv, r[0]))
        b.connect(("w", d2, 2), ("cv", cv, r[1]))
        for c in (1, 3):
            b.connect(("b", d1, c), ("w", d2, c))
            b.connect(("b", d2, c), ("w", d1, c))
        b.set_root(d1, 0)
        return b.build()

    assert canonical_scheme_encoding(build(False)) == \
        canonical_scheme_encoding(build(True))


def test_distinct_kinds_encode_distinctly():
    encs = {canonical_scheme_encoding(loop_scheme(kind=k))
            for k in (ChainKind(UNBROKEN_DISTINCT, 2, 3), ChainKind(BROKEN, 2, 3))}
    assert len(encs) == 2


def test_necklace_family_round_trip():
    # cyclic ladder threaded through a root melon: overlapping maximal windows
    # exist, and the greedy canonical choice must stay substitution-stable
    g = validate(3, 5, ((0, 2, 1, 4, 3), (1, 0, 2, 3, 4),
                        (0, 3, 4, 1, 2), (0, 2, 1, 4, 3)), root=(0, 0))
    s = canon_scheme(g)
    assert is_reduced(s)
    for n in (3, 5, 7):
        r = realize(s, lengths={i: n for i in range(len(s.chain_vertices))})
        assert degree(r.graph) == 1
        assert canonical_scheme_encoding(canon_scheme(r.graph)) == \
            canonical_scheme_encoding(s)


def test_broken_sequences_are_broken():
    rng = random.Random(4)
    for (i, j) in [(0, 1), (2, 2), (1, 3)]:
        kind = ChainKind(BROKEN, i, j)
        for n in range(3 if i == j else 2, 7):
            for use_rng in (None, rng):
                seq = chain_color_sequence(kind, n, 3, use_rng)
                assert seq[0] == i and seq[-1] == j and len(seq) == n + 1
                assert all(seq[t] != seq[t + 1] for t in range(n))
                assert not all(seq[t + 1] == seq[t - 1] for t in range(1, n))


def test_scheme_from_core_on_realizations():
    s = lollipop_scheme(3)
    g = realize(s).graph
    s2 = scheme_from_core(canonical_form(g).graph)
    assert canonical_scheme_encoding(s2) == canonical_scheme_encoding(s)
