import random

import pytest

from melonforge.errors import MelonIsWholeGraph
from melonforge.graphs import (
    canonical_encoding,
    canonical_form,
    degree,
    delta_graph,
    face_count,
    validate,
)
from melonforge.reduction import (
    core,
    cut_set,
    find_melons,
    find_root_melon,
    insert_melon,
    is_melon_free,
    is_melonic,
    is_two_edge_cut,
    reduce_to_core_graph,
    remove_melon,
    substitute,
)
from conftest import square_graph


def test_delta_has_one_proper_melon():
    for rc in range(4):
        m = find_melons(delta_graph(3, root_color=rc))
        assert len(m) == 1 and m[0].external_color == rc and m[0].on_root_edge


def test_melons_after_insertion():
    d = delta_graph(3)
    # inserting off the root leaves a single removable melon; the pair around
    # the root shares D parallels including the root, which protects it
    g = insert_melon(d, (0, 1))
    ms = find_melons(g)
    assert len(ms) == 1 and not ms[0].on_root_edge
    assert find_root_melon(g) is not None
    # inserting on the root edge leaves two removable melons, both touching it
    g = insert_melon(d, (0, 0))
    ms = find_melons(g)
    assert len(ms) == 2 and all(m.on_root_edge for m in ms)


def test_square_melon_free(square3):
    assert is_melon_free(square3)
    assert find_root_melon(square3) is None


def test_remove_melon_round_trip():
    d = delta_graph(3)
    g = insert_melon(d, (0, 2))
    assert degree(g) == 0
    m = find_melons(g)[0]
    back = remove_melon(g, m)
    assert canonical_encoding(back) == canonical_encoding(d)
    with pytest.raises(MelonIsWholeGraph):
        remove_melon(d, find_melons(d)[0])


def test_removal_drops_binomial_faces():
    rng = random.Random(11)
    for dim in (3, 4):
        g = square_graph(dim)
        for _ in range(4):
            g = insert_melon(g, rng.choice(list(g.edges())), rng.random() < 0.5)
        d0 = degree(g)
        m = find_melons(g)[0]
        g2 = remove_melon(g, m)
        assert degree(g2) == d0
        assert face_count(g) - face_count(g2) == dim * (dim - 1) // 2


def test_core_of_melonic_is_empty():
    g = insert_melon(insert_melon(delta_graph(3), (0, 1)), (1, 3))
    dec = core(g)
    assert dec.core is None
    assert len(dec.attachments) == 1
    assert dec.attachments[0].vertex_count == 2 * g.k


def test_core_of_square_is_itself(square3):
    dec = core(square3)
    assert dec.core.k == 2
    assert all(a is None for a in dec.attachments)
    assert len(dec.slots) == 2 + (3 + 1) * 2 - 1
    assert canonical_encoding(dec.core) == canonical_encoding(
        canonical_form(square3).graph)


def test_core_with_insertions_and_substitution(square3):
    rng = random.Random(7)
    g = square3
    for _ in range(3):
        g = insert_melon(g, rng.choice(list(g.edges())), rng.random() < 0.5)
    dec = core(g)
    assert canonical_encoding(dec.core) == canonical_encoding(
        canonical_form(square3).graph)
    assert sum(a.vertex_count for a in dec.attachments if a) == 6
    assert dec.core_degree == degree(g) == 1
    rebuilt = substitute(dec)
    assert canonical_encoding(rebuilt) == canonical_encoding(g)


@pytest.mark.parametrize("dim,seed,n_ins", [(3, 0, 6), (3, 1, 10), (4, 2, 6)])
def test_substitution_round_trip_random(dim, seed, n_ins):
    rng = random.Random(seed)
    g = square_graph(dim)
    for _ in range(n_ins):
        g = insert_melon(g, rng.choice(list(g.edges())), rng.random() < 0.5)
    assert canonical_encoding(substitute(core(g))) == canonical_encoding(g)


def test_order_independence():
    rng = random.Random(3)
    for dim in (3, 4):
        seed_graph = square_graph(dim)
        seed_enc = canonical_encoding(canonical_form(seed_graph).graph)
        for trial in range(25):
            g = seed_graph
            for _ in range(rng.randrange(1, 12)):
                g = insert_melon(g, rng.choice(list(g.edges())), rng.random() < 0.5)
            encs = {canonical_encoding(reduce_to_core_graph(g, random.Random(t)))
                    for t in range(3)}
            assert encs == {seed_enc}


def test_is_melonic():
    assert is_melonic(delta_graph(3))
    assert is_melonic(insert_melon(delta_graph(3), (0, 1)))
    assert is_melonic(insert_melon(delta_graph(4), (0, 0)))
    assert not is_melonic(square_graph(3))
    assert not is_melonic(square_graph(4))


def test_is_melonic_matches_degree_at_k2():
    # all seven rooted graphs with two black vertices: four melonic
    import itertools
    from melonforge.errors import Disconnected
    melonic = total = 0
    seen = set()
    for mats in itertools.product([(0, 1), (1, 0)], repeat=3):
        try:
            g = validate(3, 2, [(0, 1)] + list(mats), root=(0, 0))
        except Disconnected:
            continue
        enc = canonical_encoding(g)
        if enc in seen:
            continue
        seen.add(enc)
        total += 1
        m = is_melonic(g)
        assert m == (degree(g) == 0)
        melonic += m
    # identity on color 0 fixes white labels, so classes need a second pass
    for m1 in itertools.permutations(range(2)):
        for rest in itertools.product([(0, 1), (1, 0)], repeat=3):
            try:
                g = validate(3, 2, [m1] + list(rest), root=(0, 0))
            except Disconnected:
                continue
            enc = canonical_encoding(g)
            if enc not in seen:
                seen.add(enc)
                total += 1
                melonic += is_melonic(g)
    assert total == 7 and melonic == 4


def test_cut_sets():
    # in the root-split melonic graph the root's cut-set pairs with its twin
    g = insert_melon(delta_graph(3), (0, 0))
    cs = cut_set(g, g.root)
    assert len(cs.edges) == 2
    assert [len(b) + len(w) for b, w in cs.parts] == [2, 2]
    # every edge of the square is alone in its cut-set
    sq = square_graph(3)
    for e in sq.edges():
        assert len(cut_set(sq, e).edges) == 1


def test_two_edge_cut_iff_shared_cycles():
    def simple_cycles_through(g, e):
        b0, c0 = e
        inv = [g.inverse(c) for c in range(g.dim + 1)]
        cycles = []

        def dfs(side, v, used_b, used_w, edges_used):
            if side == "w":
                for c in range(g.dim + 1):
                    b = inv[c][v]
                    if (b, c) == e:
                        continue
                    if b == b0:
                        cycles.append(edges_used | {(b, c), e})
                        continue
                    if b not in used_b:
                        dfs("b", b, used_b | {b}, used_w, edges_used | {(b, c)})
            else:
                for c in range(g.dim + 1):
                    if (v, c) == e or (v, c) in edges_used:
                        continue
                    w = g.matchings[c][v]
                    if w not in used_w:
                        dfs("w", w, used_b, used_w | {w}, edges_used | {(v, c)})

        dfs("w", g.matchings[c0][b0], {b0}, {g.matchings[c0][b0]}, set())
        return cycles

    for g in (square_graph(3), insert_melon(delta_graph(3), (0, 0)),
              insert_melon(square_graph(3), (1, 2))):
        for e in g.edges():
            cyc = simple_cycles_through(g, e)
            for e2 in g.edges():
                if e2 == e:
                    continue
                assert is_two_edge_cut(g, e, e2) == all(e2 in c for c in cyc)
