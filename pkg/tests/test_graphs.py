import random

import pytest
from hypothesis import given, settings, strategies as st

from melonforge.errors import (
    BadOpenSet,
    Disconnected,
    NotAPermutation,
    NotRooted,
    RootOutOfRange,
)
from melonforge.graphs import (
    canonical_encoding,
    close,
    degree,
    degree_via_jackets,
    delta_graph,
    face_profile,
    open_root,
    relabel,
    validate,
)
from conftest import square_graph


def test_validate_delta():
    g = validate(3, 1, [[0]] * 4, root=(0, 0))
    assert g.k == 1 and g.root == (0, 0)


def test_validate_rejects_disconnected():
    with pytest.raises(Disconnected):
        validate(3, 2, [[0, 1]] * 4)


def test_validate_rejects_non_permutation():
    with pytest.raises(NotAPermutation) as exc:
        validate(3, 2, [[0, 0]] + [[0, 1]] * 3)
    assert exc.value.color == 0


def test_validate_rejects_bad_root():
    with pytest.raises(RootOutOfRange):
        validate(3, 1, [[0]] * 4, root=(0, 5))
    with pytest.raises(RootOutOfRange):
        validate(3, 1, [[0]] * 4, root=(1, 0))


def test_delta_faces_and_degree():
    d = delta_graph(3)
    fp = face_profile(d)
    assert fp.total == 6
    assert fp.by_half_length == {1: 6}
    assert degree(d) == 0
    assert degree_via_jackets(d) == 0
    for dim in (4, 5, 6):
        assert degree(delta_graph(dim)) == 0


def test_square_profile_and_degree(square3):
    fp = face_profile(square3)
    # pairs inside each matched block give two short faces, mixed pairs one long
    assert fp.lengths[(0, 1)] == (2, 2)
    assert fp.lengths[(2, 3)] == (2, 2)
    for pair in [(0, 2), (0, 3), (1, 2), (1, 3)]:
        assert fp.lengths[pair] == (4,)
    assert degree(square3) == 1
    assert degree_via_jackets(square3) == 1


def test_square_degree_other_dims():
    assert degree(square_graph(4)) == 2          # (D-q-1) q with q = 1
    assert degree(square_graph(4, q=2)) == 2     # (D-q-1) q with q = 2
    assert degree(square_graph(5)) == 3


@pytest.mark.parametrize("dim,k,seed", [(3, 3, 0), (3, 4, 1), (4, 3, 2)])
def test_face_identities_random(dim, k, seed):
    rng = random.Random(seed)
    found = 0
    while found < 10:
        mats = [list(range(k))]
        for _ in range(dim):
            p = list(range(k))
            rng.shuffle(p)
            mats.append(p)
        try:
            g = validate(dim, k, mats, root=(0, 0))
        except Disconnected:
            continue
        found += 1
        fp = face_profile(g)
        d = degree(g)
        assert dim * (dim + 1) * k == 2 * sum(p * n for p, n in fp.by_half_length.items())
        assert dim * (dim - 1) * k == 2 * fp.total + 2 * d - 2 * dim
        assert (dim + 1) * d + 2 * fp.by_half_length.get(1, 0) == dim * (dim + 1) + sum(
            ((dim - 1) * p - dim - 1) * n
            for p, n in fp.by_half_length.items() if p >= 2)
        assert d == degree_via_jackets(g)


@given(st.integers(0, 10 ** 9))
@settings(max_examples=40, deadline=None)
def test_encoding_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    from melonforge.reduction import insert_melon
    g = square_graph(3)
    for _ in range(rng.randrange(0, 4)):
        g = insert_melon(g, rng.choice(list(g.edges())), rng.random() < 0.5)
    enc = canonical_encoding(g)
    bp = list(range(g.k))
    wp = list(range(g.k))
    rng.shuffle(bp)
    rng.shuffle(wp)
    assert canonical_encoding(relabel(g, bp, wp)) == enc


def test_encodings_separate_degrees(square3):
    # the degree can be recomputed from an encoding, so they never collide
    d = delta_graph(3)
    g2 = validate(3, 2, [[0, 1], [1, 0], [0, 1], [1, 0]], root=(0, 0))
    encs = {canonical_encoding(x) for x in (square3, d, g2)}
    assert len(encs) == 3


def test_open_close_round_trip(square3):
    p = open_root(square3)
    halves = p.open_halves()
    assert len(halves) == 2
    assert {h[0] for h in halves} == {"b", "w"}
    g = close(p)
    assert g.matchings == square3.matchings and g.root == square3.root


def test_open_requires_root(square3):
    with pytest.raises(NotRooted):
        open_root(square3.with_root(None))


def test_close_rejects_bad_open_sets():
    from melonforge.graphs import PreGraph
    # four open half-edges
    with pytest.raises(BadOpenSet):
        close(PreGraph(3, 2, 2, ((-1, -1), (0, 1), (0, 1), (0, 1))))
    # unbalanced sides (the only way to open two halves of different colors)
    with pytest.raises(BadOpenSet):
        close(PreGraph(3, 2, 1, ((0, -1), (-1, 0), (0, -1), (-1, 0))))


def test_delta_encoding_fixed():
    a = delta_graph(3)
    b = validate(3, 1, [[0]] * 4, root=(0, 0))
    assert canonical_encoding(a) == canonical_encoding(b)
