import pytest

from melonforge.chains import (
    BROKEN,
    UNBROKEN_DISTINCT,
    ChainKind,
    graph_as_scheme,
    scheme_degree,
    structural_budget,
)
from melonforge.errors import NotAChainVertex, NotADipole, QOutOfRange
from melonforge.graphs import degree, validate
from melonforge.removal import (
    audit_dipole_removal,
    iterative_reduction_stats,
    remove_chain_vertex,
    remove_dipole,
)
from conftest import lollipop_scheme, square_graph


SEPARATING_FIXTURE = validate(
    3, 5,
    [[4, 1, 2, 3, 0], [0, 1, 2, 3, 4], [1, 0, 3, 2, 4], [1, 0, 4, 2, 3]],
    root=(1, 0))     # two square lobes bridged by a 2-dipole at (4, 4)


def test_square_removal_case_iib(square3):
    comps, rep = remove_dipole(square3, 0, 1)
    assert rep.q == 1 and rep.case == "II"
    assert rep.components == 1
    assert rep.type_b_per_component == (1,)
    assert rep.predicted_delta == 1               # delta drops by D-2
    assert [degree(c) for c in comps] == [0]
    audit = audit_dipole_removal(square3, 0, 1)
    assert audit["delta_ok"] and audit["faces_ok"]


def test_completely_separating_dipole():
    g = SEPARATING_FIXTURE
    assert degree(g) == 2
    audit = audit_dipole_removal(g, 4, 4)
    rep = audit["report"]
    assert rep.case == "I" and rep.components == 2
    assert rep.predicted_delta == 0
    assert audit["component_degrees"] == (1, 1)
    assert audit["delta_ok"] and audit["faces_ok"]


def test_d4_two_dipole_with_three_merges():
    g = square_graph(4, q=2)
    assert degree(g) == 2
    audit = audit_dipole_removal(g, 0, 0)
    rep = audit["report"]
    assert rep.q == 2 and rep.components == 1
    assert rep.type_b_per_component == (3,)
    assert rep.predicted_delta == 2 * 4 - 6
    assert audit["delta_ok"] and audit["faces_ok"]


def test_remove_dipole_errors():
    g = SEPARATING_FIXTURE
    assert not g.shared_colors(0, 2)
    with pytest.raises(NotADipole):
        remove_dipole(g, 0, 2)
    # a 1-dipole for D=3 has q = D-1, outside the calculus
    g = validate(3, 3, [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 1, 2]], root=(0, 0))
    pair = next((b, w) for b in range(3) for w in range(3)
                if len(g.shared_colors(b, w)) == 1)
    with pytest.raises(QOutOfRange):
        remove_dipole(g, *pair)


def test_dipole_audit_exhaustive_small():
    from melonforge.enumeration import enumerate_rooted
    from melonforge.chains import find_dipoles
    rows = 0
    for k in (2, 3):
        for g in enumerate_rooted(3, k):
            for dip in find_dipoles(g, 1):
                audit = audit_dipole_removal(g, dip.black, dip.white)
                assert audit["delta_ok"] and audit["faces_ok"]
                rows += 1
    assert rows > 10


def test_chain_vertex_removal_cases():
    s = lollipop_scheme(3)
    assert scheme_degree(s) == 1
    arm = remove_chain_vertex(s, 0)
    assert arm.case == "I"
    assert sorted(arm.degrees_after) == [0, 1]
    loop = remove_chain_vertex(s, 1)
    assert loop.case == "IIIa"
    assert loop.degree_before - sum(loop.degrees_after) == 3 - 2

    sb = lollipop_scheme(3, loop_kind=ChainKind(BROKEN, 2, 3))
    assert scheme_degree(sb) == 3
    loop = remove_chain_vertex(sb, 1)
    assert loop.case == "IIIb"
    assert loop.degree_before - sum(loop.degrees_after) == 3

    with pytest.raises(NotAChainVertex):
        remove_chain_vertex(s, 5)


def test_chain_vertex_removal_case_ii():
    # two anchors joined by three chain-vertices in parallel: removing one
    # leaves the new edges on distinct bicolored cycles
    from melonforge.chains import SchemeBuilder
    b = SchemeBuilder(3)
    d1 = b.add_pair([0])
    d2 = b.add_pair([0])
    cvs = []
    for c in (1, 2, 3):
        cv = b.add_chain_vertex(ChainKind(BROKEN, c, c))
        cvs.append(cv)
        b.connect(("b", d1, c), ("cv", cv, "lw"))
        b.connect(("w", d1, c), ("cv", cv, "lb"))
        b.connect(("b", d2, c), ("cv", cv, "rw"))
        b.connect(("w", d2, c), ("cv", cv, "rb"))
    b.set_root(d1, 0)
    s = b.build()
    res = remove_chain_vertex(s, 0)
    assert res.case == "II"
    assert res.degree_before - sum(res.degrees_after) == 3


def test_iterative_stats_square(square3):
    st = iterative_reduction_stats(graph_as_scheme(square3))
    # overlapping dipoles: one removal empties the structure, three skip
    assert st.targets == 4
    assert st.dipole_d1 == 1 and st.skipped == 3
    assert st.c_zero == 0 and st.c_plus == 1
    assert structural_budget(graph_as_scheme(square3)) == 4 <= 5


def test_iterative_stats_lollipop():
    s = lollipop_scheme(3)
    st = iterative_reduction_stats(s)
    assert st.targets == 2 and st.skipped == 0
    assert st.separating == 1 and st.cv_soft == 1
    assert st.c_plus == 1 and st.c_zero == 1
    assert min(st.marks_per_component) >= 1
    assert structural_budget(s) == 2 <= 5

    sb = lollipop_scheme(3, loop_kind=ChainKind(BROKEN, 2, 3))
    st = iterative_reduction_stats(sb)
    assert st.cv_hard == 1 and st.separating == 1
    assert structural_budget(sb) <= 5 * scheme_degree(sb)


def test_iterative_stats_d4_with_two_dipoles():
    s = graph_as_scheme(square_graph(4, q=2))
    st = iterative_reduction_stats(s)
    assert st.targets == len(s.chain_vertices) + 2 + 2
    assert st.executed() + st.skipped == st.targets
